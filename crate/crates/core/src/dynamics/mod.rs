//! Closed-loop force simulation.
//!
//! The device is modelled as its static force map followed by a first-order
//! lag. A discrete PI controller at the 1 ms loop rate drives the actuator
//! voltage; open-loop runners cover step responses and drive-waveform
//! vibration. Traces are sampled on a fixed millisecond grid.

mod analysis;
mod pi;
mod plant;
mod sim;
mod trace;

pub use analysis::{
    measure_rise_time, ripple_analysis, rms_error, settling_times, EdgeSettling, RippleReport,
    STEADY_STATE_DISCARD,
};
pub use pi::{pi_step, ControllerState, PiGains};
pub use plant::{plant_step, Integrator, PlantParams};
pub use sim::{
    simulate_step_response, simulate_tracking, simulate_vibration, static_force_map, TargetShape,
    TargetWave,
};
pub use trace::{SimTrace, TraceRecord};
