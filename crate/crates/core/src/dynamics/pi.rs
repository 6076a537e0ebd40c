use crate::{Error, Result};

/// Discrete PI gains. The integral term accumulates raw error once per
/// control cycle, so `ki` is kV per N per cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiGains {
    /// kV/N.
    pub kp: f64,
    pub ki: f64,
    /// kV.
    pub output_min: f64,
    pub output_max: f64,
}

impl Default for PiGains {
    fn default() -> Self {
        Self {
            kp: 0.75,
            ki: 0.035,
            output_min: 0.0,
            output_max: 6.0,
        }
    }
}

impl PiGains {
    pub fn validate(&self) -> Result<()> {
        if !(self.kp >= 0.0) || !self.kp.is_finite() {
            return Err(Error::invalid("kp", self.kp));
        }
        if !(self.ki >= 0.0) || !self.ki.is_finite() {
            return Err(Error::invalid("ki", self.ki));
        }
        if !(self.output_min < self.output_max) || !self.output_max.is_finite() {
            return Err(Error::invalid("output_max", self.output_max));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    /// Sum of per-cycle errors, N·cycles.
    pub integral_accumulator: f64,
    /// kV.
    pub last_output: f64,
}

/// One controller cycle with conditional integration: the error is added to
/// the accumulator unless the output is clamped in the error's direction.
pub fn pi_step(g: &PiGains, state: ControllerState, error: f64) -> (f64, ControllerState) {
    let candidate = g.kp * error + g.ki * (state.integral_accumulator + error);
    let pinned_high = candidate > g.output_max && error > 0.0;
    let pinned_low = candidate < g.output_min && error < 0.0;
    let integral_accumulator = if pinned_high || pinned_low {
        state.integral_accumulator
    } else {
        state.integral_accumulator + error
    };
    let u = candidate.clamp(g.output_min, g.output_max);
    (
        u,
        ControllerState {
            integral_accumulator,
            last_output: u,
        },
    )
}
