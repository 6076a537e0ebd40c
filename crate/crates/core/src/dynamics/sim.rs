use core::f64::consts::TAU;

use super::pi::{pi_step, ControllerState, PiGains};
use super::plant::PlantParams;
use super::trace::{SimTrace, TraceRecord};
use crate::mechanism::{device_static_force, DeviceConfig};
use crate::num;
use crate::waveform::{validate_waveform, CompositeWaveform};
use crate::{Error, Result};

/// Static device force at pinch displacement `displacement` and drive `u`.
pub fn static_force_map(dev: &DeviceConfig, displacement: f64, u: f64) -> Result<f64> {
    device_static_force(dev, displacement, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetShape {
    #[default]
    Sine,
    Square,
    Triangle,
}

/// Periodic force target, `offset + amplitude·shape(f·t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetWave {
    pub shape: TargetShape,
    /// Hz.
    pub frequency: f64,
    /// N.
    pub amplitude: f64,
    pub offset: f64,
}

impl Default for TargetWave {
    fn default() -> Self {
        Self {
            shape: TargetShape::Sine,
            frequency: 0.08,
            amplitude: 0.5,
            offset: 0.6,
        }
    }
}

impl TargetWave {
    pub fn constant(force: f64) -> Self {
        Self {
            shape: TargetShape::Sine,
            frequency: 1.0,
            amplitude: 0.0,
            offset: force,
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::actuator::positive("target.frequency", self.frequency)?;
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::invalid("target.amplitude", self.amplitude));
        }
        if !self.offset.is_finite() {
            return Err(Error::invalid("target.offset", self.offset));
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        self.offset + self.amplitude
    }

    /// Target force at `t_ms`.
    pub fn sample(&self, t_ms: f64) -> f64 {
        let phase = num::rem_euclid(self.frequency * t_ms / 1.0e3, 1.0);
        let unit = match self.shape {
            TargetShape::Sine => num::sin(TAU * phase),
            TargetShape::Square => {
                if phase < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            // Starts at zero rising, like the sine.
            TargetShape::Triangle => {
                if phase < 0.25 {
                    4.0 * phase
                } else if phase < 0.75 {
                    2.0 - 4.0 * phase
                } else {
                    4.0 * phase - 4.0
                }
            }
        };
        self.offset + self.amplitude * unit
    }
}

fn steps(p: &PlantParams, duration: f64) -> Result<usize> {
    p.validate()?;
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::invalid("duration", duration));
    }
    Ok(num::round(duration / p.sample_period) as usize)
}

/// Open-loop response to a voltage step applied at `t = 0` with the pinch held
/// at `displacement`. The target column holds the static force the plant is
/// converging to.
pub fn simulate_step_response(
    dev: &DeviceConfig,
    p: &PlantParams,
    u_step: f64,
    displacement: f64,
    duration: f64,
) -> Result<SimTrace> {
    let n = steps(p, duration)?;
    dev.validate()?;
    let target = static_force_map(dev, displacement, u_step)?;
    let mut trace = SimTrace::with_capacity(p.sample_period, n + 1);
    let mut force = 0.0;
    for _ in 0..=n {
        trace.records.push(TraceRecord {
            t: trace.next_time(),
            target_force: target,
            actual_force: force,
            voltage: u_step,
            displacement,
        });
        force = p.step(force, target);
    }
    Ok(trace)
}

/// Closed-loop force tracking at a fixed pinch displacement.
///
/// Each cycle: error against the current force, one PI step, then the plant
/// moves toward the static force at the new voltage.
pub fn simulate_tracking(
    dev: &DeviceConfig,
    p: &PlantParams,
    g: &PiGains,
    target: &TargetWave,
    displacement: f64,
    duration: f64,
) -> Result<SimTrace> {
    let n = steps(p, duration)?;
    dev.validate()?;
    g.validate()?;
    target.validate()?;
    let capability = static_force_map(dev, displacement, g.output_max)?;
    if target.peak() > capability {
        return Err(Error::Unreachable {
            target: target.peak(),
            capability,
        });
    }
    // Quadratic in u, so one evaluation per run.
    let coefficient = static_force_map(dev, displacement, 1.0)?;
    let mut trace = SimTrace::with_capacity(p.sample_period, n + 1);
    let mut state = ControllerState::default();
    let mut force = 0.0;
    for _ in 0..=n {
        let t = trace.next_time();
        let wanted = target.sample(t);
        let (u, next) = pi_step(g, state, wanted - force);
        state = next;
        trace.records.push(TraceRecord {
            t,
            target_force: wanted,
            actual_force: force,
            voltage: u,
            displacement,
        });
        force = p.step(force, coefficient * u * u);
    }
    Ok(trace)
}

/// Open-loop drive with a composite waveform at a fixed pinch displacement.
/// The target column holds the instantaneous static force.
pub fn simulate_vibration(
    dev: &DeviceConfig,
    p: &PlantParams,
    w: &CompositeWaveform,
    displacement: f64,
    duration: f64,
) -> Result<SimTrace> {
    let n = steps(p, duration)?;
    dev.validate()?;
    validate_waveform(w)?;
    let coefficient = static_force_map(dev, displacement, 1.0)?;
    let mut trace = SimTrace::with_capacity(p.sample_period, n + 1);
    let mut force = 0.0;
    for _ in 0..=n {
        let t = trace.next_time();
        let u = w.sample(t / 1.0e3);
        let instantaneous = coefficient * u * u;
        trace.records.push(TraceRecord {
            t,
            target_force: instantaneous,
            actual_force: force,
            voltage: u,
            displacement,
        });
        force = p.step(force, instantaneous);
    }
    Ok(trace)
}
