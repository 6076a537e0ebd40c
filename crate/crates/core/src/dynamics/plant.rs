use crate::num;
use crate::{Error, Result};

/// Discretisation of the first-order lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// `F += (dt/τ)(F* − F)`.
    ForwardEuler,
    /// Zero-order-hold solution, `F += (1 − e^(−dt/τ))(F* − F)`. Samples lie
    /// exactly on the continuous exponential.
    #[default]
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    /// τ, ms. The default puts the 10–90 % rise `τ·ln 9` at 53 ms.
    pub time_constant: f64,
    /// dt, ms.
    pub sample_period: f64,
    pub integrator: Integrator,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            time_constant: 24.1,
            sample_period: 1.0,
            integrator: Integrator::Exact,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        crate::actuator::positive("time_constant", self.time_constant)?;
        crate::actuator::positive("sample_period", self.sample_period)?;
        if self.sample_period > self.time_constant / 5.0 {
            return Err(Error::invalid("sample_period", self.sample_period));
        }
        Ok(())
    }

    /// Fraction of the remaining gap closed per sample.
    pub fn blend(&self) -> f64 {
        let r = self.sample_period / self.time_constant;
        match self.integrator {
            Integrator::ForwardEuler => r,
            Integrator::Exact => -libm::expm1(-r),
        }
    }

    /// One plant sample with the configured integrator.
    pub fn step(&self, force: f64, static_target: f64) -> f64 {
        force + self.blend() * (static_target - force)
    }

    /// Continuous-time 10–90 % rise time, ms.
    pub fn rise_time(&self) -> f64 {
        self.time_constant * num::ln(9.0)
    }
}

/// Forward-Euler first-order lag, `F + (dt/τ)(F* − F)`.
pub fn plant_step(p: &PlantParams, force: f64, static_target: f64) -> f64 {
    force + (p.sample_period / p.time_constant) * (static_target - force)
}
