//! High-voltage drive synthesis.
//!
//! The base drive is an AC square wave with trapezoidal (slew-limited) edges.
//! Polarity reversals momentarily pull `u²` towards zero, and an optional sine
//! overlay modulates `u²` at low frequency; both show up as force ripple once
//! the drive passes through the quadratic actuator law.
//!
//! Time is in seconds here, voltages in kV and slew rates in kV/ms.

use core::f64::consts::TAU;

use crate::num;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWaveSpec {
    /// Hz.
    pub frequency: f64,
    /// kV.
    pub amplitude: f64,
    /// Edge slope, kV/ms. `f64::INFINITY` gives ideal edges.
    pub slew_rate: f64,
}

impl Default for SquareWaveSpec {
    fn default() -> Self {
        Self {
            frequency: 20.0,
            amplitude: 3.5,
            slew_rate: 10.0,
        }
    }
}

impl SquareWaveSpec {
    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    /// Duration of one full edge from `-A` to `+A`, seconds.
    pub fn edge_duration(&self) -> f64 {
        if self.slew_rate.is_infinite() {
            0.0
        } else {
            2.0 * self.amplitude / (self.slew_rate * 1.0e3)
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::actuator::positive("square.frequency", self.frequency)?;
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::invalid("square.amplitude", self.amplitude));
        }
        if !(self.slew_rate > 0.0) {
            return Err(Error::invalid("square.slew_rate", self.slew_rate));
        }
        if self.edge_duration() >= 0.5 * self.period() {
            return Err(Error::invalid("square.slew_rate", self.slew_rate));
        }
        Ok(())
    }

    // Distance-limited edge: the wave leaves zero at `slew` and saturates at
    // the amplitude.
    fn edge(&self, since_crossing: f64) -> f64 {
        if self.slew_rate.is_infinite() {
            self.amplitude
        } else {
            (self.slew_rate * 1.0e3 * since_crossing).min(self.amplitude)
        }
    }

    /// Trapezoidal square wave. Zero crossings sit at `t = n·T/2`; the first
    /// half period is positive.
    pub fn sample(&self, t: f64) -> f64 {
        let half = 0.5 * self.period();
        let p = num::rem_euclid(t, self.period());
        let (sign, q) = if p < half { (1.0, p) } else { (-1.0, p - half) };
        sign * self.edge(q).min(self.edge(half - q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineOverlay {
    pub frequency: f64,
    pub amplitude: f64,
    /// rad; 0 starts upward through zero.
    pub phase: f64,
}

impl SineOverlay {
    pub fn validate(&self) -> Result<()> {
        crate::actuator::positive("overlay.frequency", self.frequency)?;
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::invalid("overlay.amplitude", self.amplitude));
        }
        if !self.phase.is_finite() {
            return Err(Error::invalid("overlay.phase", self.phase));
        }
        Ok(())
    }

    pub fn sample(&self, t: f64) -> f64 {
        self.amplitude * num::sin(TAU * self.frequency * t + self.phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeWaveform {
    pub square: SquareWaveSpec,
    pub overlay: Option<SineOverlay>,
    /// kV.
    pub breakdown_limit: f64,
}

impl Default for CompositeWaveform {
    fn default() -> Self {
        Self {
            square: SquareWaveSpec::default(),
            overlay: None,
            breakdown_limit: 7.0,
        }
    }
}

/// Outcome of a successful [`validate_waveform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformReport {
    /// `square.amplitude + overlay.amplitude`, kV.
    pub peak_bound: f64,
    /// Largest `|u|` seen by dense sampling, kV.
    pub sampled_peak: f64,
    /// Window the sampled peak was taken over, s.
    pub window: f64,
}

/// Samples per second for peak detection.
pub const PEAK_SAMPLE_RATE: f64 = 100_000.0;

impl CompositeWaveform {
    pub fn validate_parameters(&self) -> Result<()> {
        self.square.validate()?;
        if let Some(o) = &self.overlay {
            o.validate()?;
        }
        crate::actuator::positive("breakdown_limit", self.breakdown_limit)
    }

    /// `u0(t)`, kV.
    pub fn sample(&self, t: f64) -> f64 {
        let base = self.square.sample(t);
        match &self.overlay {
            Some(o) => base + o.sample(t),
            None => base,
        }
    }

    pub fn peak_bound(&self) -> f64 {
        self.square.amplitude + self.overlay.map_or(0.0, |o| o.amplitude)
    }

    /// Least common period of the square wave and the overlay, if their
    /// frequency ratio is rational with a denominator up to 10 000.
    pub fn common_period(&self) -> Option<f64> {
        let base = self.square.period();
        let Some(o) = &self.overlay else {
            return Some(base);
        };
        let ratio = o.frequency / self.square.frequency;
        (1..=10_000u32).find_map(|n| {
            let cycles = ratio * f64::from(n);
            ((cycles - num::round(cycles)).abs() < 1e-9 * f64::from(n).max(1.0))
                .then(|| f64::from(n) * base)
        })
    }

    /// Peak `|u|` sampled at [`PEAK_SAMPLE_RATE`] over one common period, or
    /// over a second when no common period exists.
    pub fn sampled_peak(&self) -> (f64, f64) {
        let window = self.common_period().unwrap_or(1.0).max(self.square.period());
        let n = num::ceil(window * PEAK_SAMPLE_RATE) as u64;
        let peak = (0..=n)
            .map(|i| self.sample(i as f64 / PEAK_SAMPLE_RATE).abs())
            .fold(0.0, f64::max);
        (peak, window)
    }
}

/// Checks parameter invariants and the breakdown guard. The analytic
/// amplitude sum is the deciding peak; dense sampling can only lower it.
pub fn validate_waveform(w: &CompositeWaveform) -> Result<WaveformReport> {
    w.validate_parameters()?;
    let (sampled_peak, window) = w.sampled_peak();
    let peak = w.peak_bound().max(sampled_peak);
    if peak > w.breakdown_limit {
        return Err(Error::BreakdownRisk {
            peak,
            limit: w.breakdown_limit,
        });
    }
    Ok(WaveformReport {
        peak_bound: w.peak_bound(),
        sampled_peak,
        window,
    })
}

/// Free function form of [`CompositeWaveform::sample`].
pub fn sample_voltage(w: &CompositeWaveform, t: f64) -> f64 {
    w.sample(t)
}
