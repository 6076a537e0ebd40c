use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::trace::SimTrace;
use crate::num;
use crate::{Error, Result};

/// Leading fraction of a trace treated as transient by [`ripple_analysis`].
pub const STEADY_STATE_DISCARD: f64 = 0.2;

/// 10–90 % rise time of a step response, ms.
///
/// Levels are fractions of the final sample. Crossing times are linearly
/// interpolated between samples; a trace that already starts past a level
/// crosses it at its first timestamp.
pub fn measure_rise_time(trace: &SimTrace) -> Result<f64> {
    let recs = &trace.records;
    let last = recs.last().ok_or(Error::MalformedTrace("empty trace"))?;
    let final_value = last.actual_force;
    if final_value == 0.0 || !final_value.is_finite() {
        return Err(Error::MalformedTrace("step response has no final value"));
    }
    let sign = final_value.signum();
    let crossing = |level: f64| -> Result<f64> {
        let level = level * final_value * sign;
        let i = recs
            .iter()
            .position(|r| r.actual_force * sign >= level)
            .ok_or(Error::MalformedTrace("level never crossed"))?;
        if i == 0 {
            return Ok(recs[0].t);
        }
        let (a, b) = (&recs[i - 1], &recs[i]);
        let (fa, fb) = (a.actual_force * sign, b.actual_force * sign);
        Ok(a.t + (level - fa) / (fb - fa) * (b.t - a.t))
    };
    Ok(crossing(0.9)? - crossing(0.1)?)
}

/// Root-mean-square of `target − actual` over records with `t >= from_ms`.
pub fn rms_error(trace: &SimTrace, from_ms: f64) -> f64 {
    let (sum, n) = trace
        .records
        .iter()
        .filter(|r| r.t >= from_ms)
        .fold((0.0, 0usize), |(s, n), r| {
            let e = r.target_force - r.actual_force;
            (s + e * e, n + 1)
        });
    if n == 0 {
        0.0
    } else {
        num::sqrt(sum / n as f64)
    }
}

/// Settling after one step of the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSettling {
    /// ms.
    pub edge_time: f64,
    pub rising: bool,
    /// Time after the edge until `|error|` stays within the band, ms.
    pub settling_time: f64,
}

/// Settling time after every jump of the target column. The band is
/// `band_fraction` of the jump size; an edge that never settles before the
/// next edge reports the full interval.
pub fn settling_times(trace: &SimTrace, band_fraction: f64) -> Vec<EdgeSettling> {
    let recs = &trace.records;
    let edges: Vec<usize> = (1..recs.len())
        .filter(|&i| recs[i].target_force != recs[i - 1].target_force)
        .collect();
    edges
        .iter()
        .enumerate()
        .map(|(n, &start)| {
            let end = edges.get(n + 1).copied().unwrap_or(recs.len());
            let jump = recs[start].target_force - recs[start - 1].target_force;
            let band = band_fraction * jump.abs();
            let last_out = (start..end)
                .rev()
                .find(|&i| (recs[i].target_force - recs[i].actual_force).abs() > band);
            let settled_at = match last_out {
                Some(i) if i + 1 < end => recs[i + 1].t,
                Some(_) => recs[end - 1].t,
                None => recs[start].t,
            };
            EdgeSettling {
                edge_time: recs[start].t,
                rising: jump > 0.0,
                settling_time: settled_at - recs[start].t,
            }
        })
        .collect()
}

/// Dominant in-band oscillation of a trace's actual force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RippleReport {
    /// Hz; `None` when the band holds no measurable energy.
    pub dominant_frequency: Option<f64>,
    /// Single-sided amplitude of the dominant bin, N.
    pub dominant_magnitude: f64,
    /// Half peak-to-peak of the band-passed steady-state signal, N.
    pub amplitude: f64,
    /// Frequency resolution of the analysis, Hz.
    pub resolution: f64,
}

const NO_PEAK_THRESHOLD: f64 = 1e-12;

/// Fourier analysis of the steady-state part of `trace` restricted to
/// `band_hz = (low, high)`.
///
/// The first [`STEADY_STATE_DISCARD`] of the trace is dropped. Only bins
/// inside the band are evaluated, and the band-passed signal is rebuilt from
/// those bins alone.
pub fn ripple_analysis(trace: &SimTrace, band_hz: (f64, f64)) -> Result<RippleReport> {
    let (low, high) = band_hz;
    crate::actuator::positive("band low", low)?;
    if !(high > low) {
        return Err(Error::invalid("band high", high));
    }
    let needed_ms = 5.0e3 / low;
    let available_ms = trace.duration();
    if trace.len() < 4 || available_ms < needed_ms {
        return Err(Error::InsufficientData {
            needed_ms,
            available_ms,
        });
    }
    let skip = num::ceil(trace.len() as f64 * STEADY_STATE_DISCARD) as usize;
    let x: Vec<f64> = trace.actual_forces().skip(skip).collect();
    let n = x.len();
    let window_s = n as f64 * trace.sample_period / 1.0e3;
    let resolution = 1.0 / window_s;

    let first = (num::ceil(low * window_s) as usize).max(1);
    let last = (num::floor(high * window_s) as usize).min((n - 1) / 2);
    let mut bins: Vec<(usize, f64, f64)> = Vec::new();
    for k in first..=last {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &v) in x.iter().enumerate() {
            // Reduce k·j modulo n before scaling to keep the angle exact.
            let ang = TAU * ((k * j) % n) as f64 / n as f64;
            re += v * num::cos(ang);
            im -= v * num::sin(ang);
        }
        bins.push((k, re, im));
    }

    let scale = 2.0 / n as f64;
    let best = bins
        .iter()
        .map(|&(k, re, im)| (k, scale * num::sqrt(re * re + im * im)))
        .fold(None, |acc: Option<(usize, f64)>, b| match acc {
            Some(a) if a.1 >= b.1 => Some(a),
            _ => Some(b),
        });
    let Some((k_best, mag)) = best.filter(|b| b.1 > NO_PEAK_THRESHOLD) else {
        return Ok(RippleReport {
            dominant_frequency: None,
            dominant_magnitude: 0.0,
            amplitude: 0.0,
            resolution,
        });
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..n {
        let v: f64 = bins
            .iter()
            .map(|&(k, re, im)| {
                let ang = TAU * ((k * j) % n) as f64 / n as f64;
                scale * (re * num::cos(ang) - im * num::sin(ang))
            })
            .sum();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(RippleReport {
        dominant_frequency: Some(k_best as f64 * resolution),
        dominant_magnitude: mag,
        amplitude: 0.5 * (hi - lo),
        resolution,
    })
}
