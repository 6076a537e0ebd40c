use alloc::vec::Vec;

use crate::{Error, Result};

/// One sample of a simulation trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// ms.
    pub t: f64,
    /// N.
    pub target_force: f64,
    pub actual_force: f64,
    /// kV.
    pub voltage: f64,
    /// Pinch displacement, mm.
    pub displacement: f64,
}

impl TraceRecord {
    fn is_finite(&self) -> bool {
        [
            self.t,
            self.target_force,
            self.actual_force,
            self.voltage,
            self.displacement,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Records on the grid `t = k·dt`, `k = 0, 1, …`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    /// dt, ms.
    pub sample_period: f64,
    pub records: Vec<TraceRecord>,
}

impl SimTrace {
    pub fn new(sample_period: f64) -> Self {
        Self {
            sample_period,
            records: Vec::new(),
        }
    }

    pub fn with_capacity(sample_period: f64, n: usize) -> Self {
        Self {
            sample_period,
            records: Vec::with_capacity(n),
        }
    }

    /// Time of the next record, ms.
    pub fn next_time(&self) -> f64 {
        self.records.len() as f64 * self.sample_period
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Span from first to last record, ms.
    pub fn duration(&self) -> f64 {
        match (self.records.first(), self.records.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn actual_forces(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.actual_force)
    }

    /// Checks the grid and finiteness invariants, for traces read back from
    /// storage.
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_period > 0.0) {
            return Err(Error::MalformedTrace("sample period must be positive"));
        }
        let tol = 1e-9 * self.sample_period;
        for (i, pair) in self.records.windows(2).enumerate() {
            let step = pair[1].t - pair[0].t;
            if (step - self.sample_period).abs() > tol * (i as f64 + 2.0) {
                return Err(Error::MalformedTrace("time step is not constant"));
            }
        }
        if !self.records.iter().all(TraceRecord::is_finite) {
            return Err(Error::MalformedTrace("non-finite value"));
        }
        Ok(())
    }
}
