use alloc::boxed::Box;
use alloc::vec::Vec;

use super::channel::{ChannelModel, LatencyChannel};
use super::frame::{decode_frame, encode_frame, TeleopFrame};
use super::master::{Master, MasterParams};
use super::object::VirtualObject;
use super::slave::{Slave, SlaveParams};
use crate::dynamics::{PiGains, PlantParams, SimTrace, TraceRecord};
use crate::mechanism::DeviceConfig;
use crate::num;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionConfig {
    pub device: DeviceConfig,
    /// Also fixes the tick period of both ends.
    pub plant: PlantParams,
    pub gains: PiGains,
    pub master: MasterParams,
    pub slave: SlaveParams,
    pub object: VirtualObject,
    pub channel: ChannelModel,
    pub seed: u64,
}

/// Scripted operator pinch: piecewise-linear through `(t_ms, displacement_mm)`
/// keyframes, held constant outside them.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorProfile {
    pub keyframes: Vec<(f64, f64)>,
}

impl OperatorProfile {
    pub fn new(keyframes: Vec<(f64, f64)>) -> Result<Self> {
        if keyframes.is_empty() {
            return Err(Error::MissingParameter { name: "keyframes" });
        }
        if keyframes.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::invalid("keyframe time", keyframes[0].0));
        }
        if keyframes.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
            return Err(Error::invalid("keyframe", f64::NAN));
        }
        Ok(Self { keyframes })
    }

    /// Rest until `start_ms`, then pinch linearly to `depth` over `ramp_ms`
    /// and hold.
    pub fn pinch_and_hold(start_ms: f64, ramp_ms: f64, depth: f64) -> Self {
        Self {
            keyframes: alloc::vec![(start_ms, 0.0), (start_ms + ramp_ms, depth)],
        }
    }

    pub fn at(&self, t_ms: f64) -> f64 {
        let k = &self.keyframes;
        if t_ms <= k[0].0 {
            return k[0].1;
        }
        for w in k.windows(2) {
            let ((t0, x0), (t1, x1)) = (w[0], w[1]);
            if t_ms <= t1 {
                return x0 + (x1 - x0) * (t_ms - t0) / (t1 - t0);
            }
        }
        k[k.len() - 1].1
    }
}

/// One synchronized tick of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionRecord {
    /// ms.
    pub t: f64,
    pub target_force: f64,
    /// Master load-cell force, N.
    pub master_force: f64,
    pub voltage: f64,
    /// Operator pinch displacement, mm.
    pub master_displacement: f64,
    pub slave_force: f64,
    pub slave_position: f64,
    /// Transit time of the newest SLAVE_STATE seen by the master, ms.
    pub latency: f64,
    pub stale: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionTrace {
    pub sample_period: f64,
    pub records: Vec<SessionRecord>,
}

impl SessionTrace {
    /// Master side in the generic trace shape.
    pub fn master_trace(&self) -> SimTrace {
        SimTrace {
            sample_period: self.sample_period,
            records: self
                .records
                .iter()
                .map(|r| TraceRecord {
                    t: r.t,
                    target_force: r.target_force,
                    actual_force: r.master_force,
                    voltage: r.voltage,
                    displacement: r.master_displacement,
                })
                .collect(),
        }
    }

    /// Slave side; the target column carries the commanded displacement's
    /// force-free counterpart (zero) and voltage is unused.
    pub fn slave_trace(&self) -> SimTrace {
        SimTrace {
            sample_period: self.sample_period,
            records: self
                .records
                .iter()
                .map(|r| TraceRecord {
                    t: r.t,
                    target_force: 0.0,
                    actual_force: r.slave_force,
                    voltage: 0.0,
                    displacement: r.slave_position,
                })
                .collect(),
        }
    }
}

fn transmit(
    channel: &mut LatencyChannel,
    now_us: u64,
    frames: &[TeleopFrame],
) -> core::result::Result<(), crate::FrameError> {
    for f in frames {
        channel.send(now_us, encode_frame(f)?);
    }
    Ok(())
}

fn receive(
    channel: &mut LatencyChannel,
    now_us: u64,
) -> core::result::Result<Vec<TeleopFrame>, crate::FrameError> {
    channel.deliver(now_us).map(|d| decode_frame(&d.bytes)).collect()
}

/// Runs master and slave against each other for `duration_ms`.
///
/// Each tick the master consumes what has arrived, ticks and sends; then the
/// slave does the same. On a zero-latency link the slave therefore sees the
/// master's position from the same tick, and the master sees the slave's
/// state one tick later.
pub fn run_session(
    cfg: &SessionConfig,
    profile: &OperatorProfile,
    duration_ms: f64,
) -> Result<SessionTrace> {
    cfg.plant.validate()?;
    if !(duration_ms >= 0.0) || !duration_ms.is_finite() {
        return Err(Error::invalid("duration", duration_ms));
    }
    let mut master = Master::new(cfg.device, cfg.plant, cfg.gains, cfg.master)?;
    let mut slave = Slave::new(cfg.slave, cfg.object.clone())?;
    let mut to_slave = LatencyChannel::new(cfg.channel, cfg.seed, 1)?;
    let mut to_master = LatencyChannel::new(cfg.channel, cfg.seed, 2)?;

    let dt = cfg.plant.sample_period;
    let tick_us = num::round(dt * 1.0e3) as u64;
    let n = num::round(duration_ms / dt) as u64;
    let mut trace = SessionTrace {
        sample_period: dt,
        records: Vec::with_capacity(n as usize + 1),
    };
    for tick in 0..=n {
        let at_tick = |e: Error| Error::Session {
            tick,
            source: Box::new(e),
        };
        let now = tick * tick_us;
        let t = tick as f64 * dt;
        let pinch = profile.at(t);

        let inbox = receive(&mut to_master, now).map_err(|e| at_tick(e.into()))?;
        let m = master.tick(now, pinch, &inbox).map_err(at_tick)?;
        transmit(&mut to_slave, now, &m.frames).map_err(|e| at_tick(e.into()))?;

        let inbox = receive(&mut to_slave, now).map_err(|e| at_tick(e.into()))?;
        let s = slave.tick(now, &inbox).map_err(at_tick)?;
        transmit(&mut to_master, now, &s.frames).map_err(|e| at_tick(e.into()))?;

        trace.records.push(SessionRecord {
            t,
            target_force: m.target_force,
            master_force: m.local_force,
            voltage: m.voltage,
            master_displacement: pinch,
            slave_force: s.force,
            slave_position: s.position,
            latency: m.slave_latency_us.map_or(0.0, |us| us as f64 / 1.0e3),
            stale: m.stale,
        });
    }
    Ok(trace)
}
