use alloc::vec::Vec;

use super::frame::{MsgType, TeleopFrame};
use super::Handshake;
use crate::dynamics::{pi_step, ControllerState, PiGains, PlantParams};
use crate::mechanism::{device_static_force, DeviceConfig};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterParams {
    /// Hold the last target and flag stale data after this long without a
    /// SLAVE_STATE, ms.
    pub stale_timeout: f64,
    /// Slave force above which the master reflects it, N.
    pub contact_threshold: f64,
}

impl Default for MasterParams {
    fn default() -> Self {
        Self {
            stale_timeout: 100.0,
            contact_threshold: 0.02,
        }
    }
}

/// What one master tick produced.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterOutput {
    pub frames: Vec<TeleopFrame>,
    /// Drive voltage applied this tick, kV.
    pub voltage: f64,
    /// Simulated device load-cell force at the start of the tick, N.
    pub local_force: f64,
    pub target_force: f64,
    pub stale: bool,
    /// Age of the newest SLAVE_STATE when it arrived, µs.
    pub slave_latency_us: Option<u64>,
}

/// Haptic device side: streams the pinch displacement and renders the
/// slave's contact force through the PI loop.
#[derive(Debug, Clone)]
pub struct Master {
    device: DeviceConfig,
    plant: PlantParams,
    gains: PiGains,
    params: MasterParams,
    link: Handshake,
    seq: u16,
    controller: ControllerState,
    force: f64,
    target: f64,
    active_since_us: u64,
    last_slave_us: Option<u64>,
    slave_latency_us: Option<u64>,
    slave_force: f64,
}

impl Master {
    pub fn new(
        device: DeviceConfig,
        plant: PlantParams,
        gains: PiGains,
        params: MasterParams,
    ) -> Result<Self> {
        device.validate()?;
        plant.validate()?;
        gains.validate()?;
        Ok(Self {
            device,
            plant,
            gains,
            params,
            link: Handshake::default(),
            seq: 0,
            controller: ControllerState::default(),
            force: 0.0,
            target: 0.0,
            active_since_us: 0,
            last_slave_us: None,
            slave_latency_us: None,
            slave_force: 0.0,
        })
    }

    pub fn is_active(&self) -> bool {
        self.link.is_active()
    }

    pub fn is_closed(&self) -> bool {
        self.link.closed
    }

    pub fn local_force(&self) -> f64 {
        self.force
    }

    fn frame(&mut self, msg_type: MsgType, now_us: u64, a: f64, b: f64) -> TeleopFrame {
        let f = TeleopFrame {
            msg_type,
            seq: self.seq,
            timestamp_us: now_us,
            payload_a: a,
            payload_b: b,
        };
        self.seq = self.seq.wrapping_add(1);
        f
    }

    /// Ends the session from this side.
    pub fn shutdown(&mut self, now_us: u64) -> TeleopFrame {
        self.link.closed = true;
        self.frame(MsgType::Shutdown, now_us, 0.0, 0.0)
    }

    /// One 1 kHz cycle at pinch displacement `pinch` (mm).
    pub fn tick(&mut self, now_us: u64, pinch: f64, inbound: &[TeleopFrame]) -> Result<MasterOutput> {
        for f in inbound {
            match f.msg_type {
                MsgType::Hello => self.link.received = true,
                MsgType::SlaveState => {
                    self.slave_force = f.payload_b;
                    self.last_slave_us = Some(now_us);
                    self.slave_latency_us = Some(now_us.saturating_sub(f.timestamp_us));
                }
                MsgType::Shutdown => self.link.closed = true,
                MsgType::MasterPos => {}
            }
        }
        let mut frames = Vec::new();
        if !self.link.sent && !self.link.closed {
            frames.push(self.frame(MsgType::Hello, now_us, 0.0, 0.0));
            self.link.sent = true;
        }
        if self.link.activate() {
            self.active_since_us = now_us;
        }

        let mut stale = false;
        let voltage = if self.link.is_active() {
            let since = self.last_slave_us.unwrap_or(self.active_since_us);
            stale = (now_us - since) as f64 > self.params.stale_timeout * 1.0e3;
            if !stale {
                self.target = if self.slave_force > self.params.contact_threshold {
                    self.slave_force
                } else {
                    0.0
                };
            }
            let pos = self.frame(MsgType::MasterPos, now_us, pinch, self.force);
            frames.push(pos);
            let (u, next) = pi_step(&self.gains, self.controller, self.target - self.force);
            self.controller = next;
            u
        } else {
            0.0
        };

        let local_force = self.force;
        let static_force = device_static_force(&self.device, pinch, voltage)?;
        self.force = self.plant.step(self.force, static_force);
        Ok(MasterOutput {
            frames,
            voltage,
            local_force,
            target_force: self.target,
            stale,
            slave_latency_us: self.slave_latency_us,
        })
    }
}
