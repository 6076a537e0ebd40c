use alloc::vec::Vec;

use super::frame::{MsgType, TeleopFrame};
use super::object::VirtualObject;
use super::Handshake;
use crate::num;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlaveParams {
    /// Ball-screw velocity limit, mm/s.
    pub max_speed: f64,
    /// Position command resolution, mm.
    pub position_step: f64,
    /// N.
    pub contact_threshold: f64,
}

impl Default for SlaveParams {
    fn default() -> Self {
        Self {
            max_speed: 30.0,
            position_step: 0.01,
            contact_threshold: 0.02,
        }
    }
}

impl SlaveParams {
    pub fn validate(&self) -> Result<()> {
        crate::actuator::positive("max_speed", self.max_speed)?;
        crate::actuator::positive("position_step", self.position_step)?;
        crate::actuator::positive("contact_threshold", self.contact_threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlaveOutput {
    pub frames: Vec<TeleopFrame>,
    /// Gripper displacement, mm.
    pub position: f64,
    /// Load-cell force, N.
    pub force: f64,
    pub in_contact: bool,
}

/// Gripper side: a rate-limited position servo closing on a virtual object.
#[derive(Debug, Clone)]
pub struct Slave {
    params: SlaveParams,
    object: VirtualObject,
    link: Handshake,
    seq: u16,
    position: f64,
    command: Option<f64>,
    last_tick_us: Option<u64>,
}

impl Slave {
    pub fn new(params: SlaveParams, object: VirtualObject) -> Result<Self> {
        params.validate()?;
        object.validate()?;
        Ok(Self {
            params,
            object,
            link: Handshake::default(),
            seq: 0,
            position: 0.0,
            command: None,
            last_tick_us: None,
        })
    }

    pub fn is_active(&self) -> bool {
        self.link.is_active()
    }

    pub fn is_closed(&self) -> bool {
        self.link.closed
    }

    pub fn position(&self) -> f64 {
        self.position
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

    pub fn tick(&mut self, now_us: u64, inbound: &[TeleopFrame]) -> Result<SlaveOutput> {
        for f in inbound {
            match f.msg_type {
                MsgType::Hello => self.link.received = true,
                MsgType::MasterPos => {
                    if !f.payload_a.is_finite() {
                        return Err(Error::invalid("commanded position", f.payload_a));
                    }
                    self.command = Some(f.payload_a);
                }
                MsgType::Shutdown => self.link.closed = true,
                MsgType::SlaveState => {}
            }
        }
        let dt_s = self
            .last_tick_us
            .map_or(0.0, |last| now_us.saturating_sub(last) as f64 / 1.0e6);
        self.last_tick_us = Some(now_us);

        let mut frames = Vec::new();
        if !self.link.sent && !self.link.closed {
            frames.push(self.frame(MsgType::Hello, now_us, 0.0, 0.0));
            self.link.sent = true;
        }
        self.link.activate();

        if self.link.is_active() {
            if let Some(cmd) = self.command {
                let step = self.params.position_step;
                let goal = num::round(cmd / step) * step;
                let reach = self.params.max_speed * dt_s;
                let gap = goal - self.position;
                self.position = if gap.abs() <= reach {
                    goal
                } else {
                    self.position + reach * gap.signum()
                };
            }
        }
        let force = self.object.force(self.position);
        if self.link.is_active() {
            let state = self.frame(MsgType::SlaveState, now_us, self.position, force);
            frames.push(state);
        }
        Ok(SlaveOutput {
            frames,
            position: self.position,
            force,
            in_contact: force > self.params.contact_threshold,
        })
    }
}
