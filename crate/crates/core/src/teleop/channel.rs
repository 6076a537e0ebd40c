use alloc::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::frame::FRAME_LEN;
use crate::num;
use crate::{Error, Result};

/// Latency of a reliable in-order link.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelModel {
    /// ms.
    pub base_latency: f64,
    /// Upper bound of uniform extra delay, ms.
    pub jitter: f64,
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_latency >= 0.0) || !self.base_latency.is_finite() {
            return Err(Error::invalid("base_latency", self.base_latency));
        }
        if !(self.jitter >= 0.0) || !self.jitter.is_finite() {
            return Err(Error::invalid("jitter", self.jitter));
        }
        Ok(())
    }
}

/// A frame that has arrived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub bytes: [u8; FRAME_LEN],
    pub sent_us: u64,
    pub delivered_us: u64,
}

impl Delivery {
    pub fn latency_us(&self) -> u64 {
        self.delivered_us - self.sent_us
    }
}

/// Deterministic one-way link. Each frame is delayed by the base latency
/// plus seeded uniform jitter, and never overtakes an earlier frame.
#[derive(Debug, Clone)]
pub struct LatencyChannel {
    model: ChannelModel,
    rng: ChaCha8Rng,
    in_flight: VecDeque<Delivery>,
    last_delivery_us: u64,
}

impl LatencyChannel {
    /// `stream` separates the two directions of one seeded session.
    pub fn new(model: ChannelModel, seed: u64, stream: u64) -> Result<Self> {
        model.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(Self {
            model,
            rng,
            in_flight: VecDeque::new(),
            last_delivery_us: 0,
        })
    }

    pub fn send(&mut self, now_us: u64, bytes: [u8; FRAME_LEN]) {
        let jitter = if self.model.jitter > 0.0 {
            self.rng.gen::<f64>() * self.model.jitter
        } else {
            0.0
        };
        let delay_us = num::round((self.model.base_latency + jitter) * 1.0e3) as u64;
        let delivered_us = (now_us + delay_us).max(self.last_delivery_us);
        self.last_delivery_us = delivered_us;
        self.in_flight.push_back(Delivery {
            bytes,
            sent_us: now_us,
            delivered_us,
        });
    }

    /// Pops every frame due at or before `now_us`, in send order.
    pub fn deliver(&mut self, now_us: u64) -> impl Iterator<Item = Delivery> + '_ {
        let due = self
            .in_flight
            .iter()
            .take_while(|d| d.delivered_us <= now_us)
            .count();
        self.in_flight.drain(..due)
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.len()
    }
}
