//! Models for a kinesthetic haptic device driven by stacked electrohydraulic
//! (HASEL) actuators.
//!
//! The crate is `no_std` with `alloc` and contains only the pure parts of the
//! simulator:
//!
//! - [`actuator`]: squeeze displacement to feedback force for one bladder and
//!   for a series stack, plus least-squares calibration of the mixing
//!   parameter `K`.
//! - [`mechanism`]: the pinch linkage statics and the composed device map.
//! - [`waveform`]: slew-limited square drive with an optional sine overlay and
//!   a breakdown guard.
//! - [`dynamics`]: first-order force plant, discrete PI controller, open and
//!   closed loop simulations, rise-time and ripple analysis.
//! - [`teleop`]: the 28-byte master/slave wire frame, a latency channel, the
//!   two tick state machines and a deterministic session scheduler.
//!
//! Canonical units everywhere are mm, N, kV, ms (s for waveform time) and
//! N/mm². See [`units`] for conversions at the boundary.

#![no_std]

extern crate alloc;

pub mod actuator;
pub mod dynamics;
mod error;
pub mod fixtures;
pub mod mechanism;
pub(crate) mod num;
pub mod teleop;
pub mod units;
pub mod waveform;

pub use error::{DeviceStage, Error, FrameError};

pub type Result<T, E = Error> = core::result::Result<T, E>;
