//! Bilateral teleoperation: the haptic device (master) streams its pinch
//! displacement, the gripper (slave) mirrors it and streams back its contact
//! force, and the master renders that force through its PI loop.
//!
//! Both ends exchange one HELLO each before anything else and stop on
//! SHUTDOWN. [`run_session`] interleaves the two tick loops on a shared clock
//! over [`LatencyChannel`]s, so sessions replay bit-identically from a seed.

mod channel;
mod frame;
mod master;
mod object;
mod session;
mod slave;

pub use channel::{ChannelModel, Delivery, LatencyChannel};
pub use frame::{
    decode_frame, encode_frame, FrameAssembler, MsgType, TeleopFrame, FRAME_LEN, MAGIC,
};
pub use master::{Master, MasterOutput, MasterParams};
pub use object::{demo_objects, VirtualObject};
pub use session::{run_session, OperatorProfile, SessionConfig, SessionRecord, SessionTrace};
pub use slave::{Slave, SlaveOutput, SlaveParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Handshake {
    sent: bool,
    received: bool,
    active: bool,
    closed: bool,
}

impl Handshake {
    /// Returns true on the tick the link becomes active.
    fn activate(&mut self) -> bool {
        if !self.active && !self.closed && self.sent && self.received {
            self.active = true;
            return true;
        }
        false
    }

    fn is_active(&self) -> bool {
        self.active && !self.closed
    }
}
