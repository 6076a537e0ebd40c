//! Fixed 28-byte teleoperation frame.
//!
//! ```text
//! offset  size  field
//!      0     1  magic (0xA7)
//!      1     1  msg_type
//!      2     2  seq           u16 LE
//!      4     8  timestamp_us  u64 LE
//!     12     8  payload_a     f64 LE
//!     20     8  payload_b     f64 LE
//! ```
//!
//! Frames follow each other on the stream with no delimiter.

use alloc::collections::VecDeque;

use crate::FrameError;

pub const FRAME_LEN: usize = 28;
pub const MAGIC: u8 = 0xA7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    /// a: pinch displacement mm, b: master local force N.
    MasterPos = 0x01,
    /// a: gripper displacement mm, b: gripper load-cell force N.
    SlaveState = 0x02,
    Hello = 0x03,
    Shutdown = 0x04,
}

impl TryFrom<u8> for MsgType {
    type Error = FrameError;

    fn try_from(b: u8) -> Result<Self, FrameError> {
        Ok(match b {
            0x01 => MsgType::MasterPos,
            0x02 => MsgType::SlaveState,
            0x03 => MsgType::Hello,
            0x04 => MsgType::Shutdown,
            other => return Err(FrameError::BadType(other)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleopFrame {
    pub msg_type: MsgType,
    pub seq: u16,
    pub timestamp_us: u64,
    pub payload_a: f64,
    pub payload_b: f64,
}

impl TeleopFrame {
    pub fn control(msg_type: MsgType, seq: u16, timestamp_us: u64) -> Self {
        Self {
            msg_type,
            seq,
            timestamp_us,
            payload_a: 0.0,
            payload_b: 0.0,
        }
    }

    pub fn encode(&self) -> Result<[u8; FRAME_LEN], FrameError> {
        encode_frame(self)
    }
}

pub fn encode_frame(f: &TeleopFrame) -> Result<[u8; FRAME_LEN], FrameError> {
    if !f.payload_a.is_finite() {
        return Err(FrameError::NonFinite("payload_a"));
    }
    if !f.payload_b.is_finite() {
        return Err(FrameError::NonFinite("payload_b"));
    }
    let mut out = [0u8; FRAME_LEN];
    out[0] = MAGIC;
    out[1] = f.msg_type as u8;
    out[2..4].copy_from_slice(&f.seq.to_le_bytes());
    out[4..12].copy_from_slice(&f.timestamp_us.to_le_bytes());
    out[12..20].copy_from_slice(&f.payload_a.to_le_bytes());
    out[20..28].copy_from_slice(&f.payload_b.to_le_bytes());
    Ok(out)
}

pub fn decode_frame(bytes: &[u8]) -> Result<TeleopFrame, FrameError> {
    let bytes: &[u8; FRAME_LEN] = bytes
        .try_into()
        .map_err(|_| FrameError::BadLength(bytes.len()))?;
    if bytes[0] != MAGIC {
        return Err(FrameError::BadMagic(bytes[0]));
    }
    let msg_type = MsgType::try_from(bytes[1])?;
    let field = |range: core::ops::Range<usize>| -> [u8; 8] {
        let mut b = [0u8; 8];
        b.copy_from_slice(&bytes[range]);
        b
    };
    let payload_a = f64::from_le_bytes(field(12..20));
    if !payload_a.is_finite() {
        return Err(FrameError::NonFinite("payload_a"));
    }
    let payload_b = f64::from_le_bytes(field(20..28));
    if !payload_b.is_finite() {
        return Err(FrameError::NonFinite("payload_b"));
    }
    Ok(TeleopFrame {
        msg_type,
        seq: u16::from_le_bytes([bytes[2], bytes[3]]),
        timestamp_us: u64::from_le_bytes(field(4..12)),
        payload_a,
        payload_b,
    })
}

/// Splits a byte stream into frames. Malformed frames are consumed and
/// reported, so the stream stays aligned on 28-byte boundaries.
#[derive(Debug, Default)]
pub struct FrameAssembler {
    buf: VecDeque<u8>,
}

impl FrameAssembler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend(bytes);
    }

    pub fn buffered(&self) -> usize {
        self.buf.len()
    }

    pub fn next_frame(&mut self) -> Option<Result<TeleopFrame, FrameError>> {
        if self.buf.len() < FRAME_LEN {
            return None;
        }
        let mut raw = [0u8; FRAME_LEN];
        for (dst, src) in raw.iter_mut().zip(self.buf.drain(..FRAME_LEN)) {
            *dst = src;
        }
        Some(decode_frame(&raw))
    }
}
