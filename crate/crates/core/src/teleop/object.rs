use alloc::string::String;

use crate::{Error, Result};

/// Grasped object with a stiffening spring law:
/// `F(x) = k·δ + k3·δ³` for `δ = x − contact_position > 0`, zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualObject {
    pub label: String,
    /// mm.
    pub contact_position: f64,
    /// N/mm.
    pub stiffness: f64,
    /// N/mm³.
    pub cubic_stiffness: f64,
}

impl VirtualObject {
    pub fn new(label: &str, contact_position: f64, stiffness: f64, cubic_stiffness: f64) -> Self {
        Self {
            label: label.into(),
            contact_position,
            stiffness,
            cubic_stiffness,
        }
    }

    /// Linear spring touched at 1 mm of gripper travel.
    pub fn spring(label: &str, stiffness: f64) -> Self {
        Self::new(label, 1.0, stiffness, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.contact_position.is_finite() {
            return Err(Error::invalid("contact_position", self.contact_position));
        }
        if !(self.stiffness >= 0.0) || !self.stiffness.is_finite() {
            return Err(Error::invalid("stiffness", self.stiffness));
        }
        if !(self.cubic_stiffness >= 0.0) || !self.cubic_stiffness.is_finite() {
            return Err(Error::invalid("cubic_stiffness", self.cubic_stiffness));
        }
        Ok(())
    }

    /// Contact force at gripper position `x` (mm), N.
    pub fn force(&self, x: f64) -> f64 {
        let d = x - self.contact_position;
        if d <= 0.0 {
            0.0
        } else {
            self.stiffness * d + self.cubic_stiffness * d * d * d
        }
    }
}

impl Default for VirtualObject {
    fn default() -> Self {
        Self::spring("spring-0.5mm-wire", 0.3)
    }
}

/// Demonstration set: two springs, a soft hose and a stiffening hose.
/// Stiffness values are configuration choices, not measurements.
pub fn demo_objects() -> [VirtualObject; 4] {
    [
        VirtualObject::spring("spring-0.5mm-wire", 0.3),
        VirtualObject::spring("spring-0.6mm-wire", 0.5),
        VirtualObject::new("soft-hose", 1.0, 0.1, 0.0),
        VirtualObject::new("hard-hose", 1.0, 0.1, 0.02),
    ]
}
