//! Pinch linkage statics.
//!
//! A vertical pinch of `Δx_p` swings two connecting rods of length `R`, which
//! push the left and right squeeze plates outward into the actuator stacks.
//! The stacks push back with `F_HA`; the rods carry it back to the finger.

use crate::actuator::{stack_force, ActuatorGeometry, CalibrationParams, StackConfig};
use crate::num;
use crate::{DeviceStage, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismGeometry {
    /// Connecting rod length `R`, mm.
    pub rod_length: f64,
    /// Vertical distance `L` from the pinch plate's initial position to the
    /// rod's lower end point, mm.
    pub vertical_offset: f64,
    pub max_pinch_stroke: f64,
}

impl Default for MechanismGeometry {
    fn default() -> Self {
        Self {
            rod_length: 35.0,
            vertical_offset: 15.0,
            max_pinch_stroke: 15.0,
        }
    }
}

impl MechanismGeometry {
    pub fn validate(&self) -> Result<()> {
        crate::actuator::positive("rod_length", self.rod_length)?;
        crate::actuator::positive("vertical_offset", self.vertical_offset)?;
        if self.vertical_offset > self.rod_length {
            return Err(Error::invalid("vertical_offset", self.vertical_offset));
        }
        crate::actuator::positive("max_pinch_stroke", self.max_pinch_stroke)?;
        if self.max_pinch_stroke > self.vertical_offset {
            return Err(Error::invalid("max_pinch_stroke", self.max_pinch_stroke));
        }
        Ok(())
    }

    fn check_pinch(&self, pinch: f64) -> Result<()> {
        self.validate()?;
        if !(pinch >= 0.0 && pinch <= self.vertical_offset) {
            return Err(Error::PinchOutOfDomain {
                pinch,
                max: self.vertical_offset,
            });
        }
        Ok(())
    }

    /// Outward squeeze-plate displacement `Δx_h` for a pinch of `pinch` mm.
    pub fn plate_displacement(&self, pinch: f64) -> Result<f64> {
        self.check_pinch(pinch)?;
        let r2 = self.rod_length * self.rod_length;
        let rest = self.vertical_offset - pinch;
        let arg = r2 - rest * rest;
        if arg < 0.0 {
            return Err(Error::PinchOutOfDomain {
                pinch,
                max: self.vertical_offset,
            });
        }
        let l = self.vertical_offset;
        Ok(num::sqrt(arg) - num::sqrt(r2 - l * l))
    }

    /// Rod angle from the horizontal, `θ = asin((L − Δx_p) / R)`.
    pub fn rod_angle(&self, pinch: f64) -> Result<f64> {
        self.check_pinch(pinch)?;
        Ok(num::asin((self.vertical_offset - pinch) / self.rod_length))
    }
}

/// Component of the actuator force along the rod, `F_R = F_HA·sin θ`.
pub fn rod_force(actuator_force: f64, theta: f64) -> f64 {
    actuator_force * num::sin(theta)
}

/// Force felt at the finger from both rods, `F_s = 2·F_R·sin θ`.
pub fn user_force(actuator_force: f64, theta: f64) -> f64 {
    2.0 * rod_force(actuator_force, theta) * num::sin(theta)
}

/// Everything needed for the full pinch-to-finger static map. Left and right
/// sides are identical.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeviceConfig {
    pub mechanism: MechanismGeometry,
    pub stack: StackConfig,
    pub actuator: ActuatorGeometry,
    pub calibration: CalibrationParams,
}

impl DeviceConfig {
    pub fn validate(&self) -> Result<()> {
        self.mechanism.validate()?;
        self.stack.validate()?;
        self.actuator.validate()?;
        self.calibration.validate()
    }

    /// Largest pinch displacement for which the map is defined.
    pub fn pinch_limit(&self) -> f64 {
        self.mechanism.max_pinch_stroke
    }
}

/// Stage-by-stage values of one evaluation of the device map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticBreakdown {
    pub plate_displacement: f64,
    /// Preload plus plate displacement, mm.
    pub stack_displacement: f64,
    pub actuator_force: f64,
    pub rod_angle: f64,
    pub user_force: f64,
}

/// Force felt by the user at pinch displacement `pinch` (mm) and drive `u` (kV).
pub fn device_static_force(dev: &DeviceConfig, pinch: f64, u: f64) -> Result<f64> {
    Ok(device_static_breakdown(dev, pinch, u)?.user_force)
}

pub fn device_static_breakdown(dev: &DeviceConfig, pinch: f64, u: f64) -> Result<StaticBreakdown> {
    let plate = dev
        .mechanism
        .plate_displacement(pinch)
        .map_err(Error::at_stage(DeviceStage::PlateDisplacement))?;
    let stack_displacement = dev.stack.preload_displacement + plate;
    let actuator_force = stack_force(
        &dev.stack,
        &dev.actuator,
        &dev.calibration,
        stack_displacement,
        u,
    )
    .map_err(Error::at_stage(DeviceStage::ActuatorStack))?;
    let theta = dev
        .mechanism
        .rod_angle(pinch)
        .map_err(Error::at_stage(DeviceStage::RodAngle))?;
    Ok(StaticBreakdown {
        plate_displacement: plate,
        stack_displacement,
        actuator_force,
        rod_angle: theta,
        user_force: user_force(actuator_force, theta),
    })
}

/// Device force per kV² at `pinch`; the map is exactly quadratic in `u`.
pub fn device_force_coefficient(dev: &DeviceConfig, pinch: f64) -> Result<f64> {
    device_static_force(dev, pinch, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuator::DisplacementConvention;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    #[test]
    fn plate_displacement_values() {
        let g = MechanismGeometry::default();
        // √1125 − √1000
        assert!((g.plate_displacement(5.0).unwrap() - 1.918_243_061).abs() < 1e-6);
        assert_eq!(g.plate_displacement(0.0).unwrap(), 0.0);
        // 35 − √1000
        assert!((g.plate_displacement(15.0).unwrap() - 3.377_223_4).abs() < 1e-6);
        assert!(matches!(
            g.plate_displacement(15.01),
            Err(Error::PinchOutOfDomain { .. })
        ));
        assert!(g.plate_displacement(-0.1).is_err());
    }

    #[test]
    fn rod_angle_values() {
        let g = MechanismGeometry::default();
        let t = g.rod_angle(5.0).unwrap();
        assert!((t - 0.289_751_701).abs() < 1e-6);
        assert!((t.to_degrees() - 16.6015).abs() < 1e-3);
        assert_eq!(g.rod_angle(15.0).unwrap(), 0.0);
        let half = MechanismGeometry {
            rod_length: 30.0,
            ..g
        };
        assert!((half.rod_angle(0.0).unwrap() - FRAC_PI_6).abs() < 1e-15);
    }

    #[test]
    fn geometry_invariants() {
        let bad = MechanismGeometry {
            vertical_offset: 40.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MechanismGeometry {
            max_pinch_stroke: 16.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn force_projection() {
        assert!((rod_force(1.0, FRAC_PI_6) - 0.5).abs() < 1e-15);
        assert_eq!(rod_force(3.0, 0.0), 0.0);
        assert_eq!(rod_force(2.0, FRAC_PI_2), 2.0);
        assert!((user_force(1.0, FRAC_PI_6) - 0.5).abs() < 1e-15);
        assert_eq!(user_force(1.0, 0.0), 0.0);
        assert_eq!(user_force(1.0, FRAC_PI_2), 2.0);
    }

    #[test]
    fn device_zero_cases() {
        let dev = DeviceConfig {
            stack: StackConfig {
                preload_displacement: 0.0,
                ..Default::default()
            },
            ..Default::default()
        };
        assert_eq!(device_static_force(&dev, 0.0, 6.0).unwrap(), 0.0);
        let dev = DeviceConfig::default();
        assert_eq!(device_static_force(&dev, 3.0, 0.0).unwrap(), 0.0);
        assert!(device_static_force(&dev, 0.0, 6.0).unwrap() > 0.0);
    }

    #[test]
    fn device_reports_failing_stage() {
        // Total-as-Δh collapses the bladder around 5 mm of pinch.
        let dev = DeviceConfig::default();
        match device_static_force(&dev, 10.0, 6.0) {
            Err(Error::Stage {
                stage: DeviceStage::ActuatorStack,
                source,
            }) => assert!(matches!(*source, Error::SqueezeOutOfDomain { .. })),
            other => panic!("{other:?}"),
        }
        match device_static_force(&dev, 16.0, 6.0) {
            Err(Error::Stage {
                stage: DeviceStage::PlateDisplacement,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
        let shared = DeviceConfig {
            stack: StackConfig {
                convention: DisplacementConvention::PerActuatorShare,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(device_static_force(&shared, 10.0, 6.0).is_ok());
    }
}
