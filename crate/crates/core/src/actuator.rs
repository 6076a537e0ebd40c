//! Static force model of one electrohydraulic bladder and of series stacks.
//!
//! An activated bladder holds its dielectric oil in a rhombic cross-section of
//! half-height `h = V / (2xL)` whose inner walls meet the zipped electrodes at
//! the wedge angle `α = atan(2h / x)`. Squeezing the bladder by `Δh` pushes the
//! incompressible oil sideways by `Δx`, exposing the squeezed surface `S_HA`.
//! The oil pressure `P = K·u²` acting on both faces of that surface gives the
//! vertical feedback force `F_HA = 2·P·S_HA`.
//!
//! All lengths are mm, voltages kV, forces N and pressures N/mm².

use crate::num;
use crate::units::VACUUM_PERMITTIVITY;
use crate::{Error, Result};

/// Bladder dimensions of one actuator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorGeometry {
    /// Dielectric oil volume, mm³.
    pub oil_volume: f64,
    /// Width of one side of the bladder, mm.
    pub bladder_width: f64,
    /// Bladder length, mm.
    pub bladder_length: f64,
}

impl Default for ActuatorGeometry {
    fn default() -> Self {
        Self {
            oil_volume: 2500.0,
            bladder_width: 12.5,
            bladder_length: 50.0,
        }
    }
}

impl ActuatorGeometry {
    pub fn new(oil_volume: f64, bladder_width: f64, bladder_length: f64) -> Result<Self> {
        let g = Self {
            oil_volume,
            bladder_width,
            bladder_length,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        positive("oil_volume", self.oil_volume)?;
        positive("bladder_width", self.bladder_width)?;
        positive("bladder_length", self.bladder_length)?;
        Ok(())
    }

    /// Half the height of the expanded bladder, `h = V / (2xL)`.
    pub fn half_height(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.oil_volume / (2.0 * self.bladder_width * self.bladder_length))
    }

    /// Wedge angle `α = atan(2h / x)` in radians.
    pub fn wedge_angle(&self) -> Result<f64> {
        Ok(num::atan(self.tan_wedge()?))
    }

    // tan α taken straight from the ratio so ΔS1 and ΔS2 share one value.
    fn tan_wedge(&self) -> Result<f64> {
        Ok(2.0 * self.half_height()? / self.bladder_width)
    }

    fn check_squeeze(&self, delta_h: f64) -> Result<f64> {
        let h = self.half_height()?;
        if !(delta_h >= 0.0 && delta_h < h) {
            return Err(Error::SqueezeOutOfDomain {
                delta_h,
                half_height: h,
            });
        }
        Ok(h)
    }

    /// Lateral advance `Δx` of the oil front that keeps the cross-section
    /// area constant when the bladder is squeezed by `delta_h`.
    pub fn lateral_advance(&self, delta_h: f64) -> Result<f64> {
        let h = self.check_squeeze(delta_h)?;
        let tan_a = self.tan_wedge()?;
        Ok(delta_h * delta_h / (tan_a * (h - delta_h)))
    }

    /// All intermediate squeeze quantities for `delta_h`.
    pub fn squeeze_state(&self, delta_h: f64) -> Result<SqueezeState> {
        let h = self.check_squeeze(delta_h)?;
        let tan_a = self.tan_wedge()?;
        let delta_x = self.lateral_advance(delta_h)?;
        Ok(SqueezeState {
            delta_h,
            delta_x,
            area_lost: delta_h * delta_h / tan_a,
            area_gained: delta_x * (h - delta_h),
            squeezed_area: (2.0 * delta_h / tan_a + delta_x) * self.bladder_length,
        })
    }

    /// Squeezed surface area `S_HA`, mm².
    pub fn squeezed_area(&self, delta_h: f64) -> Result<f64> {
        Ok(self.squeeze_state(delta_h)?.squeezed_area)
    }
}

/// Intermediate quantities of a squeezed bladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeState {
    pub delta_h: f64,
    pub delta_x: f64,
    /// Cross-section area removed vertically, mm².
    pub area_lost: f64,
    /// Cross-section area added horizontally, mm².
    pub area_gained: f64,
    pub squeezed_area: f64,
}

/// Parallel-plate parameters of the electrode overlap.
///
/// The residual oil thickness between the zipped electrodes is not measurable
/// in practice, so the force pipeline uses the lumped [`CalibrationParams`]
/// instead. These parameters are kept for the explicit electrostatic force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DielectricParams {
    /// F/m.
    pub vacuum_permittivity: f64,
    pub relative_permittivity: f64,
    /// Electrode overlap area, mm².
    pub overlap_area: Option<f64>,
    /// Dielectric thickness, mm.
    pub thickness: Option<f64>,
}

impl Default for DielectricParams {
    fn default() -> Self {
        Self {
            vacuum_permittivity: VACUUM_PERMITTIVITY,
            relative_permittivity: 3.4,
            overlap_area: None,
            thickness: None,
        }
    }
}

impl DielectricParams {
    pub fn validate(&self) -> Result<()> {
        positive("vacuum_permittivity", self.vacuum_permittivity)?;
        if !(self.relative_permittivity >= 1.0) {
            return Err(Error::invalid(
                "relative_permittivity",
                self.relative_permittivity,
            ));
        }
        if let Some(a) = self.overlap_area {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::invalid("overlap_area", a));
            }
        }
        if let Some(d) = self.thickness {
            positive("thickness", d)?;
        }
        Ok(())
    }

    fn thickness(&self) -> Result<f64> {
        self.thickness.ok_or(Error::MissingParameter { name: "thickness" })
    }

    /// Electrostatic adhesion force `½·εr·ε0·A·u²/d²` in N for `u` in kV.
    pub fn maxwell_force(&self, u: f64) -> Result<f64> {
        self.validate()?;
        let area = self.overlap_area.ok_or(Error::MissingParameter {
            name: "overlap_area",
        })?;
        let d = self.thickness()?;
        let volts = u * crate::units::V_PER_KV;
        // A and d both in mm, so A/d² is dimensionless.
        Ok(0.5 * self.relative_permittivity * self.vacuum_permittivity * area * volts * volts
            / (d * d))
    }

    /// The mixing parameter these parameters imply, N·mm⁻²·kV⁻².
    pub fn mixing_parameter(&self) -> Result<f64> {
        self.validate()?;
        let d = crate::units::mm_to_metres(self.thickness()?);
        let k_si = 0.5 * self.relative_permittivity * self.vacuum_permittivity / (d * d);
        Ok(crate::units::mixing_parameter_from_si(k_si))
    }
}

/// Free function form of [`DielectricParams::maxwell_force`].
pub fn maxwell_force_explicit(diel: &DielectricParams, u: f64) -> Result<f64> {
    diel.maxwell_force(u)
}

/// Lumped pressure coefficient and the voltage it was fitted at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationParams {
    /// `K`, N·mm⁻²·kV⁻².
    pub mixing_parameter: f64,
    /// kV.
    pub calibration_voltage: f64,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        Self {
            mixing_parameter: crate::fixtures::REPORTED_MIXING_PARAMETER,
            calibration_voltage: 6.0,
        }
    }
}

impl CalibrationParams {
    pub fn validate(&self) -> Result<()> {
        positive("mixing_parameter", self.mixing_parameter)?;
        positive("calibration_voltage", self.calibration_voltage)
    }

    /// Oil pressure `P = K·u²`, N/mm².
    pub fn pressure(&self, u: f64) -> f64 {
        self.mixing_parameter * u * u
    }
}

pub fn maxwell_pressure(cal: &CalibrationParams, u: f64) -> f64 {
    cal.pressure(u)
}

/// Feedback force `F_HA = 2·P·S_HA` of one actuator squeezed by `delta_h`.
pub fn single_actuator_force(
    geom: &ActuatorGeometry,
    cal: &CalibrationParams,
    delta_h: f64,
    u: f64,
) -> Result<f64> {
    let area = geom.squeezed_area(delta_h)?;
    Ok(2.0 * cal.pressure(u) * area)
}

/// How a measured stack displacement maps onto one bladder's `Δh`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisplacementConvention {
    /// The whole displacement is the squeeze of the modelled bladder.
    #[default]
    TotalAsDeltaH,
    /// The displacement is shared equally by every actuator in the stack.
    PerActuatorShare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackConfig {
    pub actuator_count: u32,
    pub convention: DisplacementConvention,
    /// Squeeze already present before any external displacement, mm.
    pub preload_displacement: f64,
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            actuator_count: 30,
            convention: DisplacementConvention::TotalAsDeltaH,
            preload_displacement: 0.05,
        }
    }
}

impl StackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.actuator_count == 0 {
            return Err(Error::invalid("actuator_count", 0.0));
        }
        if !(self.preload_displacement >= 0.0) || !self.preload_displacement.is_finite() {
            return Err(Error::invalid(
                "preload_displacement",
                self.preload_displacement,
            ));
        }
        Ok(())
    }

    /// Per-bladder squeeze for a total stack displacement.
    pub fn effective_delta_h(&self, displacement: f64) -> Result<f64> {
        self.validate()?;
        if !(displacement >= 0.0) {
            return Err(Error::invalid("displacement", displacement));
        }
        Ok(match self.convention {
            DisplacementConvention::TotalAsDeltaH => displacement,
            DisplacementConvention::PerActuatorShare => {
                displacement / f64::from(self.actuator_count)
            }
        })
    }
}

/// Force transmitted by a series stack compressed by `displacement`.
///
/// Series actuators carry one common force, so this is the single-actuator
/// force at the stack's effective `Δh`. Preload is not added here.
pub fn stack_force(
    stack: &StackConfig,
    geom: &ActuatorGeometry,
    cal: &CalibrationParams,
    displacement: f64,
    u: f64,
) -> Result<f64> {
    let delta_h = stack.effective_delta_h(displacement)?;
    single_actuator_force(geom, cal, delta_h, u)
}

/// Least-squares fit of `K` to `(displacement, force)` points measured at
/// `u_cal`.
///
/// The model is linear in `K`, `F = 2·K·u²·S`, so the minimiser of the squared
/// residuals is `K = Σ F·S / (2·u²·Σ S²)`. The stack's preload is ignored:
/// the points are absolute squeeze displacements.
pub fn calibrate_k(
    points: &[(f64, f64)],
    u_cal: f64,
    geom: &ActuatorGeometry,
    stack: &StackConfig,
) -> Result<CalibrationParams> {
    positive("calibration_voltage", u_cal)?;
    if points.is_empty() {
        return Err(Error::MissingParameter {
            name: "calibration points",
        });
    }
    let mut fs = 0.0;
    let mut ss = 0.0;
    for &(d, f) in points {
        if !f.is_finite() {
            return Err(Error::invalid("force", f));
        }
        let s = geom.squeezed_area(stack.effective_delta_h(d)?)?;
        fs += f * s;
        ss += s * s;
    }
    if ss == 0.0 {
        return Err(Error::DegenerateCalibration);
    }
    Ok(CalibrationParams {
        mixing_parameter: fs / (2.0 * u_cal * u_cal * ss),
        calibration_voltage: u_cal,
    })
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, value))
    }
}
