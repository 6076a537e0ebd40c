//! JSON experiment configuration.
//!
//! Every section and field is optional; absent values take the defaults
//! below. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use ehsim_core::actuator::{
    ActuatorGeometry, CalibrationParams, DielectricParams, DisplacementConvention, StackConfig,
};
use ehsim_core::dynamics::{Integrator, PiGains, PlantParams, TargetShape, TargetWave};
use ehsim_core::mechanism::{device_static_force, DeviceConfig, MechanismGeometry};
use ehsim_core::teleop::{
    ChannelModel, MasterParams, OperatorProfile, SessionConfig, SlaveParams, VirtualObject,
};
use ehsim_core::units::VACUUM_PERMITTIVITY;
use ehsim_core::waveform::{CompositeWaveform, SineOverlay, SquareWaveSpec};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "EHSIM_CONFIG";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub actuator: ActuatorSection,
    pub mechanism: MechanismSection,
    pub plant: PlantSection,
    pub controller: ControllerSection,
    pub waveform: WaveformSection,
    pub teleop: TeleopSection,
    /// Seeds channel jitter.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    TotalAsDeltaH,
    PerActuatorShare,
}

impl From<Convention> for DisplacementConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::TotalAsDeltaH => DisplacementConvention::TotalAsDeltaH,
            Convention::PerActuatorShare => DisplacementConvention::PerActuatorShare,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActuatorSection {
    /// mm³.
    pub oil_volume: f64,
    pub bladder_width: f64,
    pub bladder_length: f64,
    /// N·mm⁻²·kV⁻².
    pub mixing_parameter: f64,
    /// kV. Also the drive level of the force-curve and max-force sweeps.
    pub calibration_voltage: f64,
    pub actuator_count: u32,
    pub convention: Convention,
    pub preload_displacement: f64,
    /// Convention used by the full-stroke max-force sweep.
    pub stroke_convention: Convention,
    /// Upper end of the force-curve displacement sweep, mm.
    pub curve_max_displacement: f64,
    pub curve_points: usize,
    pub dielectric: DielectricSection,
}

impl Default for ActuatorSection {
    fn default() -> Self {
        let g = ActuatorGeometry::default();
        let c = CalibrationParams::default();
        let s = StackConfig::default();
        Self {
            oil_volume: g.oil_volume,
            bladder_width: g.bladder_width,
            bladder_length: g.bladder_length,
            mixing_parameter: c.mixing_parameter,
            calibration_voltage: c.calibration_voltage,
            actuator_count: s.actuator_count,
            convention: Convention::TotalAsDeltaH,
            preload_displacement: s.preload_displacement,
            stroke_convention: Convention::PerActuatorShare,
            curve_max_displacement: 0.5,
            curve_points: 101,
            dielectric: DielectricSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DielectricSection {
    /// F/m.
    pub vacuum_permittivity: f64,
    pub relative_permittivity: f64,
    /// mm².
    pub overlap_area: Option<f64>,
    /// mm.
    pub thickness: Option<f64>,
}

impl Default for DielectricSection {
    fn default() -> Self {
        Self {
            vacuum_permittivity: VACUUM_PERMITTIVITY,
            relative_permittivity: DielectricParams::default().relative_permittivity,
            overlap_area: None,
            thickness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MechanismSection {
    pub rod_length: f64,
    pub vertical_offset: f64,
    pub max_pinch_stroke: f64,
    /// Pinch held during step-response, track and vibrate runs, mm.
    pub operating_displacement: f64,
    /// Pinch increment of the max-force sweep, mm.
    pub sweep_step: f64,
}

impl Default for MechanismSection {
    fn default() -> Self {
        let m = MechanismGeometry::default();
        Self {
            rod_length: m.rod_length,
            vertical_offset: m.vertical_offset,
            max_pinch_stroke: m.max_pinch_stroke,
            operating_displacement: 3.0,
            sweep_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorChoice {
    Exact,
    ForwardEuler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantSection {
    /// ms.
    pub time_constant: f64,
    /// ms.
    pub sample_period: f64,
    pub integrator: IntegratorChoice,
    /// Open-loop step of the step-response run, kV.
    pub step_voltage: f64,
}

impl Default for PlantSection {
    fn default() -> Self {
        let p = PlantParams::default();
        Self {
            time_constant: p.time_constant,
            sample_period: p.sample_period,
            integrator: IntegratorChoice::Exact,
            step_voltage: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Sine,
    Square,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TargetSection {
    pub shape: Shape,
    pub frequency: f64,
    pub amplitude: f64,
    pub offset: f64,
}

impl Default for TargetSection {
    fn default() -> Self {
        let t = TargetWave::default();
        Self {
            shape: Shape::Sine,
            frequency: t.frequency,
            amplitude: t.amplitude,
            offset: t.offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub kp: f64,
    pub ki: f64,
    pub output_min: f64,
    pub output_max: f64,
    pub target: TargetSection,
    /// Settling band as a fraction of each target step.
    pub settling_band: f64,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let g = PiGains::default();
        Self {
            kp: g.kp,
            ki: g.ki,
            output_min: g.output_min,
            output_max: g.output_max,
            target: TargetSection::default(),
            settling_band: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SquareSection {
    pub frequency: f64,
    pub amplitude: f64,
    /// kV/ms; `null` selects ideal edges.
    pub slew_rate: Option<f64>,
}

impl Default for SquareSection {
    fn default() -> Self {
        let s = SquareWaveSpec::default();
        Self {
            frequency: s.frequency,
            amplitude: s.amplitude,
            slew_rate: Some(s.slew_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverlaySection {
    pub frequency: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Default for OverlaySection {
    fn default() -> Self {
        Self {
            frequency: 5.0,
            amplitude: 2.5,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformSection {
    pub square: SquareSection,
    /// `null` drives the square wave alone.
    pub overlay: Option<OverlaySection>,
    pub breakdown_limit: f64,
    /// Hz band searched for ripple.
    pub ripple_band: [f64; 2],
}

impl Default for WaveformSection {
    fn default() -> Self {
        Self {
            square: SquareSection::default(),
            overlay: Some(OverlaySection::default()),
            breakdown_limit: CompositeWaveform::default().breakdown_limit,
            ripple_band: [1.0, 100.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MasterSection {
    pub stale_timeout: f64,
    pub contact_threshold: f64,
}

impl Default for MasterSection {
    fn default() -> Self {
        let m = MasterParams::default();
        Self {
            stale_timeout: m.stale_timeout,
            contact_threshold: m.contact_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlaveSection {
    pub max_speed: f64,
    pub position_step: f64,
    pub contact_threshold: f64,
}

impl Default for SlaveSection {
    fn default() -> Self {
        let s = SlaveParams::default();
        Self {
            max_speed: s.max_speed,
            position_step: s.position_step,
            contact_threshold: s.contact_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub base_latency: f64,
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectSection {
    pub label: String,
    pub contact_position: f64,
    pub stiffness: f64,
    pub cubic_stiffness: f64,
}

impl From<&VirtualObject> for ObjectSection {
    fn from(o: &VirtualObject) -> Self {
        Self {
            label: o.label.clone(),
            contact_position: o.contact_position,
            stiffness: o.stiffness,
            cubic_stiffness: o.cubic_stiffness,
        }
    }
}

impl Default for ObjectSection {
    fn default() -> Self {
        Self::from(&VirtualObject::default())
    }
}

impl ObjectSection {
    pub fn to_object(&self) -> VirtualObject {
        VirtualObject::new(
            &self.label,
            self.contact_position,
            self.stiffness,
            self.cubic_stiffness,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TeleopSection {
    pub master: MasterSection,
    pub slave: SlaveSection,
    pub channel: ChannelSection,
    /// Object grasped by the networked slave.
    pub object: ObjectSection,
    /// Objects grasped in turn by the demo.
    pub demo_objects: Vec<ObjectSection>,
    /// Operator pinch keyframes, `[t_ms, displacement_mm]`.
    pub profile: Vec<[f64; 2]>,
    /// Window at the end of a session averaged for steady forces, ms.
    pub hold_window: f64,
}

impl Default for TeleopSection {
    fn default() -> Self {
        Self {
            master: MasterSection::default(),
            slave: SlaveSection::default(),
            channel: ChannelSection::default(),
            object: ObjectSection::default(),
            demo_objects: ehsim_core::teleop::demo_objects()
                .iter()
                .map(ObjectSection::from)
                .collect(),
            profile: vec![[100.0, 0.0], [1100.0, 4.0]],
            hold_window: 500.0,
        }
    }
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Prefixes the offending parameter of a model error with its section.
fn in_section<T>(section: &str, r: ehsim_core::Result<T>) -> Result<T, ConfigError> {
    use ehsim_core::Error as E;
    r.map_err(|e| {
        let name = match &e {
            E::InvalidParameter { name, .. } | E::MissingParameter { name } => Some(*name),
            _ => None,
        };
        match name {
            Some(n) => invalid(format!("{section}.{n}"), e.to_string()),
            None => invalid(section, e.to_string()),
        }
    })
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn actuator_geometry(&self) -> ActuatorGeometry {
        let a = &self.actuator;
        ActuatorGeometry {
            oil_volume: a.oil_volume,
            bladder_width: a.bladder_width,
            bladder_length: a.bladder_length,
        }
    }

    pub fn calibration(&self) -> CalibrationParams {
        CalibrationParams {
            mixing_parameter: self.actuator.mixing_parameter,
            calibration_voltage: self.actuator.calibration_voltage,
        }
    }

    pub fn stack(&self) -> StackConfig {
        StackConfig {
            actuator_count: self.actuator.actuator_count,
            convention: self.actuator.convention.into(),
            preload_displacement: self.actuator.preload_displacement,
        }
    }

    pub fn dielectric(&self) -> DielectricParams {
        let d = &self.actuator.dielectric;
        DielectricParams {
            vacuum_permittivity: d.vacuum_permittivity,
            relative_permittivity: d.relative_permittivity,
            overlap_area: d.overlap_area,
            thickness: d.thickness,
        }
    }

    pub fn mechanism_geometry(&self) -> MechanismGeometry {
        let m = &self.mechanism;
        MechanismGeometry {
            rod_length: m.rod_length,
            vertical_offset: m.vertical_offset,
            max_pinch_stroke: m.max_pinch_stroke,
        }
    }

    /// Device used at the operating displacement.
    pub fn device(&self) -> DeviceConfig {
        DeviceConfig {
            mechanism: self.mechanism_geometry(),
            stack: self.stack(),
            actuator: self.actuator_geometry(),
            calibration: self.calibration(),
        }
    }

    /// Device used for the full-stroke sweep.
    pub fn stroke_device(&self) -> DeviceConfig {
        let mut d = self.device();
        d.stack.convention = self.actuator.stroke_convention.into();
        d
    }

    pub fn plant(&self) -> PlantParams {
        PlantParams {
            time_constant: self.plant.time_constant,
            sample_period: self.plant.sample_period,
            integrator: match self.plant.integrator {
                IntegratorChoice::Exact => Integrator::Exact,
                IntegratorChoice::ForwardEuler => Integrator::ForwardEuler,
            },
        }
    }

    pub fn gains(&self) -> PiGains {
        let c = &self.controller;
        PiGains {
            kp: c.kp,
            ki: c.ki,
            output_min: c.output_min,
            output_max: c.output_max,
        }
    }

    pub fn target(&self) -> TargetWave {
        let t = &self.controller.target;
        TargetWave {
            shape: match t.shape {
                Shape::Sine => TargetShape::Sine,
                Shape::Square => TargetShape::Square,
                Shape::Triangle => TargetShape::Triangle,
            },
            frequency: t.frequency,
            amplitude: t.amplitude,
            offset: t.offset,
        }
    }

    pub fn waveform(&self) -> CompositeWaveform {
        let w = &self.waveform;
        CompositeWaveform {
            square: SquareWaveSpec {
                frequency: w.square.frequency,
                amplitude: w.square.amplitude,
                slew_rate: w.square.slew_rate.unwrap_or(f64::INFINITY),
            },
            overlay: w.overlay.as_ref().map(|o| SineOverlay {
                frequency: o.frequency,
                amplitude: o.amplitude,
                phase: o.phase,
            }),
            breakdown_limit: w.breakdown_limit,
        }
    }

    pub fn ripple_band(&self) -> (f64, f64) {
        (self.waveform.ripple_band[0], self.waveform.ripple_band[1])
    }

    pub fn session(&self, object: VirtualObject) -> SessionConfig {
        let t = &self.teleop;
        SessionConfig {
            device: self.device(),
            plant: self.plant(),
            gains: self.gains(),
            master: MasterParams {
                stale_timeout: t.master.stale_timeout,
                contact_threshold: t.master.contact_threshold,
            },
            slave: SlaveParams {
                max_speed: t.slave.max_speed,
                position_step: t.slave.position_step,
                contact_threshold: t.slave.contact_threshold,
            },
            object,
            channel: ChannelModel {
                base_latency: t.channel.base_latency,
                jitter: t.channel.jitter,
            },
            seed: self.seed,
        }
    }

    pub fn profile(&self) -> OperatorProfile {
        OperatorProfile {
            keyframes: self.teleop.profile.iter().map(|k| (k[0], k[1])).collect(),
        }
    }

    /// Checks every section invariant. Errors name the offending field as
    /// `section.field`.
    pub fn validate(&self) -> Result<(), ConfigError> {
        in_section("actuator", self.actuator_geometry().validate())?;
        in_section("actuator", self.calibration().validate())?;
        in_section("actuator", self.stack().validate())?;
        in_section("actuator.dielectric", self.dielectric().validate())?;
        positive(
            "actuator.curve_max_displacement",
            self.actuator.curve_max_displacement,
        )?;
        if self.actuator.curve_points < 2 {
            return Err(invalid("actuator.curve_points", "need at least 2 points"));
        }

        in_section("mechanism", self.mechanism_geometry().validate())?;
        positive("mechanism.sweep_step", self.mechanism.sweep_step)?;
        let op = self.mechanism.operating_displacement;
        if !(op >= 0.0 && op <= self.mechanism.max_pinch_stroke) {
            return Err(invalid(
                "mechanism.operating_displacement",
                format!("{op} mm outside the pinch stroke"),
            ));
        }
        if let Err(e) = device_static_force(&self.device(), op, 1.0) {
            return Err(invalid("mechanism.operating_displacement", e.to_string()));
        }

        in_section("plant", self.plant().validate())?;
        if !self.plant.step_voltage.is_finite() {
            return Err(invalid("plant.step_voltage", "must be finite"));
        }

        in_section("controller", self.gains().validate())?;
        in_section("controller", self.target().validate())?;
        let band = self.controller.settling_band;
        if !(band > 0.0 && band < 1.0) {
            return Err(invalid("controller.settling_band", "must lie in (0, 1)"));
        }

        in_section("waveform", self.waveform().validate_parameters())?;
        let (lo, hi) = self.ripple_band();
        positive("waveform.ripple_band", lo)?;
        if !(hi > lo) || !hi.is_finite() {
            return Err(invalid("waveform.ripple_band", "upper edge must exceed lower"));
        }

        let t = &self.teleop;
        positive("teleop.master.stale_timeout", t.master.stale_timeout)?;
        if !(t.master.contact_threshold >= 0.0) || !t.master.contact_threshold.is_finite() {
            return Err(invalid("teleop.master.contact_threshold", "must be >= 0"));
        }
        let session = self.session(t.object.to_object());
        in_section("teleop.slave", session.slave.validate())?;
        in_section("teleop.channel", session.channel.validate())?;
        in_section("teleop.object", session.object.validate())?;
        for (i, o) in t.demo_objects.iter().enumerate() {
            in_section(&format!("teleop.demo_objects[{i}]"), o.to_object().validate())?;
        }
        in_section("teleop", OperatorProfile::new(self.profile().keyframes).map(|_| ()))?;
        positive("teleop.hold_window", t.hold_window)?;
        Ok(())
    }

    /// Parses and validates JSON text.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::from_json(&text)
}

/// Picks the config path: an explicit `--config`, else `EHSIM_CONFIG`. With
/// neither, defaults apply.
pub fn resolve_config_path(cli: Option<&Path>) -> Option<PathBuf> {
    cli.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(CONFIG_ENV)
            .filter(|p| !p.is_empty())
            .map(PathBuf::from)
    })
}

/// Loads the config selected by [`resolve_config_path`].
pub fn load_selected(cli: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
    match resolve_config_path(cli) {
        Some(p) => load_config(&p),
        None => Ok(ExperimentConfig::default()),
    }
}
