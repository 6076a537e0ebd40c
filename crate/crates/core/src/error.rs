use alloc::boxed::Box;
use core::fmt;

/// Which stage of the composed device map rejected its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceStage {
    PlateDisplacement,
    ActuatorStack,
    RodAngle,
}

impl fmt::Display for DeviceStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceStage::PlateDisplacement => "plate displacement",
            DeviceStage::ActuatorStack => "actuator stack",
            DeviceStage::RodAngle => "rod angle",
        })
    }
}

/// Decoding failures for the 28-byte teleoperation frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameError {
    BadLength(usize),
    BadMagic(u8),
    BadType(u8),
    /// Payload field (`"payload_a"` or `"payload_b"`) is NaN or infinite.
    NonFinite(&'static str),
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::BadLength(n) => write!(f, "frame must be 28 bytes, got {n}"),
            FrameError::BadMagic(b) => write!(f, "bad magic byte 0x{b:02x}"),
            FrameError::BadType(b) => write!(f, "unknown message type 0x{b:02x}"),
            FrameError::NonFinite(field) => write!(f, "{field} is not finite"),
        }
    }
}

impl core::error::Error for FrameError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its invariant.
    InvalidParameter { name: &'static str, value: f64 },
    MissingParameter { name: &'static str },
    /// Squeeze displacement outside `[0, h)`.
    SqueezeOutOfDomain { delta_h: f64, half_height: f64 },
    /// Pinch displacement outside `[0, L_mech]`.
    PinchOutOfDomain { pinch: f64, max: f64 },
    /// Every calibration point has zero squeezed area.
    DegenerateCalibration,
    Stage { stage: DeviceStage, source: Box<Error> },
    BreakdownRisk { peak: f64, limit: f64 },
    /// Target force exceeds what the device produces at maximum voltage.
    Unreachable { target: f64, capability: f64 },
    MalformedTrace(&'static str),
    InsufficientData { needed_ms: f64, available_ms: f64 },
    Frame(FrameError),
    Session { tick: u64, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64) -> Self {
        Error::InvalidParameter { name, value }
    }

    pub(crate) fn at_stage(stage: DeviceStage) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage { stage, source: Box::new(e) }
    }

    /// Short stable identifier, used for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::MissingParameter { .. } => "missing-parameter",
            Error::SqueezeOutOfDomain { .. } => "squeeze-domain",
            Error::PinchOutOfDomain { .. } => "pinch-domain",
            Error::DegenerateCalibration => "degenerate-calibration",
            Error::Stage { source, .. } => source.kind(),
            Error::BreakdownRisk { .. } => "breakdown-risk",
            Error::Unreachable { .. } => "unreachable-target",
            Error::MalformedTrace(_) => "malformed-trace",
            Error::InsufficientData { .. } => "insufficient-data",
            Error::Frame(_) => "frame",
            Error::Session { source, .. } => source.kind(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::MissingParameter { name } => write!(f, "missing parameter {name}"),
            Error::SqueezeOutOfDomain { delta_h, half_height } => write!(
                f,
                "squeeze displacement {delta_h} mm outside [0, {half_height}) mm"
            ),
            Error::PinchOutOfDomain { pinch, max } => {
                write!(f, "pinch displacement {pinch} mm outside [0, {max}] mm")
            }
            Error::DegenerateCalibration => {
                f.write_str("calibration points have zero squeezed area")
            }
            Error::Stage { stage, source } => write!(f, "{stage}: {source}"),
            Error::BreakdownRisk { peak, limit } => {
                write!(f, "peak drive {peak} kV exceeds breakdown limit {limit} kV")
            }
            Error::Unreachable { target, capability } => write!(
                f,
                "target {target} N exceeds device capability {capability} N at maximum voltage"
            ),
            Error::MalformedTrace(why) => write!(f, "malformed trace: {why}"),
            Error::InsufficientData { needed_ms, available_ms } => write!(
                f,
                "trace covers {available_ms} ms, analysis needs at least {needed_ms} ms"
            ),
            Error::Frame(e) => write!(f, "frame: {e}"),
            Error::Session { tick, source } => write!(f, "tick {tick}: {source}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<FrameError> for Error {
    fn from(e: FrameError) -> Self {
        Error::Frame(e)
    }
}
