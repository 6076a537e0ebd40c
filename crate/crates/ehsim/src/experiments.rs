//! Named experiment runners.
//!
//! Each runner produces its CSV files and a JSON summary in memory;
//! [`Outcome::write_to`] puts them on disk.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ehsim_core::actuator::{calibrate_k, stack_force, StackConfig};
use ehsim_core::dynamics::{
    measure_rise_time, ripple_analysis, rms_error, settling_times, simulate_step_response,
    simulate_tracking, simulate_vibration, static_force_map, SimTrace, TargetShape,
    STEADY_STATE_DISCARD,
};
use ehsim_core::fixtures::{
    REPORTED_MAX_FORCE_RANGE, REPORTED_MIXING_PARAMETER, REPORTED_RESPONSE_TIME_MS,
    SQUEEZE_FORCE_AVERAGES, SQUEEZE_FORCE_STACK_SIZE, SQUEEZE_FORCE_TABLE,
};
use ehsim_core::mechanism::device_static_breakdown;
use ehsim_core::teleop::{run_session, SessionTrace};
use ehsim_core::waveform::validate_waveform;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::trace::{session_to_bytes, trace_to_bytes, write_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Calibrate,
    ForceCurve,
    MaxForce,
    StepResponse,
    Track,
    Vibrate,
    TeleopDemo,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Calibrate,
        Experiment::ForceCurve,
        Experiment::MaxForce,
        Experiment::StepResponse,
        Experiment::Track,
        Experiment::Vibrate,
        Experiment::TeleopDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Calibrate => "calibrate",
            Experiment::ForceCurve => "force-curve",
            Experiment::MaxForce => "max-force",
            Experiment::StepResponse => "step-response",
            Experiment::Track => "track",
            Experiment::Vibrate => "vibrate",
            Experiment::TeleopDemo => "teleop-demo",
        }
    }

    /// Simulated time when `--duration` is absent, ms. Sweeps have none.
    pub fn default_duration(self) -> Option<f64> {
        match self {
            Experiment::Calibrate | Experiment::ForceCurve | Experiment::MaxForce => None,
            Experiment::StepResponse => Some(400.0),
            Experiment::Track => Some(25_000.0),
            Experiment::Vibrate => Some(10_000.0),
            Experiment::TeleopDemo => Some(4_000.0),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// ms.
    pub duration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// File stem of the summary.
    pub name: String,
    pub summary: Value,
    pub files: Vec<OutputFile>,
}

impl Outcome {
    pub fn summary_file_name(&self) -> String {
        format!("{}.summary.json", self.name)
    }

    pub fn summary_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Writes every file and the summary into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
        let mut written = Vec::new();
        for f in &self.files {
            let p = dir.join(&f.name);
            std::fs::write(&p, &f.bytes).map_err(Error::io(&p))?;
            written.push(p);
        }
        let p = dir.join(self.summary_file_name());
        std::fs::write(&p, self.summary_text()).map_err(Error::io(&p))?;
        written.push(p);
        Ok(written)
    }
}

/// Parses `name` and runs it.
pub fn run_named(name: &str, cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome> {
    run_experiment(name.parse()?, cfg, opts)
}

pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome> {
    cfg.validate()?;
    let duration = match (exp.default_duration(), opts.duration) {
        (None, Some(_)) => {
            return Err(Error::Usage(format!("{exp} is a sweep and takes no duration")))
        }
        (None, None) => 0.0,
        (Some(d), None) => d,
        (Some(_), Some(d)) if d >= 0.0 && d.is_finite() => d,
        (Some(_), Some(d)) => return Err(Error::Usage(format!("invalid duration {d}"))),
    };
    let (mut summary, files) = match exp {
        Experiment::Calibrate => calibrate(cfg)?,
        Experiment::ForceCurve => force_curve(cfg)?,
        Experiment::MaxForce => max_force(cfg)?,
        Experiment::StepResponse => step_response(cfg, duration)?,
        Experiment::Track => track(cfg, duration)?,
        Experiment::Vibrate => vibrate(cfg, duration)?,
        Experiment::TeleopDemo => teleop_demo(cfg, duration)?,
    };
    summary["experiment"] = json!(exp.name());
    summary["seed"] = json!(cfg.seed);
    summary["files"] = json!(files.iter().map(|f| f.name.as_str()).collect::<Vec<_>>());
    if exp.default_duration().is_some() {
        summary["duration_ms"] = json!(duration);
    }
    Ok(Outcome {
        name: exp.name().into(),
        summary,
        files,
    })
}

type Produced = (Value, Vec<OutputFile>);

fn table<const N: usize>(
    name: &str,
    header: &[&str; N],
    rows: impl IntoIterator<Item = [f64; N]>,
) -> Result<OutputFile> {
    let mut bytes = Vec::new();
    write_table(&mut bytes, header, rows)?;
    Ok(OutputFile {
        name: name.into(),
        bytes,
    })
}

fn trace_file(name: &str, trace: &SimTrace) -> Result<OutputFile> {
    Ok(OutputFile {
        name: name.into(),
        bytes: trace_to_bytes(trace)?,
    })
}

/// The squeeze-test stack the force table was measured on.
fn rig_stack(cfg: &ExperimentConfig) -> StackConfig {
    StackConfig {
        actuator_count: SQUEEZE_FORCE_STACK_SIZE,
        convention: cfg.actuator.convention.into(),
        preload_displacement: 0.0,
    }
}

fn calibrate(cfg: &ExperimentConfig) -> Result<Produced> {
    let ctx = "calibrate";
    let geom = cfg.actuator_geometry();
    let rig = rig_stack(cfg);
    let u = cfg.actuator.calibration_voltage;
    let fit = calibrate_k(&SQUEEZE_FORCE_AVERAGES, u, &geom, &rig).map_err(Error::model(ctx))?;
    let configured = cfg.calibration();

    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut worst: f64 = 0.0;
    for (&(d, measured), (_, readings)) in SQUEEZE_FORCE_AVERAGES.iter().zip(SQUEEZE_FORCE_TABLE) {
        let model_err = Error::model(ctx);
        let area = rig
            .effective_delta_h(d)
            .and_then(|dh| geom.squeezed_area(dh))
            .map_err(model_err)?;
        let model = stack_force(&rig, &geom, &configured, d, u).map_err(Error::model(ctx))?;
        let fitted = stack_force(&rig, &geom, &fit, d, u).map_err(Error::model(ctx))?;
        let rel = (model - measured).abs() / measured;
        worst = worst.max(rel);
        rows.push([d, area, measured, model, fitted]);
        points.push(json!({
            "displacement_mm": d,
            "readings_N": readings,
            "measured_force_N": measured,
            "model_force_N": model,
            "fitted_force_N": fitted,
            "model_relative_error": rel,
        }));
    }
    let mut summary = json!({
        "K": fit.mixing_parameter,
        "reported_K": REPORTED_MIXING_PARAMETER,
        "configured_K": configured.mixing_parameter,
        "calibration_voltage_kV": u,
        "convention": cfg.actuator.convention,
        "points": points,
        "max_model_relative_error": worst,
    });
    if cfg.actuator.dielectric.thickness.is_some() {
        let k = cfg.dielectric().mixing_parameter().map_err(Error::model(ctx))?;
        summary["dielectric_K"] = json!(k);
    }
    let file = table(
        "calibrate.csv",
        &[
            "displacement_mm",
            "squeezed_area_mm2",
            "measured_force_N",
            "model_force_N",
            "fitted_force_N",
        ],
        rows,
    )?;
    Ok((summary, vec![file]))
}

fn force_curve(cfg: &ExperimentConfig) -> Result<Produced> {
    let ctx = "force-curve";
    let geom = cfg.actuator_geometry();
    let rig = rig_stack(cfg);
    let cal = cfg.calibration();
    let u = cal.calibration_voltage;
    let n = cfg.actuator.curve_points;
    let max = cfg.actuator.curve_max_displacement;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let d = max * i as f64 / (n - 1) as f64;
        let area = rig
            .effective_delta_h(d)
            .and_then(|dh| geom.squeezed_area(dh))
            .map_err(Error::model(ctx))?;
        let f = stack_force(&rig, &geom, &cal, d, u).map_err(Error::model(ctx))?;
        rows.push([d, area, f]);
    }
    let monotone = rows.windows(2).all(|w| w[1][2] >= w[0][2]);
    let summary = json!({
        "voltage_kV": u,
        "K": cal.mixing_parameter,
        "points": n,
        "max_displacement_mm": max,
        "max_force_N": rows.last().map(|r| r[2]),
        "monotone_nondecreasing": monotone,
    });
    let file = table(
        "force-curve.csv",
        &["displacement_mm", "squeezed_area_mm2", "force_N"],
        rows,
    )?;
    Ok((summary, vec![file]))
}

fn max_force(cfg: &ExperimentConfig) -> Result<Produced> {
    let dev = cfg.stroke_device();
    let u = cfg.actuator.calibration_voltage;
    let stroke = cfg.mechanism.max_pinch_stroke;
    let n = (stroke / cfg.mechanism.sweep_step).round().max(1.0) as usize;
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let pinch = stroke * i as f64 / n as f64;
        let b = device_static_breakdown(&dev, pinch, u)
            .map_err(Error::model(format!("max-force at {pinch} mm")))?;
        rows.push([
            pinch,
            b.plate_displacement,
            b.stack_displacement,
            b.actuator_force,
            b.rod_angle,
            b.user_force,
        ]);
    }
    let peak = rows
        .iter()
        .fold(&rows[0], |best, r| if r[5] > best[5] { r } else { best });
    let summary = json!({
        "voltage_kV": u,
        "stroke_convention": cfg.actuator.stroke_convention,
        "preload_displacement_mm": dev.stack.preload_displacement,
        "peak_force_N": peak[5],
        "peak_pinch_mm": peak[0],
        "force_at_zero_pinch_N": rows[0][5],
        "all_finite_nonnegative": rows.iter().all(|r| r[5].is_finite() && r[5] >= 0.0),
        "reported_range_N": [REPORTED_MAX_FORCE_RANGE.0, REPORTED_MAX_FORCE_RANGE.1],
    });
    let file = table(
        "max-force.csv",
        &[
            "pinch_mm",
            "plate_displacement_mm",
            "stack_displacement_mm",
            "actuator_force_N",
            "rod_angle_rad",
            "force_N",
        ],
        rows,
    )?;
    Ok((summary, vec![file]))
}

fn step_response(cfg: &ExperimentConfig, duration: f64) -> Result<Produced> {
    let ctx = "step-response";
    let dev = cfg.device();
    let plant = cfg.plant();
    let u = cfg.plant.step_voltage;
    let x = cfg.mechanism.operating_displacement;
    let trace = simulate_step_response(&dev, &plant, u, x, duration).map_err(Error::model(ctx))?;
    let rise = measure_rise_time(&trace).map_err(Error::model(ctx))?;
    let summary = json!({
        "rise_time_ms": rise,
        "rise_time_continuous_ms": plant.rise_time(),
        "reported_response_time_ms": REPORTED_RESPONSE_TIME_MS,
        "step_voltage_kV": u,
        "displacement_mm": x,
        "static_force_N": static_force_map(&dev, x, u).map_err(Error::model(ctx))?,
        "final_force_N": trace.records.last().map(|r| r.actual_force),
        "rows": trace.len(),
    });
    Ok((summary, vec![trace_file("step-response.csv", &trace)?]))
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn track(cfg: &ExperimentConfig, duration: f64) -> Result<Produced> {
    let ctx = "track";
    let target = cfg.target();
    let trace = simulate_tracking(
        &cfg.device(),
        &cfg.plant(),
        &cfg.gains(),
        &target,
        cfg.mechanism.operating_displacement,
        duration,
    )
    .map_err(Error::model(ctx))?;
    let from = STEADY_STATE_DISCARD * trace.duration();
    let rms = rms_error(&trace, from);
    // Only a square target has discrete edges.
    let edges: Vec<_> = if target.shape == TargetShape::Square {
        settling_times(&trace, cfg.controller.settling_band)
            .into_iter()
            .filter(|e| e.edge_time >= from)
            .collect()
    } else {
        Vec::new()
    };
    let settle = |rising: bool| {
        mean(
            edges
                .iter()
                .filter(|e| e.rising == rising)
                .map(|e| e.settling_time),
        )
    };
    let summary = json!({
        "shape": cfg.controller.target.shape,
        "rms_error_N": rms,
        "rms_error_fraction": (target.amplitude > 0.0).then(|| rms / target.amplitude),
        "steady_state_from_ms": from,
        "rising_settling_ms": settle(true),
        "falling_settling_ms": settle(false),
        "settling_band": cfg.controller.settling_band,
        "edges": edges.len(),
        "rows": trace.len(),
    });
    Ok((summary, vec![trace_file("track.csv", &trace)?]))
}

fn vibrate(cfg: &ExperimentConfig, duration: f64) -> Result<Produced> {
    let ctx = "vibrate";
    let w = cfg.waveform();
    let report = validate_waveform(&w).map_err(Error::model(ctx))?;
    let trace = simulate_vibration(
        &cfg.device(),
        &cfg.plant(),
        &w,
        cfg.mechanism.operating_displacement,
        duration,
    )
    .map_err(Error::model(ctx))?;
    let band = cfg.ripple_band();
    let ripple = ripple_analysis(&trace, band).map_err(Error::model(ctx))?;
    let from = STEADY_STATE_DISCARD * trace.duration();
    let summary = json!({
        "ripple_frequency_hz": ripple.dominant_frequency,
        "ripple_amplitude_N": ripple.amplitude,
        "dominant_magnitude_N": ripple.dominant_magnitude,
        "resolution_hz": ripple.resolution,
        "band_hz": [band.0, band.1],
        "mean_force_N": mean(trace.records.iter().filter(|r| r.t >= from).map(|r| r.actual_force)),
        "peak_bound_kV": report.peak_bound,
        "sampled_peak_kV": report.sampled_peak,
        "peak_window_s": report.window,
        "breakdown_limit_kV": w.breakdown_limit,
        "rows": trace.len(),
    });
    Ok((summary, vec![trace_file("vibrate.csv", &trace)?]))
}

fn file_label(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Mean master and slave force over the final `window` ms.
pub fn steady_forces(trace: &SessionTrace, window: f64) -> (f64, f64) {
    let end = trace.records.last().map_or(0.0, |r| r.t);
    let hold = || trace.records.iter().filter(move |r| r.t >= end - window);
    (
        mean(hold().map(|r| r.master_force)).unwrap_or(0.0),
        mean(hold().map(|r| r.slave_force)).unwrap_or(0.0),
    )
}

fn teleop_demo(cfg: &ExperimentConfig, duration: f64) -> Result<Produced> {
    let profile = cfg.profile();
    let window = cfg.teleop.hold_window;
    let mut files = Vec::new();
    let mut objects = Vec::new();
    for (i, o) in cfg.teleop.demo_objects.iter().enumerate() {
        let session = cfg.session(o.to_object());
        let trace = run_session(&session, &profile, duration)
            .map_err(Error::model(format!("teleop-demo `{}`", o.label)))?;
        let (master, slave) = steady_forces(&trace, window);
        let name = format!("teleop-demo-{i}-{}.csv", file_label(&o.label));
        files.push(OutputFile {
            name: name.clone(),
            bytes: session_to_bytes(&trace)?,
        });
        objects.push((
            slave,
            master,
            json!({
                "label": o.label,
                "file": name,
                "stiffness_N_per_mm": o.stiffness,
                "cubic_stiffness_N_per_mm3": o.cubic_stiffness,
                "steady_slave_force_N": slave,
                "steady_master_force_N": master,
                "relative_error": if slave > 0.0 { json!((master - slave).abs() / slave) } else { Value::Null },
                "stale_ticks": trace.records.iter().filter(|r| r.stale).count(),
            }),
        ));
    }
    let mut by_slave: Vec<(f64, f64)> = objects.iter().map(|o| (o.0, o.1)).collect();
    by_slave.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ordered = by_slave.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
    let summary = json!({
        "objects": objects.into_iter().map(|o| o.2).collect::<Vec<_>>(),
        "master_forces_follow_slave_order": ordered,
        "hold_window_ms": window,
        "base_latency_ms": cfg.teleop.channel.base_latency,
        "jitter_ms": cfg.teleop.channel.jitter,
    });
    Ok((summary, files))
}
