//! Acceptance criteria, one report line each.
//!
//! Runs as a plain binary so the lines always print. Exits nonzero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};

use ehsim::config::Shape;
use ehsim::trace::{read_trace, session_to_bytes};
use ehsim::{run_experiment, Experiment, ExperimentConfig, Outcome, RunOptions};
use ehsim_core::actuator::{single_actuator_force, ActuatorGeometry, CalibrationParams};
use ehsim_core::mechanism::MechanismGeometry;
use ehsim_core::teleop::{
    decode_frame, encode_frame, run_session, MsgType, SessionTrace, TeleopFrame, FRAME_LEN,
};
use ehsim_core::FrameError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

// Tolerances.
const K_BAND: (f64, f64) = (8.0e-5, 1.1e-4);
const MODEL_VS_MEASURED: f64 = 0.15;
const RISE_TARGET_MS: f64 = 53.0;
const RISE_TOL_MS: f64 = 1.0;
const TRACK_RMS_FRACTION: f64 = 0.05;
const IDEAL_RIPPLE_N: f64 = 1e-9;
const AREA_REL: f64 = 1e-12;
const QUADRATIC_REL: f64 = 1e-12;
const FUZZ_FRAMES: usize = 10_000;
const RANDOM_CASES: usize = 1_000;
const REFLECTION_REL: f64 = 0.02;
// Reference predictions are quoted to four decimals from rounded intermediates.
const QUOTED_FORCE_ABS: f64 = 1e-4;

#[derive(Default)]
struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.lines.push((ok, detail.into()));
    }

    fn passed(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.0)
    }
}

fn run(exp: Experiment, cfg: &ExperimentConfig, duration: Option<f64>) -> Outcome {
    run_experiment(exp, cfg, RunOptions { duration }).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// Squeezed area from the bladder geometry, written out longhand.
fn area_oracle(dh: f64) -> f64 {
    let (v, x, l) = (2500.0, 12.5, 50.0);
    let h = v / (2.0 * x * l);
    let tan_a = 2.0 * h / x;
    let dx = dh * dh / (tan_a * (h - dh));
    (2.0 * dh / tan_a + dx) * l
}

const TABLE: [(f64, f64); 3] = [(0.125, 0.2788), (0.25, 0.5261), (0.375, 0.8566)];

fn criterion_1(r: &mut Report) {
    let out = run(Experiment::Calibrate, &ExperimentConfig::default(), None);
    let k = num(&out.summary["K"]);
    let u = 6.0;
    let fs: f64 = TABLE.iter().map(|&(d, f)| f * area_oracle(d)).sum();
    let ss: f64 = TABLE.iter().map(|&(d, _)| area_oracle(d).powi(2)).sum();
    let oracle = fs / (2.0 * u * u * ss);
    let in_band = |v: f64| (K_BAND.0..=K_BAND.1).contains(&v);
    r.check(in_band(k), format!("fitted K = {k:.6e} in [8.0e-5, 1.1e-4]"));
    r.check(
        ((k - oracle) / oracle).abs() < 1e-12,
        format!("fitted K matches least-squares oracle {oracle:.6e}"),
    );
    r.check((oracle - 9.03e-5).abs() < 0.005e-5, "oracle rounds to 9.03e-5");
    r.check(in_band(9.828e-5) && in_band(oracle), "9.828e-5 and 9.03e-5 lie in band");
}

fn criterion_2(r: &mut Report) {
    let out = run(Experiment::Calibrate, &ExperimentConfig::default(), None);
    let expected = [0.2857, 0.5923, 0.9250];
    for ((p, &(d, measured)), want) in out.summary["points"]
        .as_array()
        .unwrap()
        .iter()
        .zip(&TABLE)
        .zip(expected)
    {
        let model = num(&p["model_force_N"]);
        let oracle = 2.0 * 9.828e-5 * 36.0 * area_oracle(d);
        let rel = (model - measured).abs() / measured;
        r.check(
            (model - oracle).abs() < 1e-12 && (model - want).abs() <= QUOTED_FORCE_ABS,
            format!("Δh={d}: model {model:.5} N (oracle {oracle:.5}, quoted {want})"),
        );
        r.check(
            rel <= MODEL_VS_MEASURED,
            format!("Δh={d}: {:.1}% from measured {measured}", rel * 100.0),
        );
    }
}

fn criterion_3(r: &mut Report) {
    let cfg = ExperimentConfig::default();
    let out = run(Experiment::StepResponse, &cfg, None);
    let rise = num(&out.summary["rise_time_ms"]);
    let tau = cfg.plant.time_constant;
    let closed_form = tau * 9f64.ln();
    r.check(
        (rise - RISE_TARGET_MS).abs() <= RISE_TOL_MS,
        format!("rise time {rise:.3} ms within 53 ± 1 ms"),
    );
    r.check(
        (rise - closed_form).abs() < 0.05,
        format!("closed form τ·ln 9 = {closed_form:.3} ms"),
    );
    // Sampled exponential 1 − e^(−t/τ), crossings by linear interpolation.
    let f = |k: f64| 1.0 - (-k / tau).exp();
    let cross = |lvl: f64| {
        let fin = f(400.0);
        let k = (0..).find(|&k| f(k as f64) >= lvl * fin).unwrap() as f64;
        let (a, b) = (f(k - 1.0), f(k));
        k - 1.0 + (lvl * fin - a) / (b - a)
    };
    let sampled = cross(0.9) - cross(0.1);
    r.check(
        ((rise - sampled) / sampled).abs() < 1e-9,
        format!("sampled-exponential oracle {sampled:.6} ms"),
    );
    let tr = read_trace(&out.files[0].bytes[..]).unwrap();
    r.check(tr.len() == 401, format!("{} rows for 400 ms at 1 ms", tr.len()));
}

fn criterion_4(r: &mut Report) {
    let cfg = ExperimentConfig::default();
    let out = run(Experiment::Track, &cfg, None);
    let frac = num(&out.summary["rms_error_fraction"]);
    r.check(
        frac < TRACK_RMS_FRACTION,
        format!(
            "0.08 Hz sine: steady-state RMS {:.4} N = {:.2}% of amplitude",
            num(&out.summary["rms_error_N"]),
            frac * 100.0
        ),
    );
    let mut sq = cfg.clone();
    sq.controller.target.shape = Shape::Square;
    let out = run(Experiment::Track, &sq, None);
    let rise = num(&out.summary["rising_settling_ms"]);
    let fall = num(&out.summary["falling_settling_ms"]);
    r.check(
        fall >= rise,
        format!("square: falling settling {fall} ms >= rising {rise} ms"),
    );
}

fn ripple(cfg: &ExperimentConfig) -> f64 {
    num(&run(Experiment::Vibrate, cfg, Some(6000.0)).summary["ripple_amplitude_N"])
}

fn criterion_5(r: &mut Report) {
    let cfg = ExperimentConfig::default();
    let out = run(Experiment::Vibrate, &cfg, None);
    let amp = num(&out.summary["ripple_amplitude_N"]);
    r.check(
        amp > 1e-6,
        format!(
            "20 Hz/3.5 kV + 5 Hz/2.5 kV: ripple {amp:.4} N at {} Hz",
            out.summary["ripple_frequency_hz"]
        ),
    );
    let amps = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5];
    let ripples: Vec<f64> = amps
        .iter()
        .map(|&a| {
            let mut c = cfg.clone();
            c.waveform.overlay.as_mut().unwrap().amplitude = a;
            ripple(&c)
        })
        .collect();
    r.check(
        ripples.windows(2).all(|w| w[1] > w[0]),
        format!("ripple increases with overlay amplitude {amps:?}: {ripples:.4?}"),
    );
    let mut ideal = cfg.clone();
    ideal.waveform.overlay = None;
    ideal.waveform.square.slew_rate = None;
    let flat = ripple(&ideal);
    r.check(
        flat < IDEAL_RIPPLE_N,
        format!("ideal edges, no overlay: ripple {flat:e} N"),
    );
}

fn criterion_6(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = ActuatorGeometry::default();
    let cal = CalibrationParams::default();
    let h = 2.0;
    let tan_a = 0.32;

    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_CASES {
        let dh = rng.gen_range(1e-9..h);
        let s = g.squeeze_state(dh).unwrap();
        let lost = dh * dh / tan_a;
        let gained = g.lateral_advance(dh).unwrap() * (h - dh);
        worst = worst
            .max(((lost - gained) / lost).abs())
            .max(((s.area_lost - s.area_gained) / s.area_lost).abs());
    }
    r.check(
        worst <= AREA_REL,
        format!("ΔS1 = ΔS2 over {RANDOM_CASES} Δh, worst relative gap {worst:e}"),
    );

    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_CASES {
        let dh = rng.gen_range(0.0..h);
        let u = rng.gen_range(-6.0..6.0);
        let c = rng.gen_range(-3.0..3.0);
        let a = single_actuator_force(&g, &cal, dh, u).unwrap();
        let b = single_actuator_force(&g, &cal, dh, c * u).unwrap();
        if b != 0.0 {
            worst = worst.max(((b - c * c * a) / b).abs());
        }
    }
    r.check(
        worst <= QUADRATIC_REL,
        format!("F(c·u) = c²F(u) over {RANDOM_CASES} cases, worst {worst:e}"),
    );

    let mut monotone = true;
    for _ in 0..RANDOM_CASES {
        let dh = rng.gen_range(0.001..1.9);
        let ddh = rng.gen_range(1e-4..0.09);
        let u = rng.gen_range(0.1..6.0);
        let du = rng.gen_range(0.01..1.0);
        let f = |d: f64, v: f64| single_actuator_force(&g, &cal, d, v).unwrap();
        monotone &= f(dh + ddh, u) > f(dh, u) && f(dh, u + du) > f(dh, u) && f(dh, -u - du) > f(dh, -u);
    }
    r.check(monotone, "force increases with Δh and |u|");

    let m = MechanismGeometry::default();
    let guards = g.squeezed_area(h).is_err()
        && g.squeezed_area(h + rng.gen_range(0.0..5.0)).is_err()
        && m.plate_displacement(15.0 + 1e-9).is_err()
        && m.plate_displacement(15.0).is_ok();
    r.check(guards, "Δh >= h and Δx_p > L_mech rejected");
}

fn criterion_7(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let finite = |rng: &mut ChaCha8Rng| loop {
        let v = f64::from_bits(rng.gen());
        if v.is_finite() {
            return v;
        }
    };
    let mut exact = true;
    for _ in 0..FUZZ_FRAMES {
        let f = TeleopFrame {
            msg_type: MsgType::try_from(rng.gen_range(1u8..=4)).unwrap(),
            seq: rng.gen(),
            timestamp_us: rng.gen(),
            payload_a: finite(&mut rng),
            payload_b: finite(&mut rng),
        };
        let bytes = encode_frame(&f).unwrap();
        let back = decode_frame(&bytes).unwrap();
        exact &= back.msg_type == f.msg_type
            && back.seq == f.seq
            && back.timestamp_us == f.timestamp_us
            && back.payload_a.to_bits() == f.payload_a.to_bits()
            && back.payload_b.to_bits() == f.payload_b.to_bits()
            && encode_frame(&back).unwrap() == bytes;
    }
    r.check(exact, format!("{FUZZ_FRAMES} fuzzed frames round-trip bit-exactly"));

    let valid = encode_frame(&TeleopFrame::control(MsgType::Hello, 0, 0)).unwrap();
    let mut typed = true;
    for len in (0..64).filter(|&n| n != FRAME_LEN) {
        let buf = vec![0xA7u8; len];
        typed &= decode_frame(&buf) == Err(FrameError::BadLength(len));
    }
    for magic in (0..=255u8).filter(|&b| b != 0xA7) {
        let mut b = valid;
        b[0] = magic;
        typed &= decode_frame(&b) == Err(FrameError::BadMagic(magic));
    }
    for ty in (0..=255u8).filter(|t| !(1..=4).contains(t)) {
        let mut b = valid;
        b[1] = ty;
        typed &= decode_frame(&b) == Err(FrameError::BadType(ty));
    }
    for (at, bad) in [(12, f64::NAN), (20, f64::INFINITY), (12, f64::NEG_INFINITY)] {
        let mut b = valid;
        b[at..at + 8].copy_from_slice(&bad.to_le_bytes());
        typed &= matches!(decode_frame(&b), Err(FrameError::NonFinite(_)));
    }
    for _ in 0..FUZZ_FRAMES {
        let len = rng.gen_range(0..40);
        let junk: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        // Must return, never panic.
        let _ = decode_frame(&junk);
    }
    let mut nan = TeleopFrame::control(MsgType::MasterPos, 0, 0);
    nan.payload_a = f64::NAN;
    typed &= encode_frame(&nan).is_err();
    r.check(typed, "bad length, magic, type and non-finite payloads give typed errors");

    let mut hello = vec![0xA7, 0x03];
    hello.extend([0u8; 26]);
    r.check(valid.to_vec() == hello, "HELLO seq=0 ts=0 encodes as a7 03 then 26 zero bytes");
    let pos = TeleopFrame {
        msg_type: MsgType::MasterPos,
        seq: 1,
        timestamp_us: 1000,
        payload_a: 1.0,
        payload_b: 0.0,
    };
    let b = encode_frame(&pos).unwrap();
    r.check(
        b[12..20] == [0, 0, 0, 0, 0, 0, 0xf0, 0x3f],
        "MASTER_POS payload_a=1.0 occupies bytes 12..19 as 00..00 f0 3f",
    );
}

fn session(cfg: &ExperimentConfig, duration: f64) -> SessionTrace {
    run_session(
        &cfg.session(cfg.teleop.object.to_object()),
        &cfg.profile(),
        duration,
    )
    .unwrap()
}

fn criterion_8(r: &mut Report) {
    // Contact at 1 mm, pinch to 4 mm by 1100 ms: 3 mm penetration.
    let cfg = ExperimentConfig::default();
    let hold_start = 1100.0;
    let tr = session(&cfg, 4000.0);
    let spring = 0.3 * 3.0;
    let last = tr.records.last().unwrap();
    r.check(
        (last.slave_force - spring).abs() < 1e-12,
        format!("slave force {:.12} N = k·δ = 0.9 N", last.slave_force),
    );
    let after: Vec<_> = tr.records.iter().filter(|x| x.t >= hold_start + 2000.0).collect();
    let worst = after
        .iter()
        .map(|x| (x.master_force - spring).abs() / spring)
        .fold(0.0, f64::max);
    r.check(
        !after.is_empty() && worst <= REFLECTION_REL,
        format!("master within {:.4}% of slave force after 2 s of hold", worst * 100.0),
    );
    let step = cfg.teleop.slave.position_step;
    let mirror = tr
        .records
        .iter()
        .filter(|x| x.t >= 5.0)
        .map(|x| (x.slave_position - x.master_displacement).abs())
        .fold(0.0, f64::max);
    r.check(
        mirror <= step,
        format!("position mirroring error {mirror:.4} mm <= {step} mm"),
    );

    let mut jittery = cfg.clone();
    jittery.teleop.channel.base_latency = 5.0;
    jittery.teleop.channel.jitter = 4.0;
    jittery.seed = 2024;
    let a = session_to_bytes(&session(&jittery, 2000.0)).unwrap();
    let b = session_to_bytes(&session(&jittery, 2000.0)).unwrap();
    r.check(a == b, "identical seed gives byte-identical traces");

    let mut slow = cfg.clone();
    slow.teleop.channel.base_latency = 50.0;
    let tr = session(&slow, 10_000.0);
    let cap = ehsim_core::mechanism::device_static_force(&slow.device(), 4.0, 6.0).unwrap();
    let in_range = tr
        .records
        .iter()
        .all(|x| x.master_force.is_finite() && (0.0..=cap).contains(&x.master_force));
    let spread = |a: f64, b: f64| {
        let v: Vec<f64> = tr
            .records
            .iter()
            .filter(|x| x.t >= a && x.t < b)
            .map(|x| x.master_force)
            .collect();
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let (early, late) = (spread(hold_start, 4000.0), spread(8000.0, 10_001.0));
    r.check(
        in_range && late <= early && late <= REFLECTION_REL * spring,
        format!("50 ms latency, 10 s: force swing {early:.4} N early, {late:.2e} N late"),
    );
}

fn criterion_9(r: &mut Report) {
    let cfg = ExperimentConfig::default();
    let out = run(Experiment::MaxForce, &cfg, None);
    let text = String::from_utf8(out.files[0].bytes.clone()).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let pinch_end = rows.last().unwrap()[0];
    let forces: Vec<f64> = rows.iter().map(|row| row[5]).collect();
    r.check(
        pinch_end == 15.0 && rows[0][0] == 0.0,
        format!("curve spans 0..{pinch_end} mm at 6 kV"),
    );
    r.check(
        forces.iter().all(|f| f.is_finite() && *f >= 0.0),
        format!("{} finite nonnegative forces", forces.len()),
    );
    r.check(
        forces[0] > 0.0,
        format!("preload 0.05 mm gives {:.3e} N at zero pinch", forces[0]),
    );
    let mut no_preload = cfg.clone();
    no_preload.actuator.preload_displacement = 0.0;
    let f0 = num(&run(Experiment::MaxForce, &no_preload, None).summary["force_at_zero_pinch_N"]);
    r.check(f0 == 0.0, "no preload gives zero force at zero pinch");
    let range = &out.summary["reported_range_N"];
    r.check(
        num(&range[0]) == 2.0 && num(&range[1]) == 5.0,
        format!(
            "summary records the 2-5 N reference range (model peak {:.4} N, not compared)",
            num(&out.summary["peak_force_N"])
        ),
    );
}

fn main() {
    let criteria: [(&str, fn(&mut Report)); 9] = [
        ("calibration reproduction", criterion_1),
        ("model vs measurement", criterion_2),
        ("response time", criterion_3),
        ("PI tracking", criterion_4),
        ("vibration ripple", criterion_5),
        ("actuator math properties", criterion_6),
        ("frame protocol", criterion_7),
        ("teleoperation session", criterion_8),
        ("max-force curve", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let mut report = Report::default();
        let result = catch_unwind(AssertUnwindSafe(|| f(&mut report)));
        if let Err(e) = &result {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            report.check(false, format!("panicked: {msg}"));
        }
        let ok = report.passed();
        failed += usize::from(!ok);
        println!(
            "criterion {} {title}: {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
        for (ok, detail) in &report.lines {
            println!("    {} {detail}", if *ok { "ok  " } else { "FAIL" });
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
