use ehsim_core::actuator::{
    single_actuator_force, ActuatorGeometry, CalibrationParams, DisplacementConvention, StackConfig,
};
use ehsim_core::dynamics::{
    pi_step, simulate_tracking, static_force_map, ControllerState, PiGains, PlantParams,
    TargetShape, TargetWave,
};
use ehsim_core::mechanism::{device_static_force, DeviceConfig, MechanismGeometry};
use ehsim_core::teleop::{decode_frame, encode_frame, MsgType, TeleopFrame, FRAME_LEN};
use ehsim_core::waveform::{CompositeWaveform, SineOverlay, SquareWaveSpec};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Straight-line evaluation of the device map, written independently of the
/// crate's module structure.
fn device_oracle(pinch: f64, u: f64, preload: f64, per_share: Option<f64>) -> f64 {
    let (r, l) = (35.0_f64, 15.0_f64);
    let plate = (r * r - (l - pinch).powi(2)).sqrt() - (r * r - l * l).sqrt();
    let total = preload + plate;
    let dh = per_share.map_or(total, |n| total / n);
    let h: f64 = 2500.0 / (2.0 * 12.5 * 50.0);
    let alpha = (2.0 * h / 12.5).atan();
    let dx = dh * dh / (alpha.tan() * (h - dh));
    let s = (2.0 * dh / alpha.tan() + dx) * 50.0;
    let f_ha = 2.0 * 9.828e-5 * u * u * s;
    let theta = ((l - pinch) / r).asin();
    2.0 * (f_ha * theta.sin()) * theta.sin()
}

#[test]
fn device_map_matches_straight_line_oracle() {
    let shared = DeviceConfig {
        stack: StackConfig {
            convention: DisplacementConvention::PerActuatorShare,
            ..Default::default()
        },
        ..Default::default()
    };
    let got = device_static_force(&shared, 10.0, 6.0).unwrap();
    let want = device_oracle(10.0, 6.0, 0.05, Some(30.0));
    assert!(rel(got, want) < 1e-9, "{got} vs {want}");

    let total = DeviceConfig::default();
    let got = device_static_force(&total, 3.0, 6.0).unwrap();
    let want = device_oracle(3.0, 6.0, 0.05, None);
    assert!(rel(got, want) < 1e-9, "{got} vs {want}");
}

#[test]
fn plate_displacement_increasing_and_concave() {
    let g = MechanismGeometry::default();
    let xs: Vec<f64> = (0..=1500).map(|i| i as f64 * 0.01).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| g.plate_displacement(x).unwrap()).collect();
    let thetas: Vec<f64> = xs.iter().map(|&x| g.rod_angle(x).unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[1] > w[0]));
    assert!(ys.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= 1e-12));
    assert!(thetas.windows(2).all(|w| w[1] < w[0]));
    assert!((thetas[0] - (15.0_f64 / 35.0).asin()).abs() < 1e-15);
    assert_eq!(*thetas.last().unwrap(), 0.0);
}

#[test]
fn preload_gives_force_at_zero_pinch() {
    let dev = DeviceConfig::default();
    assert!(device_static_force(&dev, 0.0, 6.0).unwrap() > 0.0);
}

#[test]
fn tracking_is_deterministic() {
    let run = || {
        simulate_tracking(
            &DeviceConfig::default(),
            &PlantParams::default(),
            &PiGains::default(),
            &TargetWave {
                shape: TargetShape::Triangle,
                frequency: 0.5,
                ..Default::default()
            },
            3.0,
            3000.0,
        )
        .unwrap()
    };
    let (a, b) = (run(), run());
    assert!(a
        .records
        .iter()
        .zip(&b.records)
        .all(|(x, y)| x.actual_force.to_bits() == y.actual_force.to_bits()
            && x.voltage.to_bits() == y.voltage.to_bits()));
}

fn fig6d(slew: f64, overlay_amp: f64) -> CompositeWaveform {
    CompositeWaveform {
        square: SquareWaveSpec {
            frequency: 20.0,
            amplitude: 3.5,
            slew_rate: slew,
        },
        overlay: Some(SineOverlay {
            frequency: 5.0,
            amplitude: overlay_amp,
            phase: 0.0,
        }),
        breakdown_limit: 7.0,
    }
}

#[test]
fn waveform_zero_mean_over_common_period() {
    let w = fig6d(10.0, 2.5);
    let period = w.common_period().unwrap();
    let n = 200_000;
    let h = period / n as f64;
    // Midpoint rule.
    let (sum, abs_sum) = (0..n).fold((0.0, 0.0), |(s, a), i| {
        let u = w.sample((i as f64 + 0.5) * h);
        (s + u * h, a + u.abs() * h)
    });
    assert!(sum.abs() <= 1e-9 * abs_sum, "{sum} / {abs_sum}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn squeeze_conserves_area(dh in 0.0f64..1.999) {
        let st = ActuatorGeometry::default().squeeze_state(dh).unwrap();
        prop_assert!(rel(st.area_lost, st.area_gained) <= 1e-12);
        prop_assert!(st.squeezed_area >= 0.0);
        prop_assert_eq!(st.squeezed_area == 0.0, dh == 0.0);
    }

    #[test]
    fn force_is_quadratic_in_voltage(dh in 0.0f64..1.99, u in -6.0f64..6.0, c in -3.0f64..3.0) {
        let g = ActuatorGeometry::default();
        let cal = CalibrationParams::default();
        let base = single_actuator_force(&g, &cal, dh, u).unwrap();
        let scaled = single_actuator_force(&g, &cal, dh, c * u).unwrap();
        prop_assert!((scaled - c * c * base).abs() <= 1e-12 * scaled.abs().max(1e-300));
    }

    #[test]
    fn force_monotone(dh in 0.001f64..1.9, step in 1e-4f64..0.09, u in 0.1f64..6.0, du in 0.01f64..1.0) {
        let g = ActuatorGeometry::default();
        let cal = CalibrationParams::default();
        let f = |d, v| single_actuator_force(&g, &cal, d, v).unwrap();
        prop_assert!(f(dh + step, u) > f(dh, u));
        prop_assert!(f(dh, u + du) > f(dh, u));
        prop_assert!(f(dh, -(u + du)) > f(dh, -u));
        prop_assert_eq!(f(0.0, u), 0.0);
        prop_assert_eq!(f(dh, 0.0), 0.0);
    }

    #[test]
    fn squeeze_domain_guard(extra in 0.0f64..10.0) {
        let g = ActuatorGeometry::default();
        prop_assert!(g.squeezed_area(2.0 + extra).is_err());
        prop_assert!(MechanismGeometry::default().plate_displacement(15.0 + 1e-9 + extra).is_err());
    }

    #[test]
    fn device_force_quadratic(pinch in 0.0f64..4.5, u in 0.0f64..6.0, c in 0.0f64..1.2) {
        let dev = DeviceConfig::default();
        let a = device_static_force(&dev, pinch, u).unwrap();
        let b = device_static_force(&dev, pinch, c * u).unwrap();
        prop_assert!((b - c * c * a).abs() <= 1e-12 * b.abs().max(1e-300));
        prop_assert!(a >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn static_map_delegates(pinch in 0.0f64..4.5, u in 0.0f64..6.0) {
        let dev = DeviceConfig::default();
        let a = static_force_map(&dev, pinch, u).unwrap();
        let b = device_static_force(&dev, pinch, u).unwrap();
        prop_assert!(rel(a, b) <= 1e-12);
    }

    #[test]
    fn waveform_periodic(t in 0.0f64..2.0, slew in 1.0f64..100.0, amp in 0.0f64..2.5) {
        let w = fig6d(slew, amp);
        let period = w.common_period().unwrap();
        prop_assert!((w.sample(t + period) - w.sample(t)).abs() < 1e-9);
    }

    #[test]
    fn waveform_slew_bound(t in 0.0f64..1.0, delta in 1e-6f64..1e-3, slew in 1.0f64..100.0) {
        let w = fig6d(slew, 2.5);
        let bound = slew * 1e3 + 2.5 * std::f64::consts::TAU * 5.0;
        let rate = (w.sample(t + delta) - w.sample(t)).abs() / delta;
        prop_assert!(rate <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn plant_stays_bounded(voltages in prop::collection::vec(0.0f64..6.0, 1..400)) {
        let dev = DeviceConfig::default();
        let p = PlantParams::default();
        let fmax = static_force_map(&dev, 3.0, 6.0).unwrap();
        let mut f = 0.0;
        for u in voltages {
            f = p.step(f, static_force_map(&dev, 3.0, u).unwrap());
            prop_assert!((0.0..=fmax).contains(&f));
        }
    }

    #[test]
    fn anti_windup_never_grows_while_pinned(errors in prop::collection::vec(-30.0f64..30.0, 1..300)) {
        let g = PiGains::default();
        let mut s = ControllerState::default();
        for e in errors {
            let candidate = g.kp * e + g.ki * (s.integral_accumulator + e);
            let (u, next) = pi_step(&g, s, e);
            prop_assert!((g.output_min..=g.output_max).contains(&u));
            if (candidate > g.output_max && e > 0.0) || (candidate < g.output_min && e < 0.0) {
                prop_assert_eq!(next.integral_accumulator, s.integral_accumulator);
            }
            s = next;
        }
    }

    #[test]
    fn frame_round_trip(
        ty in 1u8..=4,
        seq: u16,
        ts: u64,
        a in prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL,
        b in prop::num::f64::NORMAL | prop::num::f64::ZERO,
    ) {
        let f = TeleopFrame {
            msg_type: MsgType::try_from(ty).unwrap(),
            seq,
            timestamp_us: ts,
            payload_a: a,
            payload_b: b,
        };
        let bytes = encode_frame(&f).unwrap();
        let back = decode_frame(&bytes).unwrap();
        prop_assert_eq!(encode_frame(&back).unwrap(), bytes);
    }

    #[test]
    fn decode_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let r = decode_frame(&bytes);
        if bytes.len() != FRAME_LEN {
            prop_assert!(r.is_err());
        }
    }
}
