use proptest::prelude::*;

use halfpound::anim_io::{parse_bvh, serialize_bvh};
use halfpound::baselines::InertializerState;
use halfpound::filter::{cutoff_for_speed, HpfParams, HpfState};
use halfpound::metrics::{mse, normalized_power_spectrum, npss, reference_spectrum};
use halfpound::Channel;

fn params() -> impl Strategy<Value = HpfParams<f64>> {
    (0.01f64..10.0, 0.0f64..20.0, 0.1f64..1000.0).prop_map(|(lo, w, dx)| HpfParams::new(lo, lo + w, dx).unwrap())
}

fn signal(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, len)
}

fn run(p: &HpfParams<f64>, xs: &[f64], dt: f64) -> Vec<f64> {
    let mut s = HpfState::new();
    xs.iter().map(|&x| s.step(p, x, dt).unwrap()).collect()
}

proptest! {
    #[test]
    fn hpf_stays_within_input_range(p in params(), xs in signal(1..200), dt in 1e-3f64..0.5) {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for y in run(&p, &xs, dt) {
            prop_assert!(y >= lo && y <= hi);
        }
    }

    #[test]
    fn hpf_step_is_between_prev_and_input(p in params(), prev in -1e3f64..1e3, x in -1e3f64..1e3, dt in 1e-4f64..1.0) {
        let mut s = HpfState::seeded(prev);
        let y = s.step(&p, x, dt).unwrap();
        prop_assert!(y >= prev.min(x) && y <= prev.max(x));
    }

    #[test]
    fn hpf_shift_equivariant(p in params(), xs in signal(1..100), c in -1e3f64..1e3, dt in 1e-3f64..0.5) {
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        for (a, b) in run(&p, &xs, dt).iter().zip(run(&p, &shifted, dt)) {
            prop_assert!((a + c - b).abs() <= 1e-9 * (1.0 + a.abs() + c.abs()));
        }
    }

    #[test]
    fn hpf_scale_equivariant(p in params(), xs in signal(1..100), k in 0.01f64..100.0, dt in 1e-3f64..0.5) {
        let scaled_params = HpfParams::new(p.f_c_min(), p.f_c_max(), p.max_abs_dx() * k).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
        for (a, b) in run(&p, &xs, dt).iter().zip(run(&scaled_params, &scaled, dt)) {
            prop_assert!((a * k - b).abs() <= 1e-9 * (1.0 + (a * k).abs()));
        }
    }

    #[test]
    fn hpf_constant_input_is_fixed_point(p in params(), c in -1e6f64..1e6, n in 1usize..100, dt in 1e-4f64..1.0) {
        for y in run(&p, &vec![c; n], dt) {
            prop_assert_eq!(y, c);
        }
    }

    #[test]
    fn hpf_monotone_step_response(p in params(), target in -1e3f64..1e3, dt in 1e-3f64..0.2) {
        let mut s = HpfState::seeded(0.0);
        let mut last = 0.0f64;
        for _ in 0..200 {
            let y = s.step(&p, target, dt).unwrap();
            prop_assert!((y - last) * target.signum() >= 0.0);
            prop_assert!(y.abs() <= target.abs());
            last = y;
        }
    }

    #[test]
    fn cutoff_within_bounds_and_monotone(p in params(), a in 0.0f64..2e3, b in 0.0f64..2e3) {
        let (fa, fb) = (cutoff_for_speed(&p, a), cutoff_for_speed(&p, b));
        prop_assert!(fa >= p.f_c_min() && fa <= p.f_c_max());
        prop_assert!(cutoff_for_speed(&p, -a) == fa);
        if a <= b {
            prop_assert!(fa <= fb);
        }
    }

    #[test]
    fn inertialization_never_exceeds_initial_offset(
        x0 in -100f64..100.0, v0 in -1e3f64..1e3, t1 in 0.01f64..2.0
    ) {
        let s = InertializerState::new(x0, v0, 0.0, t1).unwrap();
        for i in 0..=400 {
            let t = s.blend_time_t1 * 1.1 * i as f64 / 400.0;
            prop_assert!(s.offset(t).abs() <= x0.abs() * (1.0 + 1e-12) + 1e-12);
        }
        prop_assert_eq!(s.offset(s.blend_time_t1 * 1.5), 0.0);
    }

    #[test]
    fn npss_ignores_amplitude_and_offset(xs in signal(16..80), r in signal(16..80), k in 0.01f64..100.0, c in -1e3f64..1e3) {
        let n = xs.len().min(r.len());
        prop_assume!(xs[..n].iter().any(|&v| v != xs[0]) && r[..n].iter().any(|&v| v != r[0]));
        let test = Channel::uniform("t", 30.0, xs[..n].to_vec()).unwrap();
        let moved = Channel::uniform("m", 30.0, xs[..n].iter().map(|v| v * k + c).collect()).unwrap();
        let reference = normalized_power_spectrum(&Channel::uniform("r", 30.0, r[..n].to_vec()).unwrap()).unwrap();
        let (a, b) = (npss(&test, &reference).unwrap(), npss(&moved, &reference).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn reference_spectrum_commutes(xs in signal(16..80), ys in signal(16..80)) {
        let n = xs.len().min(ys.len());
        prop_assume!(xs[..n].iter().any(|&v| v != xs[0]) && ys[..n].iter().any(|&v| v != ys[0]));
        let a = Channel::uniform("a", 30.0, xs[..n].to_vec()).unwrap();
        let b = Channel::uniform("b", 30.0, ys[..n].to_vec()).unwrap();
        prop_assert_eq!(reference_spectrum(&a, &b).unwrap(), reference_spectrum(&b, &a).unwrap());
    }

    #[test]
    fn npss_of_reference_itself_is_zero(xs in signal(16..80)) {
        prop_assume!(xs.iter().any(|&v| v != xs[0]));
        let c = Channel::uniform("c", 30.0, xs).unwrap();
        let spec = normalized_power_spectrum(&c).unwrap();
        prop_assert!(npss(&c, &spec).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mse_symmetric_and_nonnegative(xs in signal(1..50), ys in signal(1..50)) {
        let n = xs.len().min(ys.len());
        let a = Channel::uniform("a", 30.0, xs[..n].to_vec()).unwrap();
        let b = Channel::uniform("b", 30.0, ys[..n].to_vec()).unwrap();
        let (ab, ba) = (mse(&a, &b, n).unwrap(), mse(&b, &a, n).unwrap());
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(mse(&a, &a, n).unwrap(), 0.0);
    }

    #[test]
    fn bvh_round_trips_any_motion(
        rows in prop::collection::vec(prop::collection::vec(-1e4f64..1e4, 15), 1..20),
        frame_time in 1e-3f64..1.0,
    ) {
        let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/four_joint.bvh")).unwrap();
        let mut sk = parse_bvh::<f64>(&text).unwrap();
        prop_assert_eq!(sk.channel_count(), 15);
        sk.frames = rows;
        sk.frame_time = frame_time;
        prop_assert_eq!(parse_bvh::<f64>(&serialize_bvh(&sk)).unwrap(), sk);
    }
}
