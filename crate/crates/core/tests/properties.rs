use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

use qbr::analysis::projector_oracle;
use qbr::metrics::{position_error, ErrorMap};
use qbr::pbp::{hard_threshold_joint, localize};
use qbr::quantizer::{draw_dither, one_bit_delta, quantize_observations, quantize_scalar, QuantizerConfig};
use qbr::radar_model::{build_phi, signal_matrix, synthesize, RadarConfig, Scene, Target};

fn small_cfg() -> RadarConfig {
    RadarConfig { num_freqs: 64, num_ranges: 32, sweep_samples: 64, ..RadarConfig::default() }
}

fn target(bin: usize) -> impl Strategy<Value = Target> {
    (-1.5f64..1.5, 0.05f64..3.0, 0.0f64..std::f64::consts::TAU).prop_map(move |(angle, amplitude, phase)| Target {
        range_bin: bin,
        angle,
        amplitude,
        phase,
    })
}

/// Scene with distinct bins drawn from `0..n`.
fn scene(n: usize, max_k: usize) -> impl Strategy<Value = Scene> {
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=max_k)
        .prop_flat_map(|bins| bins.into_iter().map(target).collect::<Vec<_>>())
        .prop_map(Scene::new)
}

fn complex_matrix(n: usize) -> impl Strategy<Value = Array2<Complex64>> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * 2)
        .prop_map(move |v| Array2::from_shape_vec((n, 2), v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn observations_are_linear_in_the_scene(s in scene(32, 6), split in 0usize..7) {
        let cfg = small_cfg();
        let split = split.min(s.targets.len());
        let a = Scene::new(s.targets[..split].to_vec());
        let b = Scene::new(s.targets[split..].to_vec());
        let (g, _) = synthesize(&cfg, &s).unwrap();
        let (ga, _) = synthesize(&cfg, &a).unwrap();
        let (gb, _) = synthesize(&cfg, &b).unwrap();
        for ((x, y), z) in g.iter().zip(ga.iter()).zip(gb.iter()) {
            prop_assert!(close(*x, y + z, 1e-12));
        }
    }

    #[test]
    fn both_antennas_share_support_and_magnitude(s in scene(32, 6)) {
        let x = signal_matrix(&small_cfg(), &s).unwrap();
        let mut bins: Vec<usize> = s.targets.iter().map(|t| t.range_bin).collect();
        bins.sort();
        prop_assert_eq!(x.support(), bins);
        for row in x.0.rows() {
            prop_assert!((row[0].norm() - row[1].norm()).abs() <= 1e-12 * row[0].norm().max(1.0));
        }
    }

    #[test]
    fn inter_antenna_phase_encodes_the_angle(t in target(5)) {
        let cfg = small_cfg();
        let x = signal_matrix(&cfg, &Scene::new(vec![t])).unwrap();
        let diff = (x.0[[5, 1]] * x.0[[5, 0]].conj()).arg();
        let expected = Complex64::from_polar(1.0, cfg.phase_per_sine() * t.angle.sin()).arg();
        prop_assert!((diff - expected).abs() < 1e-9);
    }

    #[test]
    fn quantizer_error_is_at_most_half_a_step(lambda in -1e4f64..1e4, delta in 1e-3f64..1e3) {
        let q = quantize_scalar(lambda, delta).unwrap();
        prop_assert!((q - lambda).abs() <= 0.5 * delta * (1.0 + 1e-9));
        let k = q / delta - 0.5;
        prop_assert!((k - k.round()).abs() <= 1e-6);
    }

    #[test]
    fn dither_is_alpha_scaled_copy(seed: u64, alpha in 0.0f64..=1.0) {
        let full = draw_dither(32, 2.0, 1.0, seed);
        let weighted = draw_dither(32, 2.0, alpha, seed);
        for (f, w) in full.iter().zip(&weighted) {
            prop_assert!(close(f * alpha, *w, 1e-15));
            prop_assert!(f.re >= -1.0 && f.re < 1.0 && f.im >= -1.0 && f.im < 1.0);
        }
    }

    #[test]
    fn one_bit_outputs_stay_at_half_step(s in scene(32, 4), seed: u64) {
        prop_assume!(!s.targets.is_empty());
        let (gamma, _) = synthesize(&small_cfg(), &s).unwrap();
        let delta = one_bit_delta(&gamma, 1.0).unwrap();
        let q = QuantizerConfig { delta, bit_depth: 1, alpha: 1.0, seed, ..Default::default() };
        let z = quantize_observations(&gamma, &q).unwrap().z;
        for v in z.iter().flat_map(|c| [c.re, c.im]) {
            prop_assert!(v == 0.5 * delta || v == -0.5 * delta, "{} not ±{}", v, 0.5 * delta);
        }
    }

    #[test]
    fn joint_projector_is_optimal(u in complex_matrix(7), k in 1usize..=7) {
        let (_, best) = projector_oracle(u.view(), k).unwrap();
        let v = hard_threshold_joint(u.view(), k).matrix;
        let d: f64 = u.iter().zip(v.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        prop_assert!((d - best).abs() <= 1e-12 * best.max(1e-300));
        let kept = v.rows().into_iter().filter(|r| r.iter().any(|c| *c != Complex64::ZERO)).count();
        prop_assert!(kept <= k);
    }

    #[test]
    fn localization_ignores_a_common_complex_gain(z in complex_matrix(64), re in 0.1f64..5.0, im in -5.0f64..5.0, k in 1usize..4) {
        let cfg = small_cfg();
        let phi = build_phi(&cfg);
        let c = Complex64::new(re, im);
        let a = localize(&phi, z.view(), k, &cfg).unwrap();
        let b = localize(&phi, z.mapv(|v| v * c).view(), k, &cfg).unwrap();
        prop_assert_eq!(&a.support, &b.support);
        for (x, y) in a.targets.iter().zip(&b.targets) {
            prop_assert!((x.angle - y.angle).abs() < 1e-9);
        }
    }

    #[test]
    fn position_error_is_symmetric(r1 in 0.0f64..200.0, a1 in -1.6f64..1.6, r2 in 0.0f64..200.0, a2 in -1.6f64..1.6) {
        let d1 = position_error((r1, a1), &[(r2, a2)]).unwrap();
        let d2 = position_error((r2, a2), &[(r1, a1)]).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0));
        prop_assert!(d1 >= 0.0);
    }

    #[test]
    fn position_error_ignores_estimate_order(truth in (0.0f64..150.0, -1.5f64..1.5), mut est in proptest::collection::vec((0.0f64..150.0, -1.5f64..1.5), 1..6)) {
        let a = position_error(truth, &est).unwrap();
        est.reverse();
        prop_assert_eq!(a, position_error(truth, &est).unwrap());
    }

    #[test]
    fn error_map_ignores_accumulation_order(mut items in proptest::collection::vec(((0usize..4, 0usize..5), 0.0f64..10.0), 0..40)) {
        let fill = |items: &[((usize, usize), f64)]| {
            let mut m = ErrorMap::new(4, 5, 100.0);
            for &(c, e) in items {
                m.accumulate(c, e).unwrap();
            }
            m
        };
        let a = fill(&items);
        items.reverse();
        let b = fill(&items);
        for cell in a.cells() {
            prop_assert_eq!(a.count(cell).unwrap(), b.count(cell).unwrap());
            match (a.mean(cell).unwrap(), b.mean(cell).unwrap()) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0)),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn error_map_merge_is_associative(parts in proptest::collection::vec(proptest::collection::vec(((0usize..3, 0usize..3), 0.0f64..10.0), 0..10), 3)) {
        let maps: Vec<ErrorMap> = parts
            .iter()
            .map(|items| {
                let mut m = ErrorMap::new(3, 3, 10.0);
                for &(c, e) in items {
                    m.accumulate(c, e).unwrap();
                }
                m
            })
            .collect();
        let mut left = maps[0].clone();
        left.merge(&maps[1]).unwrap();
        left.merge(&maps[2]).unwrap();
        let mut tail = maps[1].clone();
        tail.merge(&maps[2]).unwrap();
        let mut right = maps[0].clone();
        right.merge(&tail).unwrap();
        for cell in left.cells() {
            prop_assert_eq!(left.count(cell).unwrap(), right.count(cell).unwrap());
            match (left.mean(cell).unwrap(), right.mean(cell).unwrap()) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0)),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }
}
