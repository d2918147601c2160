//! Fractal families: fixed-point identities, grid/pointwise agreement, contraction.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use proptest::prelude::*;
use splinegen::bspline::{eval_complex, ComplexOrder};
use splinegen::expspline::RateTuple;
use splinegen::selfref::{
    fixed_point_grid, make_fractal_complex_exp, make_fractal_complex_poly, make_fractal_exp, make_fractal_poly,
    rb_apply, residual, Evaluator, FixedPointHandle, Partition, RBSystem, ScalingVector,
};
use splinegen::{Complex64, SampledFunction};

const TOL: f64 = 1e-8;

fn bounded_reference_families() -> Vec<(&'static str, FixedPointHandle)> {
    vec![
        ("B2", make_fractal_poly(2, vec![0.75, 0.75]).unwrap()),
        ("B3", make_fractal_poly(3, vec![0.25; 3]).unwrap()),
        (
            "E2",
            make_fractal_exp(RateTuple::new(vec![2.0, -2.0]).unwrap(), vec![0.25, 0.25]).unwrap(),
        ),
        (
            "E3",
            make_fractal_exp(RateTuple::new(vec![4.0, -3.0, 1.0]).unwrap(), vec![0.75, -0.25, 0.5]).unwrap(),
        ),
    ]
}

fn complex_poly() -> FixedPointHandle {
    let z = ComplexOrder::from_parts(PI, 1.0).unwrap();
    make_fractal_complex_poly(z, vec![0.75, -0.5], Partition::standard_arctan_shift()).unwrap()
}

fn complex_exp() -> FixedPointHandle {
    let z = ComplexOrder::from_parts(SQRT_2, 1.0).unwrap();
    make_fractal_complex_exp(z, 1.0, vec![0.75, -0.5], Partition::standard_arctan_shift()).unwrap()
}

#[test]
fn knots_keep_seed_values() {
    for (name, h) in bounded_reference_families() {
        let n = h.system().partition().maps();
        for m in 0..=n {
            let x = m as f64;
            let d = (h.eval(x) - h.system().seed(x)).norm();
            assert!(d <= TOL, "{name} at {m}: {d:e}");
        }
    }
}

#[test]
fn unbounded_fixed_points_vanish_at_zero_and_match_at_one() {
    for h in [complex_poly(), complex_exp()] {
        assert_eq!(h.eval(0.0), Complex64::new(0.0, 0.0));
        assert!((h.eval(1.0) - h.system().seed(1.0)).norm() <= TOL);
    }
    let z = ComplexOrder::from_parts(PI, 1.0).unwrap();
    assert!((complex_poly().eval(1.0) - eval_complex(z, 1.0).unwrap()).norm() <= TOL);
}

#[test]
fn unbounded_fixed_points_decay() {
    for h in [complex_poly(), complex_exp()] {
        let alpha = h.system().scaling().max_abs();
        for x in [10.0, 20.0, 40.0] {
            // sup of the seed over [x/2, ∞), sampled.
            let seed_tail = (0..2000)
                .map(|k| h.system().seed(x / 2.0 + k as f64 * 0.05).norm())
                .fold(0.0, f64::max);
            let v = h.eval(x).norm();
            assert!(v <= seed_tail / (1.0 - alpha) + 2.0 * TOL, "x = {x}: {v:e}");
        }
        assert!(h.eval(40.0).norm() < h.eval(10.0).norm());
    }
}

#[test]
fn residual_of_every_reference_family_is_within_three_tolerances() {
    let xs_bounded = |n: usize| (0..200).map(|k| n as f64 * ((k as f64 * 0.618_033_988_7) % 1.0)).collect::<Vec<_>>();
    for (name, h) in bounded_reference_families() {
        let n = h.system().partition().maps();
        let r = residual(&h, &xs_bounded(n), TOL);
        assert!(r <= 3.0 * TOL, "{name}: {r:e}");
    }
    let xs: Vec<f64> = (0..200).map(|k| 10.0 * ((k as f64 * 0.414_213_562_3) % 1.0)).collect();
    for h in [complex_poly(), complex_exp()] {
        let r = residual(&h, &xs, TOL);
        assert!(r <= 3.0 * TOL, "{r:e}");
    }
}

#[test]
fn pointwise_evaluator_agrees_with_grid_iteration() {
    for (name, h) in bounded_reference_families() {
        let fp = fixed_point_grid(h.system(), 256, 1e-10, 2000).unwrap();
        assert!(fp.values.len() >= 513);
        let worst = fp
            .values
            .iter()
            .map(|(x, v)| (h.eval(x) - v).norm())
            .fold(0.0, f64::max);
        assert!(worst <= TOL + 1e-10, "{name}: {worst:e}");
    }
}

#[test]
fn observed_rate_tracks_largest_scaling() {
    for (name, h) in bounded_reference_families() {
        let alpha = h.system().scaling().max_abs();
        let fp = fixed_point_grid(h.system(), 256, 1e-10, 2000).unwrap();
        assert!(
            fp.observed_rate >= alpha - 0.1 && fp.observed_rate <= alpha + 0.05,
            "{name}: {} vs {alpha}",
            fp.observed_rate
        );
    }
}

#[test]
fn zero_scaling_recovers_every_seed() {
    let hs = vec![
        make_fractal_poly(3, vec![0.0; 3]).unwrap(),
        make_fractal_exp(RateTuple::new(vec![4.0, -3.0, 1.0]).unwrap(), vec![0.0; 3]).unwrap(),
        make_fractal_complex_poly(
            ComplexOrder::from_parts(PI, 1.0).unwrap(),
            vec![0.0, 0.0],
            Partition::standard_arctan_shift(),
        )
        .unwrap(),
        make_fractal_complex_exp(
            ComplexOrder::from_parts(SQRT_2, 1.0).unwrap(),
            1.0,
            vec![0.0, 0.0],
            Partition::standard_arctan_shift(),
        )
        .unwrap(),
    ];
    for h in hs {
        for k in 0..=100 {
            let x = 0.029 * k as f64;
            assert!((h.eval(x) - h.system().seed(x)).norm() <= TOL);
        }
    }
}

fn hat_system(a: f64, b: f64) -> RBSystem {
    let seed: Evaluator = Arc::new(|x: f64| Complex64::new(1.0 - (x - 1.0).abs(), 0.0));
    RBSystem::new(seed, ScalingVector::new(vec![a, b]).unwrap(), Partition::bounded(2).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_contracts_in_sup_norm(a in -0.95f64..0.95, b in -0.95f64..0.95,
                                      c1 in proptest::collection::vec(-1.0f64..1.0, 33),
                                      c2 in proptest::collection::vec(-1.0f64..1.0, 33)) {
        let sys = hat_system(a, b);
        let g1 = SampledFunction::new(0.0, 1.0 / 16.0, c1.iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap();
        let g2 = SampledFunction::new(0.0, 1.0 / 16.0, c2.iter().map(|&v| Complex64::new(0.0, v)).collect()).unwrap();
        let d_in = g1.sup_distance(&g2).unwrap();
        let d_out = rb_apply(&sys, &g1).unwrap().sup_distance(&rb_apply(&sys, &g2).unwrap()).unwrap();
        prop_assert!(d_out <= a.abs().max(b.abs()) * d_in + 1e-15);
    }

    #[test]
    fn residual_is_small_for_random_scalings(a in -0.9f64..0.9, b in -0.9f64..0.9, x in 0.0f64..2.0) {
        let h = FixedPointHandle::new(hat_system(a, b), TOL);
        prop_assert!(h.residual_at(x, TOL) <= 3.0 * TOL);
    }
}
