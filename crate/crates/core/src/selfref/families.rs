use std::sync::Arc;

use num_complex::Complex64;

use super::{Evaluator, FixedPointHandle, Partition, RBSystem, ScalingVector, DEFAULT_EVAL_TOL};
use crate::bspline::{eval_integer, ComplexBSpline, ComplexOrder, IntegerOrder};
use crate::error::{Result, SplineError};
use crate::expspline::{build_integer, ComplexExpBSpline, RateTuple};

fn require_unbounded(partition: &Partition) -> Result<()> {
    if partition.is_bounded() {
        return Err(SplineError::WrongPartition { expected: "unbounded" });
    }
    Ok(())
}

fn handle(seed: Evaluator, alphas: Vec<f64>, partition: Partition) -> Result<FixedPointHandle> {
    let system = RBSystem::new(seed, ScalingVector::new(alphas)?, partition)?;
    Ok(FixedPointHandle::new(system, DEFAULT_EVAL_TOL))
}

/// 𝔅_N(α): seed B_N on [0, N] with N maps.
pub fn make_fractal_poly(n: usize, alphas: Vec<f64>) -> Result<FixedPointHandle> {
    let order = IntegerOrder::new(n)?;
    let partition = Partition::bounded(n)?;
    let seed: Evaluator = Arc::new(move |x| Complex64::new(eval_integer(order, x), 0.0));
    handle(seed, alphas, partition)
}

/// [`make_fractal_poly`] restricted to |α_n|·N^{N−2} < 1, where the fixed point
/// inherits the C^{N−2} smoothness of B_N.
pub fn make_fractal_poly_smooth(n: usize, alphas: Vec<f64>) -> Result<FixedPointHandle> {
    let h = make_fractal_poly(n, alphas)?;
    h.system().check_smoothness_regime()?;
    Ok(h)
}

/// 𝔈_{N,a}(α): seed E_{N,a} on [0, N], N = number of rates.
pub fn make_fractal_exp(rates: RateTuple, alphas: Vec<f64>) -> Result<FixedPointHandle> {
    let partition = Partition::bounded(rates.len())?;
    let spline = build_integer(&rates);
    let seed: Evaluator = Arc::new(move |x| Complex64::new(spline.eval(x), 0.0));
    handle(seed, alphas, partition)
}

/// 𝔅_z(α) on [0, ∞).
pub fn make_fractal_complex_poly(z: ComplexOrder, alphas: Vec<f64>, partition: Partition) -> Result<FixedPointHandle> {
    require_unbounded(&partition)?;
    let spline = ComplexBSpline::new(z)?;
    let seed: Evaluator = Arc::new(move |x| spline.eval(x));
    handle(seed, alphas, partition)
}

/// 𝔈_{z,a}(α) on [0, ∞).
pub fn make_fractal_complex_exp(
    z: ComplexOrder,
    rate: f64,
    alphas: Vec<f64>,
    partition: Partition,
) -> Result<FixedPointHandle> {
    require_unbounded(&partition)?;
    let spline = ComplexExpBSpline::new(z, rate)?;
    let seed: Evaluator = Arc::new(move |x| spline.eval(x));
    handle(seed, alphas, partition)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_fractal_keeps_knot_values() {
        let h = make_fractal_poly(2, vec![0.75, 0.75]).unwrap();
        assert!(h.eval(0.0).norm() < 1e-15);
        assert!((h.eval(1.0) - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(h.eval(2.0).norm() < 1e-8);
    }

    #[test]
    fn complex_families_need_unbounded_partition() {
        let z = ComplexOrder::from_parts(std::f64::consts::PI, 1.0).unwrap();
        let r = make_fractal_complex_poly(z, vec![0.75, -0.5], Partition::bounded(2).unwrap());
        assert!(matches!(r, Err(SplineError::WrongPartition { .. })));
        let r = make_fractal_complex_exp(z, 1.0, vec![0.75, -0.5], Partition::bounded(2).unwrap());
        assert!(matches!(r, Err(SplineError::WrongPartition { .. })));
    }

    #[test]
    fn smooth_variant_checks_regime() {
        assert!(make_fractal_poly_smooth(3, vec![0.25; 3]).is_ok());
        assert!(make_fractal_poly_smooth(3, vec![0.5; 3]).is_err());
        assert!(make_fractal_poly(3, vec![0.5; 3]).is_ok());
    }

    #[test]
    fn scaling_length_must_match() {
        assert!(make_fractal_poly(3, vec![0.25; 2]).is_err());
        assert!(make_fractal_exp(RateTuple::new(vec![2.0, -2.0]).unwrap(), vec![0.25; 3]).is_err());
    }
}
