//! Read–Bajraktarević operators and their fixed points.
//!
//! On each cell L_n(I) of a partition the operator acts as
//!
//! ```text
//! (Tg)(x) = f(x) + α_n · (g − b)(L_n^{-1}(x))
//! ```
//!
//! with seed f, base b and scaling vector α, max|α_n| < 1. Its unique fixed point
//! f* is the self-referential function. Bounded partitions support grid-based
//! Banach iteration ([`fixed_point_grid`]); every partition supports the pointwise
//! evaluator ([`FixedPointHandle::eval`]), which unrolls the self-referential
//! equation along the orbit of x.
//!
//! Values are complex throughout; real seeds simply carry a zero imaginary part.

mod families;
mod grid_iter;
mod partition;
mod pointwise;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SplineError};

pub use families::{
    make_fractal_complex_exp, make_fractal_complex_poly, make_fractal_exp, make_fractal_poly,
    make_fractal_poly_smooth,
};
pub use grid_iter::{
    check_joinup, derivative_growth, fixed_point_grid, rb_apply, GridFixedPoint, JoinupEntry, JoinupReport,
};
pub use partition::Partition;
pub use pointwise::{eval_fixed_point, residual, FixedPointHandle, DEFAULT_EVAL_TOL};

/// A shareable real-to-complex function.
pub type Evaluator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Vertical scaling factors α_1, …, α_N with max|α_n| < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingVector(Vec<f64>);

impl ScalingVector {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(SplineError::InvalidScaling("empty".into()));
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_finite() || a.abs() >= 1.0) {
            return Err(SplineError::InvalidScaling(format!("|α| must be < 1, got {a}")));
        }
        Ok(Self(alphas))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// max|α_n|, the Lipschitz constant of the operator.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

/// Seed, base, scaling vector and partition of an RB operator.
#[derive(Clone)]
pub struct RBSystem {
    seed: Evaluator,
    base: Option<Evaluator>,
    scaling: ScalingVector,
    partition: Partition,
    seed_sup: f64,
    base_sup: f64,
}

impl fmt::Debug for RBSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RBSystem")
            .field("scaling", &self.scaling)
            .field("partition", &self.partition)
            .field("has_base", &self.base.is_some())
            .field("seed_sup", &self.seed_sup)
            .finish()
    }
}

/// Where sup|f| is sampled on [0, ∞).
const UNBOUNDED_SUP_WINDOW: f64 = 60.0;
const SUP_SAMPLES_PER_UNIT: usize = 256;
/// Margin over the sampled maximum.
const SUP_MARGIN: f64 = 1.05;
/// Seeds on [0, ∞) must satisfy |f(0)| ≤ this and |f(x)| ≤ this far out.
const C00_TOLERANCE: f64 = 1e-12;
const C00_FAR_POINT: f64 = 1e7;

impl RBSystem {
    /// System with base b ≡ 0.
    pub fn new(seed: Evaluator, scaling: ScalingVector, partition: Partition) -> Result<Self> {
        if scaling.len() != partition.maps() {
            return Err(SplineError::InvalidScaling(format!(
                "{} factors for {} maps",
                scaling.len(),
                partition.maps()
            )));
        }
        if !partition.is_bounded() {
            let at_zero = seed(0.0).norm();
            let far = seed(C00_FAR_POINT).norm();
            if at_zero > C00_TOLERANCE || far > C00_TOLERANCE {
                return Err(SplineError::Precondition(format!(
                    "seed must vanish at 0 and at infinity (|f(0)| = {at_zero:e}, |f({C00_FAR_POINT:e})| = {far:e})"
                )));
            }
        }
        let seed_sup = estimate_sup(&seed, &partition);
        Ok(Self {
            seed,
            base: None,
            scaling,
            partition,
            seed_sup,
            base_sup: 0.0,
        })
    }

    pub fn with_base(mut self, base: Evaluator) -> Self {
        self.base_sup = estimate_sup(&base, &self.partition);
        self.base = Some(base);
        self
    }

    pub fn seed(&self, x: f64) -> Complex64 {
        (self.seed)(x)
    }

    pub fn base(&self, x: f64) -> Complex64 {
        match &self.base {
            Some(b) => b(x),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn has_base(&self) -> bool {
        self.base.is_some()
    }

    pub fn scaling(&self) -> &ScalingVector {
        &self.scaling
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Sampled sup|f| (with margin).
    pub fn seed_sup(&self) -> f64 {
        self.seed_sup
    }

    /// a-priori bound on sup|f*|: (sup|f| + α sup|b|)/(1 − α).
    pub fn fixed_point_bound(&self) -> f64 {
        let a = self.scaling.max_abs();
        (self.seed_sup + a * self.base_sup) / (1.0 - a)
    }

    /// For a bounded partition with N maps: |α_n|·N^{N−2} < 1 for every n. Under
    /// this condition the ν-th derivatives, ν ≤ N − 2, which pick up a factor N^ν
    /// through L_n^{-1}, still contract.
    pub fn check_smoothness_regime(&self) -> Result<()> {
        let Partition::BoundedUniform { maps } = self.partition else {
            return Err(SplineError::WrongPartition { expected: "bounded" });
        };
        let gain = (maps as f64).powi(maps as i32 - 2);
        match self.scaling.as_slice().iter().find(|a| a.abs() * gain >= 1.0) {
            Some(a) => Err(SplineError::InvalidScaling(format!(
                "|α|·N^(N−2) = {} ≥ 1 leaves the smoothness-safe regime",
                a.abs() * gain
            ))),
            None => Ok(()),
        }
    }
}

fn estimate_sup(f: &Evaluator, partition: &Partition) -> f64 {
    let end = partition.domain_end().unwrap_or(UNBOUNDED_SUP_WINDOW);
    let count = (end * SUP_SAMPLES_PER_UNIT as f64).ceil() as usize;
    let max = (0..=count)
        .map(|k| f(end * k as f64 / count as f64).norm())
        .fold(0.0, f64::max);
    max * SUP_MARGIN
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_vector_validation() {
        assert!(ScalingVector::new(vec![0.75, -0.5]).is_ok());
        assert!(ScalingVector::new(vec![1.0, 0.0]).is_err());
        assert!(ScalingVector::new(vec![-1.0]).is_err());
        assert!(ScalingVector::new(vec![]).is_err());
        assert!(ScalingVector::new(vec![f64::NAN]).is_err());
        assert_eq!(ScalingVector::new(vec![0.25, -0.75]).unwrap().max_abs(), 0.75);
    }

    #[test]
    fn system_rejects_mismatched_lengths() {
        let seed: Evaluator = Arc::new(|_| Complex64::new(0.0, 0.0));
        let r = RBSystem::new(seed, ScalingVector::zeros(3), Partition::bounded(2).unwrap());
        assert!(r.is_err());
    }

    #[test]
    fn unbounded_seed_must_vanish_at_zero() {
        let seed: Evaluator = Arc::new(|x| Complex64::new((-x).exp(), 0.0));
        let r = RBSystem::new(seed, ScalingVector::zeros(2), Partition::standard_arctan_shift());
        assert!(matches!(r, Err(SplineError::Precondition(_))));
    }

    #[test]
    fn smoothness_regime() {
        let seed: Evaluator = Arc::new(|_| Complex64::new(0.0, 0.0));
        let sys = RBSystem::new(
            seed.clone(),
            ScalingVector::new(vec![0.25; 3]).unwrap(),
            Partition::bounded(3).unwrap(),
        )
        .unwrap();
        assert!(sys.check_smoothness_regime().is_ok());
        let sys = RBSystem::new(
            seed,
            ScalingVector::new(vec![0.25, 0.4, 0.25]).unwrap(),
            Partition::bounded(3).unwrap(),
        )
        .unwrap();
        assert!(sys.check_smoothness_regime().is_err());
    }
}
