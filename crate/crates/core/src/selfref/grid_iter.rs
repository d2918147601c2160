use num_complex::Complex64;
use serde::Serialize;

use super::{Partition, RBSystem};
use crate::error::{Result, SplineError};
use crate::grid::SampledFunction;

/// Grid fixed point together with iteration diagnostics.
#[derive(Debug, Clone)]
pub struct GridFixedPoint {
    pub values: SampledFunction,
    /// Largest ratio ‖g_{k+1} − g_k‖/‖g_k − g_{k−1}‖ seen during the iteration.
    pub observed_rate: f64,
    pub iterations: usize,
    pub last_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JoinupEntry {
    pub knot: usize,
    pub order: usize,
    pub left: f64,
    pub right: f64,
    pub mismatch: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct JoinupReport {
    pub entries: Vec<JoinupEntry>,
}

impl JoinupReport {
    /// Largest mismatch at derivative order `order` over all knots.
    pub fn max_mismatch(&self, order: usize) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.order == order)
            .map(|e| e.mismatch)
            .fold(0.0, f64::max)
    }
}

fn bounded_maps(system: &RBSystem) -> Result<usize> {
    match system.partition() {
        Partition::BoundedUniform { maps } => Ok(*maps),
        _ => Err(SplineError::WrongPartition { expected: "bounded" }),
    }
}

/// Points per unit interval of a grid that L_n^{-1} maps into itself.
fn closed_resolution(maps: usize, g: &SampledFunction) -> Result<usize> {
    if g.origin() != 0.0 {
        return Err(SplineError::GridNotClosed(format!("grid must start at 0, starts at {}", g.origin())));
    }
    let per_unit = (1.0 / g.step()).round();
    if per_unit < 1.0 || ((per_unit * g.step()) - 1.0).abs() > 1e-12 {
        return Err(SplineError::GridNotClosed(format!("step {} is not 1/M", g.step())));
    }
    let m = per_unit as usize;
    if g.len() != maps * m + 1 {
        return Err(SplineError::GridNotClosed(format!(
            "{} nodes, expected {} to cover [0, {maps}]",
            g.len(),
            maps * m + 1
        )));
    }
    Ok(m)
}

/// Seed minus scaled base, sampled once per grid: (Tg)_k = f_k + α_i(g_{Nj} − b_{Nj}).
struct GridOperator<'a> {
    system: &'a RBSystem,
    maps: usize,
    per_unit: usize,
    seed: Vec<Complex64>,
    base: Vec<Complex64>,
}

impl<'a> GridOperator<'a> {
    fn new(system: &'a RBSystem, maps: usize, per_unit: usize) -> Self {
        let h = 1.0 / per_unit as f64;
        let n = maps * per_unit + 1;
        let seed = (0..n).map(|k| system.seed(k as f64 * h)).collect();
        let base = if system.has_base() {
            (0..n).map(|k| system.base(k as f64 * h)).collect()
        } else {
            vec![Complex64::new(0.0, 0.0); n]
        };
        Self {
            system,
            maps,
            per_unit,
            seed,
            base,
        }
    }

    fn h(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    /// (Tg) at local node `j` of cell `cell`.
    fn branch(&self, g: &[Complex64], cell: usize, j: usize) -> Complex64 {
        let k = cell * self.per_unit + j;
        let src = self.maps * j;
        self.seed[k] + (g[src] - self.base[src]) * self.system.scaling().get(cell)
    }

    fn apply(&self, g: &[Complex64]) -> Vec<Complex64> {
        (0..g.len())
            .map(|k| {
                let cell = (k / self.per_unit).min(self.maps - 1);
                self.branch(g, cell, k - cell * self.per_unit)
            })
            .collect()
    }
}

/// One application of T on a closed grid: origin 0, step 1/M, N·M + 1 nodes.
pub fn rb_apply(system: &RBSystem, g: &SampledFunction) -> Result<SampledFunction> {
    let maps = bounded_maps(system)?;
    let m = closed_resolution(maps, g)?;
    let op = GridOperator::new(system, maps, m);
    SampledFunction::new(0.0, op.h(), op.apply(g.values()))
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Banach iteration from g₀ = f on the closed grid with M points per unit.
///
/// Stops once ‖g_{k+1} − g_k‖ ≤ tol·(1 − α)/α, which puts g_{k+1} within tol of
/// the fixed point on the grid nodes.
pub fn fixed_point_grid(system: &RBSystem, per_unit: usize, tol: f64, max_iter: usize) -> Result<GridFixedPoint> {
    let maps = bounded_maps(system)?;
    if per_unit == 0 {
        return Err(SplineError::InvalidGrid("need at least one point per unit".into()));
    }
    if !(tol > 0.0) {
        return Err(SplineError::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let op = GridOperator::new(system, maps, per_unit);
    let alpha = system.scaling().max_abs();
    let threshold = if alpha == 0.0 { f64::INFINITY } else { tol * (1.0 - alpha) / alpha };

    let mut g = op.seed.clone();
    let mut prev_step: Option<f64> = None;
    let mut observed_rate = 0.0f64;
    for iter in 1..=max_iter {
        let next = op.apply(&g);
        let step = sup_diff(&next, &g);
        if let Some(p) = prev_step.filter(|&p| p > 0.0) {
            observed_rate = observed_rate.max(step / p);
        }
        g = next;
        if step <= threshold {
            return Ok(GridFixedPoint {
                values: SampledFunction::new(0.0, op.h(), g)?,
                observed_rate,
                iterations: iter,
                last_step: step,
            });
        }
        prev_step = Some(step);
    }
    Err(SplineError::MaxIterExceeded {
        max_iter,
        last_step: prev_step.unwrap_or(f64::NAN),
    })
}

// One-sided 4-point difference weights on nodes 0, h, 2h, 3h for orders 1..=3.
const FORWARD_STENCILS: [[f64; 4]; 3] = [
    [-11.0 / 6.0, 3.0, -1.5, 1.0 / 3.0],
    [2.0, -5.0, 4.0, -1.0],
    [-1.0, 3.0, -3.0, 1.0],
];

/// Compares the two one-sided branches of Tg at every interior knot.
///
/// At knot m the left branch comes from cell m − 1 and the right one from cell m.
/// Order 0 compares the values themselves; orders 1..=`max_order` (at most 3)
/// compare one-sided 4-point differences built from each branch alone.
pub fn check_joinup(system: &RBSystem, g: &SampledFunction, max_order: usize) -> Result<JoinupReport> {
    let maps = bounded_maps(system)?;
    let m = closed_resolution(maps, g)?;
    if max_order > 3 {
        return Err(SplineError::Precondition(format!("derivative order {max_order} > 3")));
    }
    if m < 3 {
        return Err(SplineError::InvalidGrid("need at least 3 points per unit for the stencils".into()));
    }
    let op = GridOperator::new(system, maps, m);
    let h = op.h();
    let vals = g.values();
    let mut entries = Vec::new();
    for knot in 1..maps {
        let left: [f64; 4] = std::array::from_fn(|s| op.branch(vals, knot - 1, m - s).re);
        let right: [f64; 4] = std::array::from_fn(|s| op.branch(vals, knot, s).re);
        let left_im: [f64; 4] = std::array::from_fn(|s| op.branch(vals, knot - 1, m - s).im);
        let right_im: [f64; 4] = std::array::from_fn(|s| op.branch(vals, knot, s).im);
        for order in 0..=max_order {
            let (l, r, mismatch) = if order == 0 {
                let l = Complex64::new(left[0], left_im[0]);
                let r = Complex64::new(right[0], right_im[0]);
                (left[0], right[0], (l - r).norm())
            } else {
                let w = &FORWARD_STENCILS[order - 1];
                let scale = h.powi(order as i32);
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                let dot = |v: &[f64; 4]| w.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / scale;
                let (l, r) = (sign * dot(&left), dot(&right));
                let (li, ri) = (sign * dot(&left_im), dot(&right_im));
                (l, r, Complex64::new(l - r, li - ri).norm())
            };
            entries.push(JoinupEntry {
                knot,
                order,
                left: l,
                right: r,
                mismatch,
            });
        }
    }
    Ok(JoinupReport { entries })
}

/// max_k |g_k(x_{k+1}) − g_k(x_k)|/h over the grid for the first `iterations`
/// Banach iterates g_0 = f, g_1 = Tf, …
pub fn derivative_growth(system: &RBSystem, per_unit: usize, iterations: usize) -> Result<Vec<f64>> {
    let maps = bounded_maps(system)?;
    if per_unit == 0 {
        return Err(SplineError::InvalidGrid("need at least one point per unit".into()));
    }
    let op = GridOperator::new(system, maps, per_unit);
    let h = op.h();
    let slope = |g: &[Complex64]| g.windows(2).map(|w| (w[1] - w[0]).norm() / h).fold(0.0, f64::max);
    let mut g = op.seed.clone();
    let mut out = Vec::with_capacity(iterations + 1);
    out.push(slope(&g));
    for _ in 0..iterations {
        g = op.apply(&g);
        out.push(slope(&g));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::selfref::{Evaluator, ScalingVector};

    fn hat() -> Evaluator {
        Arc::new(|x: f64| Complex64::new(if x <= 1.0 { x.max(0.0) } else { (2.0 - x).max(0.0) }, 0.0))
    }

    fn system(alphas: Vec<f64>) -> RBSystem {
        let n = alphas.len();
        RBSystem::new(hat(), ScalingVector::new(alphas).unwrap(), Partition::bounded(n).unwrap()).unwrap()
    }

    fn sampled(origin: f64, step: f64, len: usize, f: impl Fn(f64) -> Complex64) -> SampledFunction {
        SampledFunction::new(origin, step, (0..len).map(|k| f(origin + k as f64 * step)).collect()).unwrap()
    }

    fn grid(sys: &RBSystem, m: usize) -> SampledFunction {
        let n = sys.partition().maps();
        sampled(0.0, 1.0 / m as f64, n * m + 1, |x| sys.seed(x))
    }

    #[test]
    fn zero_scaling_returns_seed_samples() {
        let sys = system(vec![0.0, 0.0]);
        let g = sampled(0.0, 0.125, 17, |x| Complex64::new(x.sin(), 1.0));
        let out = rb_apply(&sys, &g).unwrap();
        for (k, v) in out.iter() {
            assert_eq!(v, sys.seed(k));
        }
    }

    #[test]
    fn rejects_open_grids() {
        let sys = system(vec![0.5, 0.5]);
        let g = sampled(0.0, 0.3, 8, |_| Complex64::new(0.0, 0.0));
        assert!(matches!(rb_apply(&sys, &g), Err(SplineError::GridNotClosed(_))));
        let g = sampled(0.0, 0.25, 8, |_| Complex64::new(0.0, 0.0));
        assert!(matches!(rb_apply(&sys, &g), Err(SplineError::GridNotClosed(_))));
        let g = sampled(0.5, 0.25, 9, |_| Complex64::new(0.0, 0.0));
        assert!(matches!(rb_apply(&sys, &g), Err(SplineError::GridNotClosed(_))));
    }

    #[test]
    fn seed_is_kept_at_knots() {
        let sys = system(vec![0.75, 0.75]);
        let g = grid(&sys, 16);
        let out = rb_apply(&sys, &g).unwrap();
        for m in 0..=2 {
            assert_eq!(out.values()[16 * m], sys.seed(m as f64));
        }
    }

    #[test]
    fn grid_iteration_converges_and_reports_rate() {
        let sys = system(vec![0.75, 0.75]);
        let fp = fixed_point_grid(&sys, 255, 1e-10, 500).unwrap();
        assert!(fp.last_step <= 1e-10 * 0.25 / 0.75);
        assert!((fp.observed_rate - 0.75).abs() < 0.05, "{}", fp.observed_rate);
        let again = rb_apply(&sys, &fp.values).unwrap();
        assert!(again.sup_distance(&fp.values).unwrap() < 1e-10);
    }

    #[test]
    fn max_iter_is_reported() {
        let sys = system(vec![0.9, 0.9]);
        let r = fixed_point_grid(&sys, 255, 1e-14, 3);
        assert!(matches!(r, Err(SplineError::MaxIterExceeded { max_iter: 3, .. })));
    }

    #[test]
    fn unbounded_partition_is_rejected() {
        let seed: Evaluator = Arc::new(|x: f64| Complex64::new(x * (-x).exp() * 0.0, 0.0));
        let sys = RBSystem::new(seed, ScalingVector::zeros(2), Partition::standard_arctan_shift()).unwrap();
        assert!(matches!(
            fixed_point_grid(&sys, 8, 1e-8, 10),
            Err(SplineError::WrongPartition { .. })
        ));
    }

    #[test]
    fn stencils_are_exact_on_cubics() {
        let h = 0.1;
        let p = |x: f64| 1.0 + 2.0 * x - 3.0 * x * x + 0.5 * x.powi(3);
        let v: [f64; 4] = std::array::from_fn(|s| p(s as f64 * h));
        let exact = [2.0, -6.0, 3.0];
        for (order, w) in FORWARD_STENCILS.iter().enumerate() {
            let d: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / h.powi(order as i32 + 1);
            assert!((d - exact[order]).abs() < 1e-9, "order {}: {d}", order + 1);
        }
    }

    #[test]
    fn hat_fixed_point_is_continuous_but_not_smooth() {
        let sys = system(vec![0.5, 0.5]);
        let fp = fixed_point_grid(&sys, 64, 1e-12, 500).unwrap();
        let report = check_joinup(&sys, &fp.values, 1).unwrap();
        assert!(report.max_mismatch(0) < 1e-12);
        // The hat's derivative jumps from +1 to −1 at x = 1.
        assert!(report.max_mismatch(1) > 1.0);
    }

    #[test]
    fn derivatives_blow_up_when_alpha_times_n_exceeds_one() {
        let tame = derivative_growth(&system(vec![0.25, 0.25]), 1024, 8).unwrap();
        let wild = derivative_growth(&system(vec![0.75, 0.75]), 1024, 8).unwrap();
        assert!(tame.last().unwrap() < &2.0);
        assert!(wild.last().unwrap() > &(10.0 * wild[0]));
    }
}
