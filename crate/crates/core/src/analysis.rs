//! Verification studies. Each returns a [`StudyReport`] that serializes to JSON.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bspline::{eval_integer, ComplexBSpline, ComplexOrder, IntegerOrder};
use crate::error::{Result, SplineError};
use crate::family::Family;
use crate::fourier::{ft_bspline_complex, tail_bound, Decay};
use crate::quadrature::{integer_breakpoints, integrate, integrate_real, QuadOptions};
use crate::selfref::{
    check_joinup, derivative_growth, fixed_point_grid, residual, rb_apply, FixedPointHandle, Partition,
};

/// Version tag written into every report.
pub const REPORT_VERSION: &str = concat!("splinegen ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub name: String,
    pub inputs: BTreeMap<String, Value>,
    pub metrics: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub version: String,
}

impl StudyReport {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            inputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
            tolerance,
            pass: false,
            seed: None,
            version: REPORT_VERSION.to_string(),
        }
    }

    fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only plain data")
    }
}

fn complex_input(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

/// |∫ f − f̂(0)| for a family, integrating over its support or up to the horizon
/// and bounding the rest by the decay law. f̂(0) is 1 for B-splines.
pub fn integral_check(family: &Family, tol: f64) -> Result<StudyReport> {
    let upper = family.upper();
    let quad_tol = (tol * 1e-2).max(1e-13);
    let q = integrate(|x| family.eval(x), &integer_breakpoints(0.0, upper), QuadOptions::with_tol(quad_tol))?;
    let tail = tail_bound(&|x| family.eval(x), upper, family.decay());
    let expected = family.closed_ft(0.0)?;
    let err = (q.value - expected).norm();

    let mut r = StudyReport::new("integral", tol).input("family", family.label());
    r.metric("integral_re", q.value.re);
    r.metric("integral_im", q.value.im);
    r.metric("expected_re", expected.re);
    r.metric("expected_im", expected.im);
    r.metric("abs_error", err);
    r.metric("quadrature_error", q.error_estimate);
    r.metric("tail_bound", tail);
    r.pass = err <= tol && tail <= tol;
    Ok(r)
}

/// (B_m ∗ B_n)(x) = ∫₀^m B_m(t) B_n(x − t) dt by quadrature, with breakpoints at
/// every kink of the integrand.
pub fn convolve_bsplines(m: IntegerOrder, n: IntegerOrder, x: f64, tol: f64) -> Result<f64> {
    let mut bps = integer_breakpoints(0.0, m.get() as f64);
    for k in 0..=n.get() {
        let t = x - k as f64;
        if t > 0.0 && t < m.get() as f64 {
            bps.push(t);
        }
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let (v, _) = integrate_real(|t| eval_integer(m, t) * eval_integer(n, x - t), &bps, QuadOptions::with_tol(tol))?;
    Ok(v)
}

/// max_x |(B_m ∗ B_n)(x) − B_{m+n}(x)| over 97 evenly spaced points of the support.
pub fn convolution_check(m: usize, n: usize, grid_tol: f64) -> Result<StudyReport> {
    if !(1..=6).contains(&m) || !(1..=6).contains(&n) {
        return Err(SplineError::Precondition(format!("orders must lie in 1..=6, got ({m}, {n})")));
    }
    let (bm, bn, bmn) = (IntegerOrder::new(m)?, IntegerOrder::new(n)?, IntegerOrder::new(m + n)?);
    let end = (m + n) as f64;
    const POINTS: usize = 96;
    let mut worst = 0.0f64;
    for k in 0..=POINTS {
        let x = end * k as f64 / POINTS as f64;
        let conv = convolve_bsplines(bm, bn, x, grid_tol * 1e-3)?;
        worst = worst.max((conv - eval_integer(bmn, x)).abs());
    }
    let mut r = StudyReport::new("convolution", grid_tol).input("m", m).input("n", n);
    r.metric("max_abs_error", worst);
    r.pass = worst <= grid_tol;
    Ok(r)
}

/// sup|B_n − G_n| / sup G_n for the Gaussian G_n with mean n/2 and variance n/12.
pub fn gaussian_distance(n: IntegerOrder) -> f64 {
    let nf = n.get() as f64;
    let var = nf / 12.0;
    let peak = 1.0 / (2.0 * PI * var).sqrt();
    let samples = 400 * n.get();
    let diff = (0..=samples)
        .map(|k| {
            let x = nf * k as f64 / samples as f64;
            let g = peak * (-(x - nf / 2.0).powi(2) / (2.0 * var)).exp();
            (eval_integer(n, x) - g).abs()
        })
        .fold(0.0, f64::max);
    diff / peak
}

/// Relative distances to the limiting Gaussian must decrease strictly along
/// `orders` and end below 0.05.
pub fn gaussian_limit(orders: &[usize]) -> Result<StudyReport> {
    const FINAL_BOUND: f64 = 0.05;
    if orders.is_empty() {
        return Err(SplineError::Precondition("no orders given".into()));
    }
    if let Some(n) = orders.iter().find(|&&n| n < 4) {
        return Err(SplineError::Precondition(format!("order {n} < 4")));
    }
    let dists = orders
        .iter()
        .map(|&n| IntegerOrder::new(n).map(gaussian_distance))
        .collect::<Result<Vec<_>>>()?;
    let mut r = StudyReport::new("gaussian-limit", FINAL_BOUND).input("orders", orders.to_vec());
    for (n, d) in orders.iter().zip(&dists) {
        r.metric(&format!("distance_n{n}"), *d);
    }
    let decreasing = dists.windows(2).all(|w| w[1] < w[0]);
    r.metric("strictly_decreasing", if decreasing { 1.0 } else { 0.0 });
    r.pass = decreasing && *dists.last().unwrap() < FINAL_BOUND;
    Ok(r)
}

/// Values below this are treated as noise when fitting decay.
pub const DECAY_NOISE_FLOOR: f64 = 1e-13;

/// Least-squares slope of log|B_z(x)| against log x.
pub fn decay_exponent(z: ComplexOrder, xs: &[f64]) -> Result<StudyReport> {
    let spline = ComplexBSpline::new(z)?;
    if xs.len() < 5 {
        return Err(SplineError::Precondition(format!("need at least 5 points, got {}", xs.len())));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) || xs[0] <= 0.0 || *xs.last().unwrap() > spline.horizon() {
        return Err(SplineError::Precondition(format!(
            "points must increase within (0, {}]",
            spline.horizon()
        )));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| (x, spline.eval(x).norm()))
        .filter(|&(_, v)| v > DECAY_NOISE_FLOOR)
        .map(|(x, v)| (x.ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(SplineError::TooFewDecayPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    let slope = sxy / sxx;
    let bound = -(z.re() + 1.0) + 0.5;

    let mut r = StudyReport::new("decay", 0.5)
        .input("z", complex_input(z.get()))
        .input("xs", xs.to_vec());
    r.metric("slope", slope);
    r.metric("slope_bound", bound);
    r.metric("usable_points", n);
    r.pass = slope <= bound;
    Ok(r)
}

/// Periodic cardinal spline interpolant of order `order` for a 1-periodic target
/// on the mesh h = 1/k, collocated at x_i = h(i + order/2).
pub struct PeriodicInterpolant {
    order: IntegerOrder,
    cells: usize,
    coeffs: Vec<f64>,
}

impl PeriodicInterpolant {
    pub fn new(order: IntegerOrder, cells: usize, target: impl Fn(f64) -> f64) -> Result<Self> {
        if cells < order.get() {
            return Err(SplineError::Precondition(format!(
                "{cells} cells cannot carry a periodic spline of order {}",
                order.get()
            )));
        }
        let h = 1.0 / cells as f64;
        let half = order.get() as f64 / 2.0;
        // Row i, column k: Σ_p B(i + N/2 − k + pK), a circulant matrix.
        let symbol: Vec<f64> = (0..cells)
            .map(|d| {
                let mut s = 0.0;
                let mut t = d as f64 + half;
                while t > 0.0 {
                    s += eval_integer(order, t);
                    t -= cells as f64;
                }
                s
            })
            .collect();
        let a = DMatrix::from_fn(cells, cells, |i, k| symbol[(i + cells - k) % cells]);
        let rhs = DVector::from_fn(cells, |i, _| target(h * (i as f64 + half)));
        let coeffs = a.lu().solve(&rhs).ok_or(SplineError::SingularSystem)?;
        Ok(Self {
            order,
            cells,
            coeffs: coeffs.iter().copied().collect(),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.cells as f64;
        let u = (x - x.floor()) * k;
        let n = self.order.get();
        let base = u.floor() as i64;
        (0..n as i64)
            .map(|d| {
                let j = base - d;
                let c = self.coeffs[j.rem_euclid(self.cells as i64) as usize];
                c * eval_integer(self.order, u - j as f64)
            })
            .sum()
    }
}

/// Empirical order log₂(e(h)/e(h/2)) of periodic cardinal interpolation on halving
/// meshes; passes when the finest pair is within 0.3 of `order`.
pub fn interpolation_order(order: usize, target: impl Fn(f64) -> f64, meshes: &[usize]) -> Result<StudyReport> {
    const ORDER_SLACK: f64 = 0.3;
    if !(2..=4).contains(&order) {
        return Err(SplineError::Precondition(format!("order must be 2, 3 or 4, got {order}")));
    }
    if meshes.len() < 2 || meshes.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(SplineError::Precondition("meshes must halve: 1/k, 1/2k, …".into()));
    }
    let n = IntegerOrder::new(order)?;
    let mut errors = Vec::with_capacity(meshes.len());
    for &cells in meshes {
        let s = PeriodicInterpolant::new(n, cells, &target)?;
        let samples = 32 * cells;
        let e = (0..samples)
            .map(|k| {
                let x = (k as f64 + 0.37) / samples as f64;
                (s.eval(x) - target(x)).abs()
            })
            .fold(0.0, f64::max);
        errors.push(e);
    }
    let mut r = StudyReport::new("interp-order", ORDER_SLACK)
        .input("order", order)
        .input("meshes", meshes.iter().map(|k| format!("1/{k}")).collect::<Vec<_>>());
    for (k, e) in meshes.iter().zip(&errors) {
        r.metric(&format!("error_h1/{k}"), *e);
    }
    let rates: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    for (k, p) in meshes[1..].iter().zip(&rates) {
        r.metric(&format!("order_h1/{k}"), *p);
    }
    let finest = *rates.last().unwrap();
    r.metric("empirical_order", finest);
    r.pass = (finest - order as f64).abs() <= ORDER_SLACK;
    Ok(r)
}

/// Upper bound on Σ_{|k|>K} |B̂_z(ω + 2πk)|² for ω ∈ [0, 2π), from
/// |Ω(ω)| ≤ 2/|ω| and a modulation factor at most e^{π|Im z|}.
pub fn riesz_tail(z: ComplexOrder, k: usize) -> f64 {
    let p = 2.0 * z.re();
    let kf = k as f64;
    let sum = kf.powf(-p) + kf.powf(1.0 - p) / (p - 1.0);
    2.0 * (2.0 * PI * z.im().abs()).exp() * PI.powf(-p) * sum
}

/// Σ_k B_{2n}(n + k) e^{−ikω}: the exact symbol Σ_k |B̂_n(ω + 2πk)|².
pub fn integer_riesz_symbol(n: IntegerOrder, omega: f64) -> f64 {
    let b2n = IntegerOrder::new(2 * n.get()).expect("2n ≥ 1");
    let nf = n.get() as i64;
    (-nf..=nf)
        .map(|k| eval_integer(b2n, (nf + k) as f64) * (k as f64 * omega).cos())
        .sum()
}

/// A = min, B = max of Σ_{|k|≤K} |B̂_z(ω + 2πk)|² over `omegas`.
pub fn riesz_bounds(z: ComplexOrder, omegas: &[f64], k: usize) -> Result<StudyReport> {
    if k < 50 {
        return Err(SplineError::Precondition(format!("K = {k} < 50")));
    }
    if omegas.is_empty() || omegas.iter().any(|w| !(0.0..2.0 * PI).contains(w)) {
        return Err(SplineError::Precondition("ω grid must be a non-empty subset of [0, 2π)".into()));
    }
    let symbol = |w: f64| -> f64 {
        (-(k as i64)..=k as i64)
            .map(|j| ft_bspline_complex(z, w + 2.0 * PI * j as f64).product().norm_sqr())
            .sum()
    };
    let values: Vec<f64> = omegas.iter().map(|&w| symbol(w)).collect();
    let a = values.iter().copied().fold(f64::INFINITY, f64::min);
    let b = values.iter().copied().fold(0.0, f64::max);
    let tail = riesz_tail(z, k);

    let mut r = StudyReport::new("riesz", tail)
        .input("z", complex_input(z.get()))
        .input("K", k)
        .input("omega_points", omegas.len());
    r.metric("A", a);
    r.metric("B", b);
    r.metric("tail_bound", tail);
    let mut pass = a > tail && tail > 0.0 && b.is_finite();
    if let Some(n) = z.as_integer() {
        let n = IntegerOrder::new(n)?;
        let dev = omegas
            .iter()
            .zip(&values)
            .map(|(&w, v)| (v - integer_riesz_symbol(n, w)).abs())
            .fold(0.0, f64::max);
        r.metric("symbol_oracle_deviation", dev);
        pass &= dev <= tail + 1e-12;
    }
    r.pass = pass;
    Ok(r)
}

/// Budget for Σ_{t_j > X} |B_z(t_j)| over unit-spaced t_j, from the decay fit.
fn shift_sum_budget(spline: &ComplexBSpline, cutoff: f64) -> f64 {
    let z = spline.order();
    if let Some(n) = z.as_integer() {
        if cutoff >= n as f64 {
            return 0.0;
        }
    }
    let p = z.re() + 1.0;
    let tail = tail_bound(&|x| spline.eval(x), cutoff, Decay::Power { exponent: p });
    tail * (1.0 + (p - 1.0) / cutoff)
}

/// max over the window of |Σ_{j=lo}^{hi} B_z(x − j) − 1|, against the truncation
/// budget implied by the shifts left out below `lo` and by the horizon.
pub fn partition_of_unity(z: ComplexOrder, window: (f64, f64), shifts: (i64, i64)) -> Result<StudyReport> {
    const MIN_MARGIN: f64 = 8.0;
    let spline = ComplexBSpline::new(z)?;
    let (x0, x1) = window;
    let (lo, hi) = shifts;
    if !(x1 >= x0) || x1 > hi as f64 {
        return Err(SplineError::Precondition(format!(
            "window [{x0}, {x1}] must end before the last shift {hi}"
        )));
    }
    let cutoff = (x0 - lo as f64).min(spline.horizon());
    if cutoff < MIN_MARGIN {
        return Err(SplineError::Precondition(format!(
            "window starts {cutoff} after the first shift; need {MIN_MARGIN}"
        )));
    }
    const POINTS: usize = 200;
    let worst = (0..=POINTS)
        .map(|i| {
            let x = x0 + (x1 - x0) * (i as f64 + 0.5) / (POINTS as f64 + 1.0);
            let s: Complex64 = (lo..=hi).map(|j| spline.eval(x - j as f64)).sum();
            (s - 1.0).norm()
        })
        .fold(0.0, f64::max);
    let budget = shift_sum_budget(&spline, cutoff);
    let mut r = StudyReport::new("partition-unity", budget + 1e-6)
        .input("z", complex_input(z.get()))
        .input("window", vec![x0, x1])
        .input("shifts", vec![lo, hi]);
    r.metric("max_deviation", worst);
    r.metric("truncation_budget", budget);
    r.pass = worst <= budget + 1e-6;
    Ok(r)
}

/// Evaluation points for residual checks: `count` uniform draws from [0, N] or,
/// on [0, ∞), from [0, `unbounded_extent`].
pub fn random_points(partition: &Partition, count: usize, seed: u64, unbounded_extent: f64) -> Vec<f64> {
    let end = partition.domain_end().unwrap_or(unbounded_extent);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0.0..=end)).collect()
}

/// Self-referential residual at `count` random points; passes at ≤ 3·tol.
pub fn residual_study(handle: &FixedPointHandle, count: usize, seed: u64, tol: f64) -> Result<StudyReport> {
    if !(tol > 0.0) {
        return Err(SplineError::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let xs = random_points(handle.system().partition(), count, seed, 10.0);
    let res = residual(handle, &xs, tol);
    let mut r = StudyReport::new("residual", 3.0 * tol)
        .input("points", count)
        .input("alphas", handle.system().scaling().as_slice().to_vec())
        .input("eval_tol", tol);
    r.seed = Some(seed);
    r.metric("max_residual", res);
    r.metric("fixed_point_bound", handle.system().fixed_point_bound());
    r.pass = res <= 3.0 * tol;
    Ok(r)
}

/// Grid iteration on [0, N] with M points per unit; the observed ratio must lie
/// in [α − 0.1, α + 0.05] for α = max|α_n|.
pub fn contraction_study(handle: &FixedPointHandle, per_unit: usize, tol: f64, max_iter: usize) -> Result<StudyReport> {
    let sys = handle.system();
    let fp = fixed_point_grid(sys, per_unit, tol, max_iter)?;
    let alpha = sys.scaling().max_abs();
    let mut r = StudyReport::new("contraction", 0.1)
        .input("alphas", sys.scaling().as_slice().to_vec())
        .input("per_unit", per_unit)
        .input("grid_tol", tol);
    r.metric("alpha", alpha);
    r.metric("observed_rate", fp.observed_rate);
    r.metric("iterations", fp.iterations as f64);
    r.metric("last_step", fp.last_step);
    r.pass = fp.observed_rate >= alpha - 0.1 && fp.observed_rate <= alpha + 0.05;
    Ok(r)
}

/// Join-up of T g_k at the interior knots for the first iterates g_0 = f, g_1, …,
/// measured at M and 2M points per unit.
///
/// Order 0 must match to `tol`. A derivative mismatch passes when it is at
/// rounding level or shrinks by at least 0.6 under the grid refinement, so that it
/// is stencil error rather than a jump. The growth of max|g_k'| is reported as well.
pub fn joinup_study(
    handle: &FixedPointHandle,
    per_unit: usize,
    iterations: usize,
    max_order: usize,
    tol: f64,
) -> Result<StudyReport> {
    const REFINEMENT_RATIO: f64 = 0.6;
    let sys = handle.system();
    let maps = match sys.partition() {
        Partition::BoundedUniform { maps } => *maps,
        _ => return Err(SplineError::WrongPartition { expected: "bounded" }),
    };
    let mut worst = [vec![0.0f64; max_order + 1], vec![0.0f64; max_order + 1]];
    let mut scale = 0.0f64;
    for (level, m) in [per_unit, 2 * per_unit].into_iter().enumerate() {
        let h = 1.0 / m as f64;
        let mut g = crate::grid::SampledFunction::new(
            0.0,
            h,
            (0..=maps * m).map(|k| sys.seed(k as f64 * h)).collect(),
        )?;
        for _ in 0..=iterations {
            let report = check_joinup(sys, &g, max_order)?;
            for (nu, w) in worst[level].iter_mut().enumerate() {
                *w = w.max(report.max_mismatch(nu));
            }
            scale = scale.max(g.sup_norm());
            g = rb_apply(sys, &g)?;
        }
    }
    let growth = derivative_growth(sys, per_unit, iterations.max(1) * 4)?;

    let mut r = StudyReport::new("joinup", tol)
        .input("alphas", sys.scaling().as_slice().to_vec())
        .input("per_unit", per_unit)
        .input("iterations", iterations)
        .input("max_order", max_order)
        .input("smoothness_regime", sys.check_smoothness_regime().is_ok());
    let mut pass = worst[0][0] <= tol && worst[1][0] <= tol;
    r.metric("mismatch_order0", worst[1][0]);
    for nu in 1..=max_order {
        let coarse = worst[0][nu];
        let fine = worst[1][nu];
        let h = 1.0 / (2 * per_unit) as f64;
        let rounding = 1e-12 * (1.0 + scale) / h.powi(nu as i32);
        r.metric(&format!("mismatch_order{nu}"), fine);
        r.metric(&format!("mismatch_order{nu}_coarse"), coarse);
        pass &= fine <= rounding || fine <= REFINEMENT_RATIO * coarse;
    }
    r.metric("derivative_growth", growth.last().unwrap() / growth[0].max(f64::MIN_POSITIVE));
    r.pass = pass;
    Ok(r)
}
