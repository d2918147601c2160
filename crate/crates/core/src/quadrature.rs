//! Globally adaptive Simpson quadrature for complex-valued integrands.
//!
//! Each panel carries a five-point Simpson pair (whole panel and its two halves);
//! the difference of the two gives a Richardson error estimate. The panel with the
//! largest estimate is bisected until the summed estimate drops below the target.
//! Bisecting only the worst panel keeps algebraic endpoint singularities such as
//! (x − k)^{z−1} with Re z < 2 cheap.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Result, SplineError};

/// Tuning knobs for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Target for the summed error estimate.
    pub tol: f64,
    /// Each breakpoint interval starts out split into `2^min_depth` panels.
    pub min_depth: u32,
    /// No panel is bisected below `2^-max_depth` of its breakpoint interval.
    pub max_depth: u32,
    /// Cap on the total number of panels.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            min_depth: 3,
            max_depth: 48,
            max_panels: 400_000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    // f at a, a + h/4, a + h/2, a + 3h/4, b
    f: [Complex64; 5],
    estimate: Complex64,
    error: f64,
}

impl Panel {
    fn new(a: f64, b: f64, depth: u32, f: [Complex64; 5]) -> Self {
        let h = b - a;
        let whole = (f[0] + 4.0 * f[2] + f[4]) * (h / 6.0);
        let halves = (f[0] + 4.0 * f[1] + 2.0 * f[2] + 4.0 * f[3] + f[4]) * (h / 12.0);
        let diff = halves - whole;
        Self {
            a,
            b,
            depth,
            f,
            estimate: halves + diff / 15.0,
            error: diff.norm() / 15.0,
        }
    }

    fn split<F: Fn(f64) -> Complex64>(&self, f: &F) -> (Panel, Panel) {
        let h = self.b - self.a;
        let m = self.a + 0.5 * h;
        let left = [
            self.f[0],
            f(self.a + 0.125 * h),
            self.f[1],
            f(self.a + 0.375 * h),
            self.f[2],
        ];
        let right = [
            self.f[2],
            f(self.a + 0.625 * h),
            self.f[3],
            f(self.a + 0.875 * h),
            self.f[4],
        ];
        (
            Panel::new(self.a, m, self.depth + 1, left),
            Panel::new(m, self.b, self.depth + 1, right),
        )
    }
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.0.error.total_cmp(&other.0.error) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

fn fresh_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let h = b - a;
    let vals = [
        f(a),
        f(a + 0.25 * h),
        f(a + 0.5 * h),
        f(a + 0.75 * h),
        f(b),
    ];
    Panel::new(a, b, depth, vals)
}

/// ∫ f over [breakpoints[0], breakpoints[last]], with panels never straddling a
/// breakpoint. Put kinks and knots of the integrand in `breakpoints`.
pub fn integrate<F>(f: F, breakpoints: &[f64], opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if breakpoints.len() < 2 {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let pieces = 1usize << opts.min_depth;
        let h = (b - a) / pieces as f64;
        for i in 0..pieces {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == pieces { b } else { lo + h };
            heap.push(ByError(fresh_panel(&f, lo, hi, opts.min_depth)));
        }
    }
    let mut total_error: f64 = heap.iter().map(|p| p.0.error).sum();
    loop {
        if total_error <= opts.tol {
            break;
        }
        let Some(ByError(worst)) = heap.pop() else {
            break;
        };
        if worst.depth >= opts.max_depth || heap.len() + 2 > opts.max_panels {
            return Err(SplineError::QuadratureNonConvergence {
                a: worst.a,
                b: worst.b,
                depth: worst.depth as usize,
            });
        }
        let (l, r) = worst.split(&f);
        total_error += l.error + r.error - worst.error;
        heap.push(ByError(l));
        heap.push(ByError(r));
        // Periodically resum to shed drift from the incremental updates.
        if heap.len() % 4096 == 0 {
            total_error = heap.iter().map(|p| p.0.error).sum();
        }
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|p| p.0).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut re = crate::special::KahanSum::default();
    let mut im = crate::special::KahanSum::default();
    let mut err = 0.0;
    for p in &panels {
        re.add(p.estimate.re);
        im.add(p.estimate.im);
        err += p.error;
    }
    Ok(QuadResult {
        value: Complex64::new(re.value(), im.value()),
        error_estimate: err,
        panels: panels.len(),
    })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, breakpoints: &[f64], opts: QuadOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let r = integrate(|x| Complex64::new(f(x), 0.0), breakpoints, opts)?;
    Ok((r.value.re, r.error_estimate))
}

/// Breakpoints `lo, ⌈lo⌉, …, ⌊hi⌋, hi` (integer knots inside the range).
pub fn integer_breakpoints(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut k = lo.floor() + 1.0;
    while k < hi {
        if k > lo {
            pts.push(k);
        }
        k += 1.0;
    }
    pts.push(hi);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate_real(|x| 3.0 * x * x, &[0.0, 2.0], QuadOptions::default()).unwrap();
        assert!((v - 8.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_complex() {
        // ∫₀¹ e^{-iωx} dx = (1 - e^{-iω}) / (iω)
        let w = 37.0;
        let r = integrate(
            |x| Complex64::new(0.0, -w * x).exp(),
            &[0.0, 1.0],
            QuadOptions::with_tol(1e-12),
        )
        .unwrap();
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -w).exp()) / Complex64::new(0.0, w);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{0.4} dx = 1/1.4
        let (v, _) = integrate_real(|x| x.powf(0.4), &[0.0, 1.0], QuadOptions::with_tol(1e-12)).unwrap();
        assert!((v - 1.0 / 1.4).abs() < 1e-11);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            tol: 1e-14,
            max_depth: 6,
            ..QuadOptions::default()
        };
        let r = integrate_real(|x| (1.0 / x).sin(), &[1e-6, 1.0], opts);
        assert!(matches!(r, Err(SplineError::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn breakpoints_include_integers() {
        assert_eq!(integer_breakpoints(0.25, 3.0), vec![0.25, 1.0, 2.0, 3.0]);
        assert_eq!(integer_breakpoints(0.0, 2.5), vec![0.0, 1.0, 2.0, 2.5]);
        assert_eq!(integer_breakpoints(0.2, 0.7), vec![0.2, 0.7]);
    }
}
