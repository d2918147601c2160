//! Exponential B-splines.
//!
//! Integer order: E_{N,a} = ε^{a₁} ∗ … ∗ ε^{a_N} with ε^{a}(x) = e^{a x}χ_{[0,1)}(x),
//! built exactly as a piecewise exponential polynomial. Each piece j lives on
//! `[j, j+1)` and is stored in the local coordinate t = x − j, as a sum of terms
//! c·t^m·e^{r t}. Local coordinates keep the coefficients of size e^{|r|} rather
//! than e^{|r|·N}.
//!
//! Complex order: E_{z,a} for Re z > 1, a > 0, evaluated from its alternating
//! time-domain series.

use std::ops::Deref;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bspline::{alternating_coefficients, ComplexOrder, SeriesValue, DEFAULT_HORIZON};
use crate::error::{Result, SplineError};
use crate::special::{power_plus, ComplexKahanSum, KahanSum};

/// Rates closer than this (but not equal) produce large cancelling coefficients.
pub const CONDITIONING_WARN_GAP: f64 = 1e-8;

/// One term c·t^m·e^{r t} of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyTerm {
    pub coeff: f64,
    pub power: u32,
    pub rate: f64,
}

impl ExpPolyTerm {
    fn eval(&self, t: f64) -> f64 {
        self.coeff * t.powi(self.power as i32) * (self.rate * t).exp()
    }
}

/// Piecewise exponential polynomial supported on `[0, order]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseExpPoly {
    order: usize,
    pieces: Vec<Vec<ExpPolyTerm>>,
}

impl PiecewiseExpPoly {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Terms of the piece on `[j, j+1)`, in the local coordinate t = x − j.
    pub fn piece(&self, j: usize) -> &[ExpPolyTerm] {
        &self.pieces[j]
    }

    pub fn term_count(&self) -> usize {
        self.pieces.iter().map(Vec::len).sum()
    }

    /// Value of piece j at local coordinate t (no support test).
    pub fn eval_piece(&self, j: usize, t: f64) -> f64 {
        let mut s = KahanSum::default();
        for term in &self.pieces[j] {
            s.add(term.eval(t));
        }
        s.value()
    }

    /// Supported on `[0, N)`. For N ≥ 2 the spline is continuous, so the value 0 at
    /// x = N is exact rather than the rounding residue of the last piece.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.order as f64;
        if !(x >= 0.0) || x >= n {
            return 0.0;
        }
        let j = x.floor() as usize;
        self.eval_piece(j, x - j as f64)
    }

    /// Distinct rates appearing anywhere in the representation.
    fn rates(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.pieces.iter().flatten().map(|t| t.rate).collect();
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }
}

/// Sorts by (rate, power), merges like terms and drops exact zeros.
fn canonicalize(mut terms: Vec<ExpPolyTerm>) -> Vec<ExpPolyTerm> {
    terms.sort_by(|a, b| a.rate.total_cmp(&b.rate).then(a.power.cmp(&b.power)));
    let mut out: Vec<ExpPolyTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.rate == t.rate && last.power == t.power => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff != 0.0);
    out
}

/// ε^{a}: the single piece e^{a t} on `[0, 1)`.
pub fn exp_kernel(a: f64) -> PiecewiseExpPoly {
    PiecewiseExpPoly {
        order: 1,
        pieces: vec![vec![ExpPolyTerm {
            coeff: 1.0,
            power: 0,
            rate: a,
        }]],
    }
}

/// Antiderivative of c·u^m·e^{d u} as (poly coefficients by power, whether the
/// exponential factor e^{d u} is present). For d = 0 it is c·u^{m+1}/(m+1).
fn antiderivative(coeff: f64, power: u32, d: f64) -> (Vec<(u32, f64)>, bool) {
    if d == 0.0 {
        return (vec![(power + 1, coeff / (power + 1) as f64)], false);
    }
    // ∫ u^m e^{du} = e^{du} Σ_{j=0}^{m} (-1)^j m!/(m-j)! u^{m-j} / d^{j+1}
    let mut out = Vec::with_capacity(power as usize + 1);
    let mut falling = 1.0;
    let mut dpow = d;
    for j in 0..=power {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push((power - j, coeff * sign * falling / dpow));
        falling *= (power - j) as f64;
        dpow *= d;
    }
    (out, true)
}

fn eval_poly(poly: &[(u32, f64)], u: f64) -> f64 {
    poly.iter().map(|&(m, c)| c * u.powi(m as i32)).sum()
}

/// Exact convolution p ∗ ε^{a}.
///
/// On piece i with x = i + t,
/// `(p ∗ ε^a)(x) = e^{at}[G_i(t) − G_i(0)] + e^{a(1+t)}[G_{i−1}(1) − G_{i−1}(t)]`
/// where G_j is an antiderivative of p_j(u)e^{−au}.
pub fn convolve_with_kernel(p: &PiecewiseExpPoly, a: f64) -> PiecewiseExpPoly {
    for r in p.rates() {
        if r != a && (r - a).abs() < CONDITIONING_WARN_GAP {
            warn!("nearly equal exponential rates {r} and {a}: coefficients will cancel heavily");
        }
    }
    let n_out = p.order + 1;
    let mut pieces = Vec::with_capacity(n_out);
    let ea = a.exp();
    for i in 0..n_out {
        let mut terms = Vec::new();
        // current piece: e^{at}[G_i(t) − G_i(0)]
        if i < p.order {
            for term in &p.pieces[i] {
                let d = term.rate - a;
                let (poly, has_exp) = antiderivative(term.coeff, term.power, d);
                let at_zero = eval_poly(&poly, 0.0);
                let out_rate = if has_exp { term.rate } else { a };
                for &(m, c) in &poly {
                    terms.push(ExpPolyTerm {
                        coeff: c,
                        power: m,
                        rate: out_rate,
                    });
                }
                terms.push(ExpPolyTerm {
                    coeff: -at_zero,
                    power: 0,
                    rate: a,
                });
            }
        }
        // previous piece: e^{a}e^{at}[G_{i−1}(1) − G_{i−1}(t)]
        if i >= 1 {
            for term in &p.pieces[i - 1] {
                let d = term.rate - a;
                let (poly, has_exp) = antiderivative(term.coeff, term.power, d);
                let at_one = eval_poly(&poly, 1.0) * if has_exp { d.exp() } else { 1.0 };
                terms.push(ExpPolyTerm {
                    coeff: ea * at_one,
                    power: 0,
                    rate: a,
                });
                let out_rate = if has_exp { term.rate } else { a };
                for &(m, c) in &poly {
                    terms.push(ExpPolyTerm {
                        coeff: -ea * c,
                        power: m,
                        rate: out_rate,
                    });
                }
            }
        }
        pieces.push(canonicalize(terms));
    }
    PiecewiseExpPoly {
        order: n_out,
        pieces,
    }
}

/// Rate tuple a = (a₁, …, a_N) with at least one nonzero entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTuple(Vec<f64>);

impl RateTuple {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() || rates.iter().all(|&a| a == 0.0) || rates.iter().any(|a| !a.is_finite()) {
            return Err(SplineError::DegenerateRates);
        }
        Ok(Self(rates))
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }
}

impl Deref for RateTuple {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// E_{N,a} = ε^{a₁} ∗ … ∗ ε^{a_N}, supported on `[0, N]`.
pub fn build_integer(a: &RateTuple) -> PiecewiseExpPoly {
    build_from_rates(a)
}

/// Same fold as [`build_integer`] without the nonzero-rate requirement; all-zero
/// rates give the polynomial B-spline.
pub fn build_from_rates(rates: &[f64]) -> PiecewiseExpPoly {
    let mut it = rates.iter();
    let first = it.next().copied().unwrap_or(0.0);
    it.fold(exp_kernel(first), |acc, &a| convolve_with_kernel(&acc, a))
}

pub fn eval_piecewise(p: &PiecewiseExpPoly, x: f64) -> f64 {
    p.eval(x)
}

/// Complex-order exponential B-spline E_{z,a}, a > 0.
#[derive(Debug, Clone)]
pub struct ComplexExpBSpline {
    order: ComplexOrder,
    rate: f64,
    horizon: f64,
    // (-1)^k C(z,k) e^{-ka} / Γ(z)
    coeffs: Vec<Complex64>,
}

impl ComplexExpBSpline {
    pub fn new(order: ComplexOrder, rate: f64) -> Result<Self> {
        Self::with_horizon(order, rate, DEFAULT_HORIZON)
    }

    pub fn with_horizon(order: ComplexOrder, rate: f64, horizon: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(SplineError::NonPositiveRate(rate));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(SplineError::Precondition(format!("horizon must be positive, got {horizon}")));
        }
        let coeffs = alternating_coefficients(order.get(), horizon)?
            .into_iter()
            .enumerate()
            .map(|(k, c)| c * (-(k as f64) * rate).exp())
            .collect();
        Ok(Self {
            order,
            rate,
            horizon,
            coeffs,
        })
    }

    pub fn order(&self) -> ComplexOrder {
        self.order
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_flagged(x).value
    }

    pub fn eval_flagged(&self, x: f64) -> SeriesValue {
        let zero = Complex64::new(0.0, 0.0);
        if !(x > 0.0) {
            return SeriesValue {
                value: zero,
                truncated: false,
            };
        }
        if let Some(n) = self.order.as_integer() {
            if x >= n as f64 {
                return SeriesValue {
                    value: zero,
                    truncated: false,
                };
            }
        }
        if x > self.horizon {
            return SeriesValue {
                value: zero,
                truncated: true,
            };
        }
        let exponent = self.order.get() - 1.0;
        let mut sum = ComplexKahanSum::default();
        for (k, c) in self.coeffs.iter().enumerate().take(x.floor() as usize + 1) {
            let shifted = x - k as f64;
            sum.add(c * (-self.rate * shifted).exp() * power_plus(shifted, exponent));
        }
        SeriesValue {
            value: sum.value(),
            truncated: false,
        }
    }
}

/// E_{z,a}(x) with the default horizon.
pub fn eval_complex_exp(z: ComplexOrder, a: f64, x: f64) -> Result<Complex64> {
    Ok(ComplexExpBSpline::new(z, a)?.eval(x))
}
