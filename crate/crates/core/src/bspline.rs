//! Cardinal polynomial B-splines of integer, fractional and complex order.
//!
//! Integer orders are evaluated through the finite truncated-power sum
//!
//! ```text
//! B_n(x) = 1/(n-1)! · Σ_{k=0}^{n} (-1)^k C(n,k) (x-k)_+^{n-1}
//! ```
//!
//! with the two-term recursion available as an independent check. Complex orders
//! z (Re z > 1) use the same sum with a complex exponent, which no longer
//! terminates; it is summed up to ⌊x⌋ and cut off at a stability horizon.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SplineError};
use crate::grid::{GridSpec, SampledFunction};
use crate::special::{binomial_complex, gamma_complex, power_plus, ComplexKahanSum};

/// Beyond this abscissa the complex-order series is treated as zero.
pub const DEFAULT_HORIZON: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerOrder(usize);

impl IntegerOrder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SplineError::InvalidIntegerOrder { got: n, min: 1 });
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// A complex order with Re z > 1. Real (fractional) orders have Im z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexOrder(Complex64);

impl ComplexOrder {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re > 1.0) || !z.im.is_finite() || !z.re.is_finite() {
            return Err(SplineError::InvalidComplexOrder { re: z.re, im: z.im });
        }
        Ok(Self(z))
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn get(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    /// `Some(n)` when z is exactly the positive integer n.
    pub fn as_integer(self) -> Option<usize> {
        if self.0.im == 0.0 && self.0.re.fract() == 0.0 {
            Some(self.0.re as usize)
        } else {
            None
        }
    }
}

fn chi(x: f64) -> f64 {
    if (0.0..1.0).contains(&x) {
        1.0
    } else {
        0.0
    }
}

/// B_n(x) from the truncated-power sum. Exactly zero outside `[0, n]`.
///
/// B_1 is the indicator of `[0, 1)`. For n ≥ 2 the symmetry B_n(x) = B_n(n − x)
/// is used to sum on the shorter side, which halves the cancellation.
pub fn eval_integer(n: IntegerOrder, x: f64) -> f64 {
    let n = n.get();
    if n == 1 {
        return chi(x);
    }
    let nf = n as f64;
    if !(x > 0.0 && x < nf) {
        return 0.0;
    }
    let x = if x > 0.5 * nf { nf - x } else { x };
    let mut sum = crate::special::KahanSum::default();
    let mut binom = 1.0;
    let top = x.floor() as usize;
    for k in 0..=top.min(n) {
        let term = binom * (x - k as f64).powi(n as i32 - 1);
        sum.add(if k % 2 == 0 { term } else { -term });
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    sum.value() / factorial(n - 1)
}

/// B_n(x) through the two-term recursion down to B_1. No memoization.
pub fn eval_recursive(n: IntegerOrder, x: f64) -> f64 {
    fn rec(n: usize, x: f64) -> f64 {
        if n == 1 {
            return chi(x);
        }
        let m = (n - 1) as f64;
        x / m * rec(n - 1, x) + (n as f64 - x) / m * rec(n - 1, x - 1.0)
    }
    rec(n.get(), x)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// A complex-order value together with whether the stability horizon cut it off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub truncated: bool,
}

/// Complex-order B-spline B_z with its series coefficients precomputed.
#[derive(Debug, Clone)]
pub struct ComplexBSpline {
    order: ComplexOrder,
    horizon: f64,
    // (-1)^k C(z,k) / Γ(z), k = 0..=⌈horizon⌉
    coeffs: Vec<Complex64>,
}

impl ComplexBSpline {
    pub fn new(order: ComplexOrder) -> Result<Self> {
        Self::with_horizon(order, DEFAULT_HORIZON)
    }

    pub fn with_horizon(order: ComplexOrder, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(SplineError::Precondition(format!("horizon must be positive, got {horizon}")));
        }
        let coeffs = alternating_coefficients(order.get(), horizon)?;
        Ok(Self {
            order,
            horizon,
            coeffs,
        })
    }

    pub fn order(&self) -> ComplexOrder {
        self.order
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// B_z(x); zero for x ≤ 0 and beyond the horizon.
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
            sum.add(c * power_plus(x - k as f64, exponent));
        }
        SeriesValue {
            value: sum.value(),
            truncated: false,
        }
    }
}

/// (-1)^k C(z,k)/Γ(z) for k = 0..=⌈horizon⌉.
pub(crate) fn alternating_coefficients(z: Complex64, horizon: f64) -> Result<Vec<Complex64>> {
    let inv_gamma = 1.0 / gamma_complex(z)?;
    Ok((0..=horizon.ceil() as usize)
        .map(|k| {
            let b = binomial_complex(z, k) * inv_gamma;
            if k % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .collect())
}

/// B_z(x) with the default horizon.
pub fn eval_complex(z: ComplexOrder, x: f64) -> Result<Complex64> {
    Ok(ComplexBSpline::new(z)?.eval(x))
}

/// Either flavour of polynomial B-spline.
#[derive(Debug, Clone)]
pub enum BSpline {
    Integer(IntegerOrder),
    Complex(ComplexBSpline),
}

impl BSpline {
    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            BSpline::Integer(n) => Complex64::new(eval_integer(*n, x), 0.0),
            BSpline::Complex(s) => s.eval(x),
        }
    }

    /// Samples on `grid`. For complex orders with Re z < 2 an unshifted grid is moved
    /// by half a step so that no node sits on an integer knot.
    pub fn sample(&self, grid: &GridSpec) -> Result<SampledFunction> {
        grid.validate()?;
        let grid = match self {
            BSpline::Complex(s) if s.order().re() < 2.0 && grid.offset == 0.0 => {
                grid.with_offset(0.5 * grid.step)
            }
            _ => *grid,
        };
        SampledFunction::from_fn(&grid, |x| self.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(k: usize) -> IntegerOrder {
        IntegerOrder::new(k).unwrap()
    }

    #[test]
    fn integer_examples() {
        assert_eq!(eval_integer(n(1), 0.5), 1.0);
        assert!((eval_integer(n(2), 0.5) - 0.5).abs() < 1e-15);
        assert!((eval_integer(n(3), 1.5) - 0.75).abs() < 1e-15);
        assert_eq!(eval_integer(n(4), 5.0), 0.0);
    }

    #[test]
    fn recursive_examples() {
        assert!((eval_recursive(n(2), 1.0) - 1.0).abs() < 1e-15);
        assert!((eval_recursive(n(2), 0.25) - 0.25).abs() < 1e-15);
        assert!((eval_recursive(n(3), 1.5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(IntegerOrder::new(0).is_err());
        assert!(ComplexOrder::from_parts(1.0, 0.5).is_err());
        assert!(ComplexOrder::from_parts(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn complex_examples() {
        let z2 = ComplexOrder::from_parts(2.0, 0.0).unwrap();
        let v = eval_complex(z2, 0.5).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let z = ComplexOrder::from_parts(3.3, 0.7).unwrap();
        assert_eq!(eval_complex(z, -1.0).unwrap(), Complex64::new(0.0, 0.0));
        let z = ComplexOrder::from_parts(3.0, 1.0).unwrap();
        let expected = 1.0 / gamma_complex(z.get()).unwrap();
        assert!((eval_complex(z, 1.0).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn horizon_truncation_is_flagged() {
        let z = ComplexOrder::from_parts(2.5, 1.0).unwrap();
        let s = ComplexBSpline::with_horizon(z, 10.0).unwrap();
        let v = s.eval_flagged(10.5);
        assert!(v.truncated);
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
        assert!(!s.eval_flagged(9.5).truncated);
    }

    #[test]
    fn integer_complex_order_has_compact_support() {
        let z = ComplexOrder::from_parts(3.0, 0.0).unwrap();
        let s = ComplexBSpline::new(z).unwrap();
        assert_eq!(s.eval(3.0), Complex64::new(0.0, 0.0));
        assert_eq!(s.eval(17.2), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sample_hat_on_offset_grid() {
        let grid = GridSpec::new(0.0, 2.0, 0.5, 0.25).unwrap();
        let s = BSpline::Integer(n(2)).sample(&grid).unwrap();
        let expected = [0.25, 0.75, 0.75, 0.25];
        for ((_, v), e) in s.iter().zip(expected) {
            assert!((v.re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn sample_shifts_grid_for_low_orders() {
        let z = ComplexOrder::from_parts(1.5, 0.5).unwrap();
        let spline = BSpline::Complex(ComplexBSpline::new(z).unwrap());
        let s = spline.sample(&GridSpec::new(0.0, 2.0, 0.5, 0.0).unwrap()).unwrap();
        assert_eq!(s.xs(), vec![0.25, 0.75, 1.25, 1.75]);
    }

    #[test]
    fn sample_empty_grid() {
        let z = ComplexOrder::from_parts(3.0, 1.0).unwrap();
        let spline = BSpline::Complex(ComplexBSpline::new(z).unwrap());
        let s = spline.sample(&GridSpec::new(0.0, 0.1, 1.0, 0.5).unwrap()).unwrap();
        assert!(s.is_empty());
    }
}
