//! Closed-form Fourier transforms, F(f)(ω) = ∫ f(x) e^{−iωx} dx, of the four
//! families, plus a quadrature oracle.
//!
//! Every kernel in this module is an instance of K(s) = (1 − e^{−s})/s:
//! Ω(ω) = K(iω), Ω_a(ω) = K(a + iω), and each factor of the exponential product
//! is K(a_k + iω).

use num_complex::Complex64;
use serde::Serialize;

use crate::bspline::{ComplexOrder, IntegerOrder};
use crate::error::{Result, SplineError};
use crate::quadrature::{integer_breakpoints, integrate, QuadOptions};
use crate::special::principal_power;

/// Below this |s| the kernel switches to its Taylor expansion.
pub const SERIES_RADIUS: f64 = 1e-4;

/// (1 − e^{−s})/s with the removable singularity at s = 0 filled in.
pub fn kernel(s: Complex64) -> Complex64 {
    if s.norm() < SERIES_RADIUS {
        // 1 − s/2 + s²/6 − s³/24
        let one = Complex64::new(1.0, 0.0);
        return one - s * (0.5 - s * (1.0 / 6.0 - s / 24.0));
    }
    (1.0 - (-s).exp()) / s
}

/// Ω(ω) = (1 − e^{−iω})/(iω), with Ω(0) = 1.
pub fn omega_kernel(omega: f64) -> Complex64 {
    kernel(Complex64::new(0.0, omega))
}

/// Ω_a(ω) = (1 − e^{−(a+iω)})/(a + iω) for a > 0.
pub fn omega_kernel_exp(a: f64, omega: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(SplineError::NonPositiveRate(a));
    }
    Ok(kernel(Complex64::new(a, omega)))
}

/// B̂_n(ω) = Ω(ω)^n by repeated multiplication.
pub fn ft_bspline_integer(n: IntegerOrder, omega: f64) -> Complex64 {
    let w = omega_kernel(omega);
    (0..n.get()).fold(Complex64::new(1.0, 0.0), |acc, _| acc * w)
}

/// The three factors of B̂_z = B̂_{Re z} · e^{i Im z ln|Ω|} · e^{−Im z arg Ω}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDecomposition {
    /// B̂_{Re z}(ω) = |Ω|^{Re z} e^{i Re z arg Ω}.
    pub smoothness_factor: Complex64,
    /// e^{i Im z ln|Ω|}, unimodular.
    pub phase_factor: Complex64,
    /// e^{−Im z arg Ω}, real and positive.
    pub modulation_factor: Complex64,
}

impl PhaseDecomposition {
    pub fn product(&self) -> Complex64 {
        self.smoothness_factor * self.phase_factor * self.modulation_factor
    }
}

/// Decomposes Ω(ω)^z on the principal branch. At the zeros ω = 2πk, k ≠ 0, the
/// smoothness factor is 0 and the other two are 1.
pub fn ft_bspline_complex(z: ComplexOrder, omega: f64) -> PhaseDecomposition {
    decompose(omega_kernel(omega), z.get())
}

fn decompose(base: Complex64, z: Complex64) -> PhaseDecomposition {
    let one = Complex64::new(1.0, 0.0);
    if base.norm() == 0.0 {
        return PhaseDecomposition {
            smoothness_factor: Complex64::new(0.0, 0.0),
            phase_factor: one,
            modulation_factor: one,
        };
    }
    let ln_mod = base.norm().ln();
    let arg = base.arg();
    PhaseDecomposition {
        smoothness_factor: Complex64::from_polar((z.re * ln_mod).exp(), z.re * arg),
        phase_factor: Complex64::from_polar(1.0, z.im * ln_mod),
        modulation_factor: Complex64::new((-z.im * arg).exp(), 0.0),
    }
}

/// Π_k (1 − e^{−a_k} e^{−iω})/(iω + a_k).
///
/// This is the transform of ε^{−a₁} ∗ … ∗ ε^{−a_N}; the spline built from rates
/// `a` by [`crate::expspline::build_integer`] has transform `ft_expspline_integer(−a, ω)`.
/// Zero rates are allowed and reduce the factor to Ω(ω).
pub fn ft_expspline_integer(rates: &[f64], omega: f64) -> Complex64 {
    rates
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * kernel(Complex64::new(a, omega)))
}

/// Ê_{z,a}(ω) = Ω_a(ω)^z on the principal branch.
pub fn ft_expspline_complex(z: ComplexOrder, a: f64, omega: f64) -> Result<Complex64> {
    let base = omega_kernel_exp(a, omega)?;
    principal_power(base, z.get())
}

/// Same value as [`ft_expspline_complex`], split into smoothness, phase and
/// modulation factors.
pub fn ft_expspline_complex_decomposed(z: ComplexOrder, a: f64, omega: f64) -> Result<PhaseDecomposition> {
    Ok(decompose(omega_kernel_exp(a, omega)?, z.get()))
}

/// How a family decays beyond the quadrature cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Decay {
    /// Supported on `[0, end]`.
    Compact { end: f64 },
    /// |f(x)| = O(x^{−exponent}).
    Power { exponent: f64 },
    /// |f(x)| = O(e^{−rate·x} x^{−exponent}).
    ExpPower { rate: f64, exponent: f64 },
}

/// Bound on ∫_{upper}^∞ |f| from the decay law, with the constant fitted on
/// `[upper/2, upper]` and doubled.
pub fn tail_bound<F: Fn(f64) -> Complex64>(f: &F, upper: f64, decay: Decay) -> f64 {
    const SAMPLES: usize = 64;
    let samples = (0..=SAMPLES).map(|i| upper * (0.5 + 0.5 * i as f64 / SAMPLES as f64));
    match decay {
        Decay::Compact { end } => {
            if upper >= end {
                0.0
            } else {
                f64::INFINITY
            }
        }
        Decay::Power { exponent } => {
            let c = samples.map(|y| f(y).norm() * y.powf(exponent)).fold(0.0, f64::max);
            2.0 * c * upper.powf(1.0 - exponent) / (exponent - 1.0)
        }
        Decay::ExpPower { rate, exponent } => {
            let c = samples
                .map(|y| f(y).norm() * y.powf(exponent) * (rate * y).exp())
                .fold(0.0, f64::max);
            2.0 * c * upper.powf(-exponent) * (-rate * upper).exp() / rate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericFt {
    pub value: Complex64,
    pub quadrature_error: f64,
    pub tail_bound: f64,
}

impl NumericFt {
    pub fn error_bound(&self) -> f64 {
        self.quadrature_error + self.tail_bound
    }
}

/// ∫₀^upper f(x) e^{−iωx} dx by adaptive Simpson with breakpoints at the integer
/// knots, plus the decay-based tail bound for the discarded ∫_{upper}^∞.
pub fn numeric_ft<F>(f: F, omega: f64, upper: f64, tol: f64, decay: Decay) -> Result<NumericFt>
where
    F: Fn(f64) -> Complex64,
{
    if !(upper > 0.0) {
        return Err(SplineError::Precondition(format!("upper limit must be positive, got {upper}")));
    }
    let integrand = |x: f64| f(x) * Complex64::new(0.0, -omega * x).exp();
    let r = integrate(integrand, &integer_breakpoints(0.0, upper), QuadOptions::with_tol(tol))?;
    Ok(NumericFt {
        value: r.value,
        quadrature_error: r.error_estimate,
        tail_bound: tail_bound(&f, upper, decay),
    })
}
