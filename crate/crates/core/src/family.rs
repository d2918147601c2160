//! The four spline families behind one evaluator interface.

use num_complex::Complex64;

use crate::bspline::{eval_integer, ComplexBSpline, ComplexOrder, IntegerOrder};
use crate::error::Result;
use crate::expspline::{build_integer, ComplexExpBSpline, PiecewiseExpPoly, RateTuple};
use crate::fourier::{
    ft_bspline_complex, ft_bspline_integer, ft_expspline_complex, ft_expspline_integer, numeric_ft, Decay,
    NumericFt,
};

#[derive(Debug, Clone)]
pub enum Family {
    /// B_n.
    Poly(IntegerOrder),
    /// B_z.
    ComplexPoly(ComplexBSpline),
    /// E_{N,a} = ε^{a₁} ∗ … ∗ ε^{a_N}.
    Exp { rates: RateTuple, spline: PiecewiseExpPoly },
    /// E_{z,a}.
    ComplexExp(ComplexExpBSpline),
}

impl Family {
    pub fn poly(n: usize) -> Result<Self> {
        Ok(Family::Poly(IntegerOrder::new(n)?))
    }

    pub fn complex_poly(re: f64, im: f64) -> Result<Self> {
        Ok(Family::ComplexPoly(ComplexBSpline::new(ComplexOrder::from_parts(re, im)?)?))
    }

    pub fn exp(rates: Vec<f64>) -> Result<Self> {
        let rates = RateTuple::new(rates)?;
        let spline = build_integer(&rates);
        Ok(Family::Exp { rates, spline })
    }

    pub fn complex_exp(re: f64, im: f64, rate: f64) -> Result<Self> {
        Ok(Family::ComplexExp(ComplexExpBSpline::new(
            ComplexOrder::from_parts(re, im)?,
            rate,
        )?))
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            Family::Poly(n) => Complex64::new(eval_integer(*n, x), 0.0),
            Family::ComplexPoly(s) => s.eval(x),
            Family::Exp { spline, .. } => Complex64::new(spline.eval(x), 0.0),
            Family::ComplexExp(s) => s.eval(x),
        }
    }

    /// Right end of the compact support, if any.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            Family::Poly(n) => Some(n.get() as f64),
            Family::Exp { spline, .. } => Some(spline.order() as f64),
            Family::ComplexPoly(s) => s.order().as_integer().map(|n| n as f64),
            Family::ComplexExp(s) => s.order().as_integer().map(|n| n as f64),
        }
    }

    /// Upper integration limit: the support end or the stability horizon.
    pub fn upper(&self) -> f64 {
        match self {
            Family::ComplexPoly(s) => self.support_end().unwrap_or(s.horizon()),
            Family::ComplexExp(s) => self.support_end().unwrap_or(s.horizon()),
            _ => self.support_end().expect("integer families are compact"),
        }
    }

    pub fn decay(&self) -> Decay {
        if let Some(end) = self.support_end() {
            return Decay::Compact { end };
        }
        match self {
            Family::ComplexPoly(s) => Decay::Power {
                exponent: s.order().re() + 1.0,
            },
            Family::ComplexExp(s) => Decay::ExpPower {
                rate: s.rate(),
                exponent: s.order().re() + 1.0,
            },
            _ => unreachable!("integer families are compact"),
        }
    }

    /// Whether the family has one of the compactly supported integer orders.
    pub fn is_compact(&self) -> bool {
        self.support_end().is_some()
    }

    /// Closed-form Fourier transform.
    pub fn closed_ft(&self, omega: f64) -> Result<Complex64> {
        Ok(match self {
            Family::Poly(n) => ft_bspline_integer(*n, omega),
            Family::ComplexPoly(s) => ft_bspline_complex(s.order(), omega).product(),
            Family::Exp { rates, .. } => ft_expspline_integer(&rates.negated(), omega),
            Family::ComplexExp(s) => ft_expspline_complex(s.order(), s.rate(), omega)?,
        })
    }

    pub fn numeric_ft(&self, omega: f64, tol: f64) -> Result<NumericFt> {
        numeric_ft(|x| self.eval(x), omega, self.upper(), tol, self.decay())
    }

    pub fn label(&self) -> String {
        match self {
            Family::Poly(n) => format!("B_{}", n.get()),
            Family::ComplexPoly(s) => format!("B_{{{}}}", s.order().get()),
            Family::Exp { rates, .. } => format!("E_{{{},{:?}}}", rates.len(), &rates[..]),
            Family::ComplexExp(s) => format!("E_{{{},{}}}", s.order().get(), s.rate()),
        }
    }
}
