use std::sync::Arc;

use num_complex::Complex64;

use super::{Partition, RBSystem};
use crate::special::ComplexKahanSum;

pub const DEFAULT_EVAL_TOL: f64 = 1e-8;

/// A fixed point f* of an RB operator, evaluated on demand.
#[derive(Debug, Clone)]
pub struct FixedPointHandle {
    system: Arc<RBSystem>,
    tol: f64,
}

/// A point of the domain along an orbit. Orbits of the bounded affine maps are
/// tracked exactly as p/2^q so that x ↦ N(x − i) never rounds; floats are used on
/// unbounded partitions and for the rare dyadics that do not fit.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Point {
    Dyadic { p: u128, q: u32 },
    Float(f64),
}

impl Point {
    fn value(self) -> f64 {
        match self {
            Point::Dyadic { p, q } => p as f64 * 2f64.powi(-(q as i32)),
            Point::Float(x) => x,
        }
    }
}

/// Largest q with N·2^q < 2^127.
fn max_dyadic_scale(maps: usize) -> u32 {
    126 - (usize::BITS - maps.leading_zeros())
}

fn to_dyadic(x: f64, max_q: u32) -> Option<Point> {
    if x == 0.0 {
        return Some(Point::Dyadic { p: 0, q: 0 });
    }
    if !x.is_normal() || x < 0.0 {
        return None;
    }
    let bits = x.to_bits();
    let mantissa = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    let exponent = ((bits >> 52) & 0x7ff) as i32 - 1075;
    if exponent >= 0 {
        // x ≥ 2^52 cannot lie in a bounded domain we support with u128 room
        if exponent > 60 {
            return None;
        }
        return Some(Point::Dyadic {
            p: (mantissa as u128) << exponent,
            q: 0,
        });
    }
    let shift = mantissa.trailing_zeros().min((-exponent) as u32);
    let q = (-exponent) as u32 - shift;
    if q > max_q {
        return None;
    }
    Some(Point::Dyadic {
        p: (mantissa >> shift) as u128,
        q,
    })
}

impl FixedPointHandle {
    pub fn new(system: RBSystem, tol: f64) -> Self {
        Self {
            system: Arc::new(system),
            tol,
        }
    }

    pub fn system(&self) -> &RBSystem {
        &self.system
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// f*(x) within the handle's tolerance.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_with_tol(x, self.tol)
    }

    /// f*(x) within `tol`; zero outside the domain.
    ///
    /// Unrolls f*(x) = f(x) − α_n b(y) + α_n f*(y), y = L_n^{-1}(x), along the orbit
    /// of x. After k steps the remainder is w_k·f*(x_k) with w_k the product of the
    /// α's met so far, so the sum stops once |w_k|·sup|f*| ≤ tol.
    pub fn eval_with_tol(&self, x: f64, tol: f64) -> Complex64 {
        if !self.system.partition().contains(x) {
            return Complex64::new(0.0, 0.0);
        }
        self.eval_point(self.start(x), tol)
    }

    fn start(&self, x: f64) -> Point {
        match self.system.partition() {
            Partition::BoundedUniform { maps } => to_dyadic(x, max_dyadic_scale(*maps)).unwrap_or(Point::Float(x)),
            Partition::UnboundedArctanShift { .. } => Point::Float(x),
        }
    }

    /// Cell index and image under the inverse map of that cell.
    fn step(&self, pt: Point) -> (usize, Point) {
        let partition = self.system.partition();
        match (pt, partition) {
            (Point::Dyadic { p, q }, Partition::BoundedUniform { maps }) => {
                let cell = ((p >> q) as usize).min(maps - 1);
                let local = p - ((cell as u128) << q);
                (
                    cell,
                    Point::Dyadic {
                        p: local * *maps as u128,
                        q,
                    },
                )
            }
            _ => {
                let x = pt.value();
                let cell = partition.cell(x);
                (cell, Point::Float(partition.inverse(cell, x)))
            }
        }
    }

    fn eval_point(&self, start: Point, tol: f64) -> Complex64 {
        let sys = &*self.system;
        let bound = sys.fixed_point_bound();
        let mut acc = ComplexKahanSum::default();
        let mut weight = 1.0f64;
        let mut pt = start;
        loop {
            acc.add(sys.seed(pt.value()) * weight);
            let (cell, next) = self.step(pt);
            let alpha = sys.scaling().get(cell);
            if sys.has_base() {
                acc.add(-sys.base(next.value()) * (weight * alpha));
            }
            weight *= alpha;
            if weight == 0.0 || weight.abs() * bound <= tol {
                break;
            }
            pt = next;
        }
        acc.value()
    }

    /// |f*(x) − f(x) − α_n (f* − b)(L_n^{-1}x)|, with L_n^{-1}x taken along the same
    /// exact orbit the evaluator uses.
    pub fn residual_at(&self, x: f64, tol: f64) -> f64 {
        if !self.system.partition().contains(x) {
            return 0.0;
        }
        let sys = &*self.system;
        let pt = self.start(x);
        let (cell, next) = self.step(pt);
        let alpha = sys.scaling().get(cell);
        let lhs = self.eval_point(pt, tol);
        let rhs = sys.seed(pt.value()) + (self.eval_point(next, tol) - sys.base(next.value())) * alpha;
        (lhs - rhs).norm()
    }
}

/// f*(x) to within `tol`.
pub fn eval_fixed_point(handle: &FixedPointHandle, x: f64, tol: f64) -> Complex64 {
    handle.eval_with_tol(x, tol)
}

/// Largest self-referential residual over `xs`; at most 2·tol for a correct evaluator.
pub fn residual(handle: &FixedPointHandle, xs: &[f64], tol: f64) -> f64 {
    xs.iter().map(|&x| handle.residual_at(x, tol)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfref::{Evaluator, ScalingVector};

    #[test]
    fn dyadic_conversion_round_trips() {
        for x in [0.0, 0.5, 1.0, 2.75, 0.1, 1.0 / 3.0, 2.999_999_9] {
            let pt = to_dyadic(x, 120).unwrap();
            assert_eq!(pt.value(), x);
        }
        assert!(to_dyadic(1e-300, 120).is_none());
        assert!(to_dyadic(-1.0, 120).is_none());
    }

    #[test]
    fn dyadic_orbit_is_exact_for_three_maps() {
        let seed: Evaluator = Arc::new(|_| Complex64::new(0.0, 0.0));
        let sys = RBSystem::new(seed, ScalingVector::zeros(3), Partition::bounded(3).unwrap()).unwrap();
        let h = FixedPointHandle::new(sys, 1e-8);
        // 0.1 is not exact in binary, so 3·(0.1) − 0 rounds in floating point.
        let pt = h.start(0.1);
        let (cell, next) = h.step(pt);
        assert_eq!(cell, 0);
        let Point::Dyadic { p, q } = next else { panic!() };
        let Point::Dyadic { p: p0, q: q0 } = pt else { panic!() };
        assert_eq!(q, q0);
        assert_eq!(p, 3 * p0);
    }

    #[test]
    fn zero_scaling_returns_seed() {
        let seed: Evaluator = Arc::new(|x| Complex64::new(x * (2.0 - x), 0.5 * x));
        let sys = RBSystem::new(seed.clone(), ScalingVector::zeros(2), Partition::bounded(2).unwrap()).unwrap();
        let h = FixedPointHandle::new(sys, 1e-10);
        for x in [0.0, 0.3, 1.0, 1.7, 2.0] {
            assert_eq!(h.eval(x), seed(x));
            assert_eq!(h.residual_at(x, 1e-10), 0.0);
        }
        assert_eq!(h.eval(-0.5), Complex64::new(0.0, 0.0));
        assert_eq!(h.eval(2.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn general_base_function() {
        // Constant seed 1 and base 1 on [0, 2] with α = (1/2, 1/2): f* ≡ 1 solves
        // f* = 1 + α(f* − 1).
        let one: Evaluator = Arc::new(|_| Complex64::new(1.0, 0.0));
        let sys = RBSystem::new(
            one.clone(),
            ScalingVector::new(vec![0.5, 0.5]).unwrap(),
            Partition::bounded(2).unwrap(),
        )
        .unwrap()
        .with_base(one);
        let h = FixedPointHandle::new(sys, 1e-12);
        for x in [0.0, 0.4, 1.3, 2.0] {
            assert!((h.eval(x) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
