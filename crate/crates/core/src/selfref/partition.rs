use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SplineError};

/// A family of bijections L_1, …, L_N whose images partition the domain.
///
/// Cells are indexed from 0 here: cell `i` is the image of L_{i+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Partition {
    /// I = [0, N], L_{i+1}(x) = x/N + i, cell i = [i, i+1) (the last one closed).
    BoundedUniform { maps: usize },
    /// I = [0, ∞) with knots 0 = x_0 < … < x_{N−1}:
    /// L_{i+1}(x) = x_i + (x_{i+1} − x_i)·(2/π)·arctan x for i < N − 1, and
    /// L_N(x) = x + x_{N−1}.
    UnboundedArctanShift { knots: Vec<f64> },
}

impl Partition {
    pub fn bounded(maps: usize) -> Result<Self> {
        if maps < 2 {
            return Err(SplineError::InvalidPartition(format!("need at least 2 maps, got {maps}")));
        }
        Ok(Partition::BoundedUniform { maps })
    }

    pub fn arctan_shift(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(SplineError::InvalidPartition("need at least 2 maps".into()));
        }
        if knots[0] != 0.0 {
            return Err(SplineError::InvalidPartition("first knot must be 0".into()));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SplineError::InvalidPartition("knots must be finite and strictly increasing".into()));
        }
        Ok(Partition::UnboundedArctanShift { knots })
    }

    /// L₁ = (2/π)·arctan, L₂ = x + 1.
    pub fn standard_arctan_shift() -> Self {
        Partition::UnboundedArctanShift { knots: vec![0.0, 1.0] }
    }

    pub fn maps(&self) -> usize {
        match self {
            Partition::BoundedUniform { maps } => *maps,
            Partition::UnboundedArctanShift { knots } => knots.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Partition::BoundedUniform { .. })
    }

    /// Right end of the domain, `None` for [0, ∞).
    pub fn domain_end(&self) -> Option<f64> {
        match self {
            Partition::BoundedUniform { maps } => Some(*maps as f64),
            Partition::UnboundedArctanShift { .. } => None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= 0.0 && self.domain_end().is_none_or(|end| x <= end)
    }

    /// Index of the cell containing `y` (caller ensures `y` is in the domain).
    pub fn cell(&self, y: f64) -> usize {
        match self {
            Partition::BoundedUniform { maps } => (y.floor().max(0.0) as usize).min(maps - 1),
            Partition::UnboundedArctanShift { knots } => knots.iter().rposition(|&k| k <= y).unwrap_or(0),
        }
    }

    /// L_{i+1}(x).
    pub fn forward(&self, i: usize, x: f64) -> f64 {
        match self {
            Partition::BoundedUniform { maps } => x / *maps as f64 + i as f64,
            Partition::UnboundedArctanShift { knots } => {
                if i + 1 == knots.len() {
                    x + knots[i]
                } else {
                    knots[i] + (knots[i + 1] - knots[i]) * x.atan() / FRAC_PI_2
                }
            }
        }
    }

    /// L_{i+1}^{-1}(y) for y in cell i.
    ///
    /// On the arctan cells the inverse is tan(π u/2) with u the relative position in
    /// the cell; for u > 1/2 it is evaluated as 1/tan(π(1 − u)/2), where 1 − u is
    /// formed from the distance to the right knot without cancellation.
    pub fn inverse(&self, i: usize, y: f64) -> f64 {
        match self {
            Partition::BoundedUniform { maps } => *maps as f64 * (y - i as f64),
            Partition::UnboundedArctanShift { knots } => {
                if i + 1 == knots.len() {
                    return y - knots[i];
                }
                let width = knots[i + 1] - knots[i];
                let u = (y - knots[i]) / width;
                if u <= 0.5 {
                    (FRAC_PI_2 * u).tan()
                } else {
                    let v = (knots[i + 1] - y) / width;
                    1.0 / (FRAC_PI_2 * v).tan()
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_maps_partition_the_interval() {
        let p = Partition::bounded(3).unwrap();
        assert_eq!(p.forward(0, 0.0), 0.0);
        assert_eq!(p.forward(2, 3.0), 3.0);
        assert!((p.forward(1, 1.5) - 1.5).abs() < 1e-15);
        assert_eq!(p.cell(0.0), 0);
        assert_eq!(p.cell(1.0), 1);
        assert_eq!(p.cell(2.999), 2);
        assert_eq!(p.cell(3.0), 2);
        for i in 0..3 {
            for x in [0.0, 0.7, 2.2, 3.0] {
                let y = p.forward(i, x);
                assert!((p.inverse(i, y) - x).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn arctan_shift_boundary_values() {
        let p = Partition::arctan_shift(vec![0.0, 1.0, 2.5]).unwrap();
        assert_eq!(p.forward(0, 0.0), 0.0);
        assert!((p.forward(0, 1e300) - 1.0).abs() < 1e-15);
        assert_eq!(p.forward(1, 0.0), 1.0);
        assert!((p.forward(1, 1e300) - 2.5).abs() < 1e-15);
        assert_eq!(p.forward(2, 0.0), 2.5);
        assert_eq!(p.forward(2, 7.0), 9.5);
        assert_eq!(p.cell(0.3), 0);
        assert_eq!(p.cell(1.0), 1);
        assert_eq!(p.cell(2.5), 2);
        assert_eq!(p.cell(1e9), 2);
    }

    #[test]
    fn arctan_inverse_round_trip() {
        let p = Partition::standard_arctan_shift();
        for x in [0.0, 0.01, 0.5, 1.0, 3.0, 40.0, 1e6] {
            let y = p.forward(0, x);
            let back = p.inverse(0, y);
            assert!((back - x).abs() <= 1e-9 * x.max(1.0), "{x} -> {y} -> {back}");
        }
        assert!((p.inverse(1, 3.25) - 2.25).abs() < 1e-15);
    }

    #[test]
    fn inverse_near_right_knot_is_accurate() {
        let p = Partition::standard_arctan_shift();
        let y = 1.0 - 1e-12;
        let expected = 1.0 / (FRAC_PI_2 * 1e-12_f64).tan();
        let got = p.inverse(0, y);
        // 1 - y itself carries the rounding of y.
        assert!(((got - expected) / expected).abs() < 1e-4);
        assert!(got.is_finite());
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::bounded(1).is_err());
        assert!(Partition::arctan_shift(vec![0.0]).is_err());
        assert!(Partition::arctan_shift(vec![0.5, 1.0]).is_err());
        assert!(Partition::arctan_shift(vec![0.0, 1.0, 1.0]).is_err());
    }
}
