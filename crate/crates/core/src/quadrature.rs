use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureRule {
    CompositeGauss { order: usize, panels: usize },
}

/// Nodes and weights of a composite Gauss-Legendre rule on `(0, length)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub rule: QuadratureRule,
    pub length: f64,
}

impl QuadratureGrid {
    pub fn composite_gauss(length: f64, order: usize, panels: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!("length must be positive, got {length}")));
        }
        let (Some(order_nz), true) = (NonZeroUsize::new(order), panels > 0) else {
            return Err(Error::InvalidArgument(
                "quadrature order and panel count must be positive".into(),
            ));
        };
        let reference: Vec<(f64, f64)> = GaussLegendre::new(order_nz)
            .iter()
            .map(|(x, w)| (*x, *w))
            .collect();
        let h = length / panels as f64;
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for &(x, w) in &reference {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Ok(Self {
            nodes,
            weights,
            rule: QuadratureRule::CompositeGauss { order, panels },
            length,
        })
    }

    /// Order-8 panels, each spanning at most half a period of the highest product
    /// `φ_i φ_j` of retained modes. The panel count is a multiple of 12 so that the
    /// nodal lines of the first few sine modes fall on panel breaks.
    pub fn default_for(length: f64, n_modes: usize) -> Result<Self> {
        let panels = (2 * n_modes).div_ceil(12).max(1) * 12;
        Self::composite_gauss(length, 8, panels)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same rule with twice as many panels.
    pub fn refined(&self) -> Result<Self> {
        let QuadratureRule::CompositeGauss { order, panels } = self.rule;
        Self::composite_gauss(self.length, order, 2 * panels)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn weights_sum_to_length() {
        for (length, order, panels) in [(PI, 8, 32), (1.0, 5, 7), (3.7, 12, 1)] {
            let g = QuadratureGrid::composite_gauss(length, order, panels).unwrap();
            let total: f64 = g.weights.iter().sum();
            assert_abs_diff_eq!(total, length, epsilon = 1e-12);
            assert!(g.nodes.iter().all(|&x| x > 0.0 && x < length));
            assert!(g.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn sin_squared_integral() {
        let g = QuadratureGrid::default_for(PI, 64).unwrap();
        assert_abs_diff_eq!(g.integrate(|x| x.sin().powi(2)), PI / 2.0, epsilon = 1e-10);
        // |sin 2x| has a kink at pi/2, which is a panel break
        assert_abs_diff_eq!(g.integrate(|x| (2.0 * x).sin().abs()), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn rejects_degenerate_rules() {
        assert!(QuadratureGrid::composite_gauss(PI, 0, 4).is_err());
        assert!(QuadratureGrid::composite_gauss(PI, 4, 0).is_err());
        assert!(QuadratureGrid::composite_gauss(0.0, 4, 4).is_err());
    }
}
