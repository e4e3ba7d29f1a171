//! Tabulated eigenfunctions on a quadrature grid: synthesis of `u`, `u′` at the
//! nodes and `L²` projection back onto the retained modes.

use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::spectral::{EigenSystem, SpectralState};

#[derive(Debug, Clone)]
pub struct Galerkin {
    es: EigenSystem,
    grid: QuadratureGrid,
    /// `phi[j * n_nodes + q] = φ_j(x_q)`
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

impl Galerkin {
    pub fn new(es: &EigenSystem, grid: &QuadratureGrid) -> Result<Self> {
        let length = es.length().ok_or(Error::UnsupportedRealization)?;
        if (length - grid.length).abs() > 1e-12 * length {
            return Err(Error::InvalidArgument(format!(
                "quadrature grid covers (0, {}) but the operator lives on (0, {length})",
                grid.length
            )));
        }
        let nq = grid.len();
        let mut phi = Vec::with_capacity(es.n_modes() * nq);
        let mut dphi = Vec::with_capacity(es.n_modes() * nq);
        for j in 0..es.n_modes() {
            for &x in &grid.nodes {
                phi.push(es.eigenfunction(j, x).expect("sine basis"));
                dphi.push(es.eigenfunction_derivative(j, x).expect("sine basis"));
            }
        }
        Ok(Self {
            es: es.clone(),
            grid: grid.clone(),
            phi,
            dphi,
        })
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.es
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn n_modes(&self) -> usize {
        self.es.n_modes()
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.len()
    }

    fn row(table: &[f64], j: usize, nq: usize) -> &[f64] {
        &table[j * nq..(j + 1) * nq]
    }

    /// Values of `u` and `u′` at the quadrature nodes.
    pub fn synthesize(&self, u: &SpectralState) -> (Vec<f64>, Vec<f64>) {
        let nq = self.n_nodes();
        let mut values = vec![0.0; nq];
        let mut slopes = vec![0.0; nq];
        for (j, &c) in u.coefficients().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let p = Self::row(&self.phi, j, nq);
            let dp = Self::row(&self.dphi, j, nq);
            for q in 0..nq {
                values[q] += c * p[q];
                slopes[q] += c * dp[q];
            }
        }
        (values, slopes)
    }

    /// Coefficient of nodal data `g` against mode `j`: `Σ_q w_q g_q φ_j(x_q)`.
    pub fn project_mode(&self, g: &[f64], j: usize) -> f64 {
        let nq = self.n_nodes();
        Self::row(&self.phi, j, nq)
            .iter()
            .zip(&self.grid.weights)
            .zip(g)
            .map(|((p, w), v)| p * w * v)
            .sum()
    }

    pub fn project(&self, g: &[f64]) -> SpectralState {
        SpectralState((0..self.n_modes()).map(|j| self.project_mode(g, j)).collect())
    }

    /// Nodal values of a single eigenfunction.
    pub fn mode_values(&self, j: usize) -> &[f64] {
        Self::row(&self.phi, j, self.n_nodes())
    }
}
