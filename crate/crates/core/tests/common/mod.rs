#![allow(dead_code)]

use std::f64::consts::PI;

use resonance_core::conditions::{build_isolating_neighborhood, IsolatingNeighborhood, RadiusSearch};
use resonance_core::nonlinearity::NonlinearityModel;
use resonance_core::spectral::{build_laplacian_1d, decompose};
use resonance_core::{ConstantsBundle, Decomposition, EigenSystem, QuadratureGrid};

pub const ALPHA: f64 = 0.8;

pub struct Setup {
    pub es: EigenSystem,
    pub d: Decomposition,
    pub grid: QuadratureGrid,
    pub cb: ConstantsBundle,
}

/// Dirichlet Laplacian on `(0, π)` with `n` modes, resonant at `λ_k = k²`.
pub fn heat(n: usize, k: usize) -> Setup {
    let es = build_laplacian_1d(n, PI).unwrap();
    let d = decompose(&es, k).unwrap();
    let grid = QuadratureGrid::default_for(PI, n).unwrap();
    let cb = ConstantsBundle::diagonal(ALPHA, 0.0, &d).unwrap();
    Setup { es, d, grid, cb }
}

impl Setup {
    pub fn neighborhood(&self, model: &NonlinearityModel) -> IsolatingNeighborhood {
        build_isolating_neighborhood(model, &self.es, &self.d, &self.cb, &self.grid, &RadiusSearch::default()).unwrap()
    }
}
