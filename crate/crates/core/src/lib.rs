//! Spectral-Galerkin toolkit for semilinear parabolic equations at resonance
//! `u̇ = −Au + λu + F(u)` with `λ` an eigenvalue of `A` and `F` bounded.
//!
//! The crate checks the geometric, Landesman-Lazer and strong-resonance sign
//! conditions numerically, evaluates the Conley indices they predict, and
//! searches for orbits connecting the origin to the large bounded invariant set.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditions;
pub mod conley;
pub mod error;
pub mod galerkin;
pub mod homotopy;
pub mod nonlinearity;
pub mod orbit;
pub mod quadrature;
pub mod sampling;
pub mod semiflow;
pub mod spectral;

pub use error::{Error, Result};
pub use galerkin::Galerkin;
pub use homotopy::HomotopyType;
pub use nonlinearity::NonlinearityModel;
pub use quadrature::QuadratureGrid;
pub use spectral::{ConstantsBundle, Decomposition, EigenSystem, Part, SpectralState};
