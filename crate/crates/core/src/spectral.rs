//! Diagonal model of the sectorial operator `A`.
//!
//! Everything lives in the Galerkin space spanned by the first `n_modes`
//! eigenfunctions. States are coefficient vectors in the `L²`-orthonormal
//! eigenbasis, so `H`-pairings are plain dot products and the semigroup acts
//! mode by mode.

use std::f64::consts::PI;
use std::ops::{Add, Index, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial realization of the eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `φ_j(x) = √(2/L) sin(jπx/L)` on `(0, L)` with Dirichlet conditions.
    AnalyticSine { length: f64 },
    /// Spectrum only, no functions behind the modes.
    Abstract,
}

/// One retained eigenmode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub eigenvalue: f64,
    /// Wavenumber `j` for sine modes, running counter for abstract ones.
    pub id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    distinct: Vec<f64>,
    multiplicities: Vec<usize>,
    modes: Vec<Mode>,
    basis: Basis,
}

impl EigenSystem {
    /// Dirichlet Laplacian `-d²/dx²` on `(0, length)` truncated to `n_modes`.
    pub fn laplacian_1d(n_modes: usize, length: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("n_modes must be positive".into()));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let modes: Vec<Mode> = (1..=n_modes)
            .map(|j| Mode {
                eigenvalue: (j as f64 * PI / length).powi(2),
                id: j,
            })
            .collect();
        Ok(Self {
            distinct: modes.iter().map(|m| m.eigenvalue).collect(),
            multiplicities: vec![1; n_modes],
            modes,
            basis: Basis::AnalyticSine { length },
        })
    }

    /// Abstract diagonal operator with the given distinct eigenvalues and multiplicities.
    pub fn from_spectrum(distinct: &[f64], multiplicities: &[usize]) -> Result<Self> {
        if distinct.is_empty() || distinct.len() != multiplicities.len() {
            return Err(Error::InvalidArgument(
                "need one multiplicity per distinct eigenvalue".into(),
            ));
        }
        if distinct.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidArgument("eigenvalues must be finite".into()));
        }
        if distinct.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "distinct eigenvalues must be strictly increasing".into(),
            ));
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidArgument("multiplicities must be positive".into()));
        }
        let mut modes = Vec::new();
        for (&lambda, &mult) in distinct.iter().zip(multiplicities) {
            for _ in 0..mult {
                modes.push(Mode {
                    eigenvalue: lambda,
                    id: modes.len() + 1,
                });
            }
        }
        Ok(Self {
            distinct: distinct.to_vec(),
            multiplicities: multiplicities.to_vec(),
            modes,
            basis: Basis::Abstract,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn distinct_eigenvalues(&self) -> &[f64] {
        &self.distinct
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn eigenvalue(&self, mode: usize) -> f64 {
        self.modes[mode].eigenvalue
    }

    pub fn lambda_min(&self) -> f64 {
        self.distinct[0]
    }

    /// Domain length for sine bases.
    pub fn length(&self) -> Option<f64> {
        match self.basis {
            Basis::AnalyticSine { length } => Some(length),
            Basis::Abstract => None,
        }
    }

    /// Value of the eigenfunction of `mode` at `x`, if the basis is realized.
    pub fn eigenfunction(&self, mode: usize, x: f64) -> Option<f64> {
        match self.basis {
            Basis::AnalyticSine { length } => {
                let j = self.modes[mode].id as f64;
                Some((2.0 / length).sqrt() * (j * PI * x / length).sin())
            }
            Basis::Abstract => None,
        }
    }

    pub fn eigenfunction_derivative(&self, mode: usize, x: f64) -> Option<f64> {
        match self.basis {
            Basis::AnalyticSine { length } => {
                let freq = self.modes[mode].id as f64 * PI / length;
                Some((2.0 / length).sqrt() * freq * (freq * x).cos())
            }
            Basis::Abstract => None,
        }
    }

    pub fn zero_state(&self) -> SpectralState {
        SpectralState::zeros(self.n_modes())
    }

    /// Unit coefficient vector of a single mode.
    pub fn mode_state(&self, mode: usize) -> SpectralState {
        let mut u = self.zero_state();
        u.0[mode] = 1.0;
        u
    }

    pub fn check_state(&self, u: &SpectralState) -> Result<()> {
        if u.len() != self.n_modes() {
            return Err(Error::ShapeMismatch {
                expected: self.n_modes(),
                got: u.len(),
            });
        }
        Ok(())
    }
}

/// Closed-form sine eigenpairs of the Dirichlet Laplacian on `(0, length)`.
pub fn build_laplacian_1d(n_modes: usize, length: f64) -> Result<EigenSystem> {
    EigenSystem::laplacian_1d(n_modes, length)
}

/// Galerkin coordinates of an element of `X^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralState(pub Vec<f64>);

impl SpectralState {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// `H = L²` norm.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|c| c * factor).collect())
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += a * y;
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for SpectralState {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &SpectralState {
    type Output = SpectralState;
    fn add(self, rhs: Self) -> SpectralState {
        SpectralState(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &SpectralState {
    type Output = SpectralState;
    fn sub(self, rhs: Self) -> SpectralState {
        SpectralState(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Which of the three invariant subspaces a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeRole {
    Minus,
    Kernel,
    Plus,
}

/// `X = X₋ ⊕ X₀ ⊕ X₊` for the resonant eigenvalue `λ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// 1-based index of the resonant distinct eigenvalue.
    pub k: usize,
    pub lambda: f64,
    pub idx0: Vec<usize>,
    pub idx_minus: Vec<usize>,
    pub idx_plus: Vec<usize>,
    pub dim_x0: usize,
    pub dim_xminus: usize,
    pub d_k: usize,
    pub d_km1: usize,
    /// `min(λ_k − λ_{k−1}, λ_{k+1} − λ_k)` over the neighbours that exist;
    /// `+∞` when `λ_k` is the only retained eigenvalue.
    pub spectral_gap_c: f64,
    roles: Vec<ModeRole>,
    eigenvalues: Vec<f64>,
}

impl Decomposition {
    pub fn role(&self, mode: usize) -> ModeRole {
        self.roles[mode]
    }

    pub fn roles(&self) -> &[ModeRole] {
        &self.roles
    }

    pub fn eigenvalue(&self, mode: usize) -> f64 {
        self.eigenvalues[mode]
    }

    pub fn n_modes(&self) -> usize {
        self.roles.len()
    }

    /// Operator norm of the projection onto `part` in the diagonal `L²` model.
    pub fn projector_norm(&self, part: Part) -> f64 {
        let nonempty = match part {
            Part::P => !self.idx0.is_empty(),
            Part::QMinus => !self.idx_minus.is_empty(),
            Part::QPlus => !self.idx_plus.is_empty(),
            Part::Q => !(self.idx_minus.is_empty() && self.idx_plus.is_empty()),
        };
        if nonempty {
            1.0
        } else {
            0.0
        }
    }

    fn selects(&self, mode: usize, part: Part) -> bool {
        matches!(
            (part, self.roles[mode]),
            (Part::P, ModeRole::Kernel)
                | (Part::QMinus, ModeRole::Minus)
                | (Part::QPlus, ModeRole::Plus)
                | (Part::Q, ModeRole::Minus | ModeRole::Plus)
        )
    }
}

pub fn decompose(es: &EigenSystem, k: usize) -> Result<Decomposition> {
    let n_distinct = es.distinct.len();
    if k == 0 || k > n_distinct {
        return Err(Error::InvalidArgument(format!(
            "resonant index k = {k} outside 1..={n_distinct}"
        )));
    }
    let lambda = es.distinct[k - 1];
    let mut idx0 = Vec::new();
    let mut idx_minus = Vec::new();
    let mut idx_plus = Vec::new();
    let mut roles = Vec::with_capacity(es.n_modes());
    for (i, m) in es.modes.iter().enumerate() {
        let role = if m.eigenvalue == lambda {
            idx0.push(i);
            ModeRole::Kernel
        } else if m.eigenvalue < lambda {
            idx_minus.push(i);
            ModeRole::Minus
        } else {
            idx_plus.push(i);
            ModeRole::Plus
        };
        roles.push(role);
    }
    let d_km1: usize = es.multiplicities[..k - 1].iter().sum();
    let d_k = d_km1 + es.multiplicities[k - 1];
    let below = (k >= 2).then(|| lambda - es.distinct[k - 2]);
    let above = (k < n_distinct).then(|| es.distinct[k] - lambda);
    let spectral_gap_c = match (below, above) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => f64::INFINITY,
    };
    Ok(Decomposition {
        k,
        lambda,
        dim_x0: idx0.len(),
        dim_xminus: idx_minus.len(),
        idx0,
        idx_minus,
        idx_plus,
        d_k,
        d_km1,
        spectral_gap_c,
        roles,
        eigenvalues: es.modes.iter().map(|m| m.eigenvalue).collect(),
    })
}

/// Spectral projections `P`, `Q₊`, `Q₋` and `Q = Q₋ + Q₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    P,
    QPlus,
    QMinus,
    Q,
}

pub fn project(u: &SpectralState, d: &Decomposition, part: Part) -> Result<SpectralState> {
    if u.len() != d.n_modes() {
        return Err(Error::ShapeMismatch {
            expected: d.n_modes(),
            got: u.len(),
        });
    }
    Ok(SpectralState(
        u.0.iter()
            .enumerate()
            .map(|(i, &c)| if d.selects(i, part) { c } else { 0.0 })
            .collect(),
    ))
}

/// Constants of the decay estimates and of the fractional power space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBundle {
    pub alpha: f64,
    pub delta: f64,
    /// Semigroup constant `M`.
    pub m_const: f64,
    /// Decay rate `c`.
    pub c: f64,
}

impl ConstantsBundle {
    pub fn new(alpha: f64, delta: f64, m_const: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.75 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (3/4, 1), got {alpha}"
            )));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("delta must be >= 0, got {delta}")));
        }
        if !(m_const >= 1.0) || !m_const.is_finite() {
            return Err(Error::InvalidArgument(format!("M must be >= 1, got {m_const}")));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("c must be > 0, got {c}")));
        }
        Ok(Self {
            alpha,
            delta,
            m_const,
            c,
        })
    }

    /// Exact constants of the self-adjoint diagonal model: `M = 1`, `c` = spectral gap.
    pub fn diagonal(alpha: f64, delta: f64, d: &Decomposition) -> Result<Self> {
        Self::new(alpha, delta, 1.0, d.spectral_gap_c)
    }
}

/// `(Σ (λ_i+δ)^{2α} c_i²)^{1/2}` for any `α ∈ [0, 1]`.
pub fn fractional_norm_with(u: &SpectralState, es: &EigenSystem, alpha: f64, delta: f64) -> Result<f64> {
    es.check_state(u)?;
    if es.lambda_min() + delta <= 0.0 {
        return Err(Error::InvalidOperator(format!(
            "A + delta I is not positive: lambda_1 + delta = {}",
            es.lambda_min() + delta
        )));
    }
    let sum: f64 = es
        .modes
        .iter()
        .zip(&u.0)
        .map(|(m, c)| (m.eigenvalue + delta).powf(2.0 * alpha) * c * c)
        .sum();
    Ok(sum.sqrt())
}

/// `‖u‖_α = ‖(A+δI)^α u‖`.
pub fn fractional_norm(u: &SpectralState, es: &EigenSystem, cb: &ConstantsBundle) -> Result<f64> {
    fractional_norm_with(u, es, cb.alpha, cb.delta)
}

/// Weights `(λ_i+δ)^α` turning coefficients into `α`-norm coordinates.
pub fn alpha_weights(es: &EigenSystem, alpha: f64, delta: f64) -> Result<Vec<f64>> {
    if es.lambda_min() + delta <= 0.0 {
        return Err(Error::InvalidOperator(format!(
            "A + delta I is not positive: lambda_1 + delta = {}",
            es.lambda_min() + delta
        )));
    }
    Ok(es
        .modes
        .iter()
        .map(|m| (m.eigenvalue + delta).powf(alpha))
        .collect())
}

/// `e^{λt} S_A(t) u`, multiplying coefficient `i` by `e^{(λ−λ_i)t}`.
///
/// Negative times are allowed only on modes with `λ_i ≤ λ`, where the
/// semigroup extends to a group.
pub fn shifted_semigroup_apply(
    u: &SpectralState,
    t: f64,
    lambda: f64,
    es: &EigenSystem,
) -> Result<SpectralState> {
    es.check_state(u)?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    if t < 0.0 {
        if let Some(mode) = es
            .modes
            .iter()
            .zip(&u.0)
            .position(|(m, &c)| m.eigenvalue > lambda && c != 0.0)
        {
            return Err(Error::IllPosedBackwardFlow { mode });
        }
    }
    Ok(SpectralState(
        es.modes
            .iter()
            .zip(&u.0)
            .map(|(m, &c)| {
                let rate = lambda - m.eigenvalue;
                if rate == 0.0 || c == 0.0 {
                    c
                } else {
                    c * (rate * t).exp()
                }
            })
            .collect(),
    ))
}
