//! Conley indices predicted by the sign conditions, the connecting-orbit
//! criterion, and numeric checks of the ingredients behind the index formula.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{Condition, ConditionVerdict};
use crate::error::{Error, Result};
use crate::homotopy::{equal, HomotopyType};
use crate::sampling::{kernel_directions, stream, uniform_in_q_ball};
use crate::semiflow::Semiflow;
use crate::spectral::{alpha_weights, Decomposition, EigenSystem};

/// `λ + ν` closer than this to an eigenvalue counts as resonant.
pub const HYPERBOLICITY_TOLERANCE: f64 = 1e-9;

fn sphere(d: usize) -> HomotopyType {
    HomotopyType::sphere(d as u32)
}

/// `Σ^{d_k}` under (G1), `Σ^{d_{k−1}}` under (G2).
pub fn index_of_bounded_invariant_set(d: &Decomposition, verdict: &ConditionVerdict) -> Result<HomotopyType> {
    match (verdict.holds, verdict.condition) {
        (true, Some(Condition::G1)) => Ok(sphere(d.d_k)),
        (true, Some(Condition::G2)) => Ok(sphere(d.d_km1)),
        _ => Err(Error::Inapplicable(format!(
            "index formula needs a verified G1 or G2 verdict, got {}",
            verdict.label()
        ))),
    }
}

/// Rejects `λ + ν` within tolerance of a retained eigenvalue.
pub fn check_hyperbolic(es: &EigenSystem, lambda: f64, nu: f64) -> Result<()> {
    let value = lambda + nu;
    match es
        .distinct_eigenvalues()
        .iter()
        .find(|&&l| (l - value).abs() <= HYPERBOLICITY_TOLERANCE)
    {
        Some(&eigenvalue) => Err(Error::NonhyperbolicOrigin { value, eigenvalue }),
        None => Ok(()),
    }
}

/// Number of modes with eigenvalue below `λ + ν`.
fn unstable_count(es: &EigenSystem, value: f64) -> usize {
    es.distinct_eigenvalues()
        .iter()
        .zip(es.multiplicities())
        .filter(|(&l, _)| l < value)
        .map(|(_, &m)| m)
        .sum()
}

/// `Σ^{b_l}` with `b_l` the number of modes below `λ + ν`.
pub fn index_of_origin(es: &EigenSystem, lambda: f64, nu: f64) -> Result<HomotopyType> {
    check_hyperbolic(es, lambda, nu)?;
    Ok(sphere(unstable_count(es, lambda + nu)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitCase {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for OrbitCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitCase::I => "i",
            OrbitCase::II => "ii",
            OrbitCase::III => "iii",
            OrbitCase::IV => "iv",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Existence {
    Exists,
    Inconclusive,
}

impl fmt::Display for Existence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Existence::Exists => "EXISTS",
            Existence::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub case: Option<OrbitCase>,
    /// The geometric condition the indices were computed from.
    pub condition: Condition,
    /// Which verdict justified `condition`, and how.
    pub provenance: String,
    pub lambda: f64,
    pub nu: f64,
    /// 1-based `l` locating `λ + ν` in the spectrum; `0` below `λ₁`.
    pub l: usize,
    pub h_k: HomotopyType,
    pub h_0: HomotopyType,
    pub existence: Existence,
    pub failed_hypothesis: Option<String>,
}

/// Matches `(es, k, ν, verdict)` against the four cases of the connecting-orbit criterion.
pub fn connecting_orbit_criterion(
    es: &EigenSystem,
    k: usize,
    nu: f64,
    verdict: &ConditionVerdict,
) -> Result<CriterionRecord> {
    let d = crate::spectral::decompose(es, k)?;
    let source = match (verdict.holds, verdict.condition) {
        (true, Some(c)) => c,
        _ => {
            return Err(Error::Inapplicable(format!(
                "criterion needs a verified sign condition, got {}",
                verdict.label()
            )))
        }
    };
    let condition = source.implied_geometric();
    let provenance = if source.is_geometric() {
        format!("{source} verified directly by sampling")
    } else if matches!(source, Condition::LL1 | Condition::LL2) {
        format!("{source} lifted to {condition} by the Landesman-Lazer implication")
    } else {
        format!("{source} lifted to {condition} by the strong-resonance implication (stated for n >= 3)")
    };
    let lambda = d.lambda;
    let h_0 = index_of_origin(es, lambda, nu)?;
    let h_k = match condition {
        Condition::G1 => sphere(d.d_k),
        _ => sphere(d.d_km1),
    };
    let ev = es.distinct_eigenvalues();
    let value = lambda + nu;
    // number of distinct eigenvalues below λ + ν
    let l = ev.iter().filter(|&&e| e < value).count();
    let (case, failed) = match condition {
        Condition::G1 if l == 0 => (Some(OrbitCase::II), None),
        Condition::G1 if ev[l - 1] != lambda => (Some(OrbitCase::I), None),
        Condition::G1 => (None, Some("lambda_l != lambda".to_string())),
        _ if l == 0 && k != 1 => (Some(OrbitCase::IV), None),
        _ if l == 0 => (None, Some("lambda != lambda_1".to_string())),
        // λ_{l'-1} < λ + ν < λ_{l'} with l' = l + 1
        _ if l + 1 > ev.len() => (None, Some("lambda + nu inside the retained spectrum".to_string())),
        _ if ev[l] != lambda => (Some(OrbitCase::III), None),
        _ => (None, Some("lambda != lambda_l".to_string())),
    };
    let existence = if case.is_some() && !equal(&h_k, &h_0) {
        Existence::Exists
    } else {
        Existence::Inconclusive
    };
    let failed_hypothesis = match (existence, failed) {
        (Existence::Inconclusive, None) => Some("h(K) != h({0})".to_string()),
        (_, f) => f,
    };
    Ok(CriterionRecord {
        case,
        condition,
        provenance,
        lambda,
        nu,
        l,
        h_k,
        h_0,
        existence,
        failed_hypothesis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExitSet {
    /// Every boundary point of the kernel ball is a strict egress point.
    FullBoundary,
    /// Every boundary point is a strict ingress point.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub exit_set: ExitSet,
    pub min_derivative: f64,
    pub max_derivative: f64,
    /// Smallest `|d/dt ‖Pu‖²|` over the samples.
    pub margin: f64,
    pub n_samples: usize,
    pub s_values: Vec<f64>,
}

/// Samples of `∂N₂ × N₁`: `u = x + y` with `‖x‖_H = R_P` and `‖y‖_α ≤ R_Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySampling {
    pub r_q: f64,
    pub r_p: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Signs of `d/dt ‖Pu(t)‖²` on the kernel boundary of `N` along the homotopy.
///
/// `flow` supplies the model and the `α`-norm; its homotopy parameter is
/// replaced by each entry of `s_values`.
pub fn verify_isolating_block(
    flow: &Semiflow<'_>,
    alpha: f64,
    delta: f64,
    s_values: &[f64],
    sampling: &BoundarySampling,
    expected: Option<Condition>,
) -> Result<BlockReport> {
    if s_values.is_empty() || sampling.n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one s value and one boundary sample".into()));
    }
    let d = flow.decomposition();
    let es = flow.galerkin().eigensystem();
    let weights = alpha_weights(es, alpha, delta)?;
    let dirs = kernel_directions(d, sampling.n_samples, sampling.seed);
    let points: Vec<_> = (0..sampling.n_samples)
        .map(|i| {
            let mut u = uniform_in_q_ball(&mut stream(sampling.seed, i as u64), d, &weights, sampling.r_q);
            // alternate kernel directions so both hemispheres are hit evenly
            let omega = &dirs[if d.dim_x0 == 1 { i % 2 } else { i }];
            u.axpy(sampling.r_p, omega);
            u
        })
        .collect();
    let flows: Vec<Semiflow<'_>> = s_values
        .iter()
        .map(|&s| flow.clone().with_homotopy(s))
        .collect::<Result<_>>()?;
    let values: Vec<(usize, f64, f64)> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let u = &points[i];
            flows.iter().map(move |f| {
                let v = f
                    .boundary_exit_derivative(u, sampling.r_p)
                    .expect("sample constructed on the boundary");
                (i, f.homotopy_parameter(), v)
            })
        })
        .collect();
    let min = values.iter().map(|w| w.2).fold(f64::INFINITY, f64::min);
    let max = values.iter().map(|w| w.2).fold(f64::NEG_INFINITY, f64::max);
    let exit_set = if min > 0.0 {
        ExitSet::FullBoundary
    } else if max < 0.0 {
        ExitSet::Empty
    } else {
        let mut witnesses: Vec<_> = values.iter().filter(|w| w.2 >= 0.0).take(4).copied().collect();
        witnesses.extend(values.iter().filter(|w| w.2 <= 0.0).take(4).copied());
        return Err(Error::BlockVerificationFailed {
            reason: format!("boundary derivative changes sign: range [{min:.4e}, {max:.4e}]"),
            witnesses,
        });
    };
    let predicted = match expected.map(Condition::implied_geometric) {
        Some(Condition::G1) => Some(ExitSet::FullBoundary),
        Some(_) => Some(ExitSet::Empty),
        None => None,
    };
    if let Some(p) = predicted.filter(|p| *p != exit_set) {
        let witnesses = values.iter().take(4).copied().collect();
        return Err(Error::BlockVerificationFailed {
            reason: format!("predicted exit set {p:?}, sampled {exit_set:?}"),
            witnesses,
        });
    }
    Ok(BlockReport {
        exit_set,
        min_derivative: min,
        max_derivative: max,
        margin: min.abs().min(max.abs()),
        n_samples: values.len(),
        s_values: s_values.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearIndexReport {
    pub index: HomotopyType,
    /// Modes outside `X₀` with `λ − λ_i > 0`.
    pub growing_modes: Vec<usize>,
    /// `e^{(λ−λ_i)T}` per mode.
    pub factors: Vec<f64>,
    /// Growth exactly on `X₋` and decay exactly on `X₊`.
    pub consistent: bool,
}

/// Index `Σ^{dim X₋}` of the linear flow on `X₊ ⊕ X₋`, with the mode-wise growth factors behind it.
pub fn linear_index_check(es: &EigenSystem, d: &Decomposition, lambda: f64, horizon_t: f64) -> LinearIndexReport {
    let factors: Vec<f64> = es
        .modes()
        .iter()
        .map(|m| ((lambda - m.eigenvalue) * horizon_t).exp())
        .collect();
    let growing_modes: Vec<usize> = (0..es.n_modes())
        .filter(|i| !d.idx0.contains(i) && lambda - es.eigenvalue(*i) > 0.0)
        .collect();
    let consistent = growing_modes == d.idx_minus
        && d.idx_minus.iter().all(|&i| factors[i] > 1.0)
        && d.idx_plus.iter().all(|&i| factors[i] < 1.0);
    LinearIndexReport {
        index: sphere(d.dim_xminus),
        growing_modes,
        factors,
        consistent,
    }
}
