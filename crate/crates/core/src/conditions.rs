//! Sampled verification of the sign conditions at resonance and the a priori
//! radii of the isolating neighbourhood `N = N₁ ⊕ N₂`.
//!
//! Sampling can refute a condition but never prove it; a verdict that holds
//! means "verified at sampling resolution".

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::Galerkin;
use crate::nonlinearity::{BoundSampleSpec, FloorKind, NonlinearityModel};
use crate::quadrature::QuadratureGrid;
use crate::sampling::{kernel_directions, stream, uniform_in_q_ball};
use crate::spectral::{alpha_weights, decompose, ConstantsBundle, Decomposition, EigenSystem, Part, SpectralState};

/// Pairings within this distance of zero never count as a sign.
pub const PAIRING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    G1,
    G2,
    LL1,
    LL2,
    SR1,
    SR2,
}

impl Condition {
    /// The geometric condition implied by a Landesman-Lazer or strong-resonance one.
    pub fn implied_geometric(self) -> Condition {
        match self {
            Condition::G1 | Condition::LL1 | Condition::SR1 => Condition::G1,
            Condition::G2 | Condition::LL2 | Condition::SR2 => Condition::G2,
        }
    }

    pub fn is_geometric(self) -> bool {
        matches!(self, Condition::G1 | Condition::G2)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::G1 => "G1",
            Condition::G2 => "G2",
            Condition::LL1 => "LL1",
            Condition::LL2 => "LL2",
            Condition::SR1 => "SR1",
            Condition::SR2 => "SR2",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "G1" => Condition::G1,
            "G2" => Condition::G2,
            "LL1" => Condition::LL1,
            "LL2" => Condition::LL2,
            "SR1" => Condition::SR1,
            "SR2" => Condition::SR2,
            other => return Err(Error::InvalidArgument(format!("unknown condition {other:?}"))),
        })
    }
}

/// A sample point together with the value the check computed there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    /// `None` when the samples show neither sign uniformly.
    pub condition: Option<Condition>,
    pub holds: bool,
    /// Sample with the smallest value first, then the one with the largest.
    pub witnesses: Vec<Witness>,
    /// The `R` the geometric check was run with.
    pub radius_r: Option<f64>,
    pub tolerance: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub n_samples: usize,
    /// `∫ f_∞` for strong-resonance checks.
    pub integral: Option<f64>,
    pub caveats: Vec<String>,
}

impl ConditionVerdict {
    /// True if the verdict establishes `cond`, directly or through the
    /// Landesman-Lazer / strong-resonance implications.
    pub fn establishes(&self, cond: Condition) -> bool {
        match self.condition {
            Some(c) if self.holds => c == cond || (cond.is_geometric() && c.implied_geometric() == cond),
            _ => false,
        }
    }

    /// Smallest distance of a sampled value from zero on the side the verdict claims.
    pub fn margin(&self) -> f64 {
        match self.condition.map(Condition::implied_geometric) {
            Some(Condition::G1) => self.min_value,
            Some(_) => -self.max_value,
            None => 0.0,
        }
    }

    pub fn label(&self) -> String {
        match self.condition {
            Some(c) => c.to_string(),
            None => "neither".to_string(),
        }
    }
}

fn sign_verdict(
    positive: Condition,
    negative: Condition,
    samples: Vec<Witness>,
    tolerance: f64,
) -> ConditionVerdict {
    let mut lo: Option<&Witness> = None;
    let mut hi: Option<&Witness> = None;
    for w in &samples {
        if lo.is_none_or(|l| w.value < l.value) {
            lo = Some(w);
        }
        if hi.is_none_or(|h| w.value > h.value) {
            hi = Some(w);
        }
    }
    let min_value = lo.map_or(f64::NAN, |w| w.value);
    let max_value = hi.map_or(f64::NAN, |w| w.value);
    let condition = if samples.is_empty() {
        None
    } else if min_value > tolerance {
        Some(positive)
    } else if max_value < -tolerance {
        Some(negative)
    } else {
        None
    };
    ConditionVerdict {
        condition,
        holds: condition.is_some(),
        witnesses: lo.into_iter().chain(hi).cloned().collect(),
        radius_r: None,
        tolerance,
        min_value,
        max_value,
        n_samples: samples.len(),
        integral: None,
        caveats: Vec::new(),
    }
}

/// The pieces of the a priori bound `R₁` on `‖Qu(t)‖_α` for bounded full solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprioriRadii {
    /// `m(‖P‖ + ‖Q‖)`, a bound on the homotopy field.
    pub m0: f64,
    /// Bound on `‖Q₊u(t)‖_α`.
    pub plus_part: f64,
    /// Bound on `‖Q₋u(t)‖_α`.
    pub minus_part: f64,
    /// `max (λ_i+δ)^α` over `X₋`, the norm of `i: X₋ → X^α`.
    pub c_prime: f64,
    pub r1: f64,
}

pub fn apriori_radii(model: &NonlinearityModel, d: &Decomposition, cb: &ConstantsBundle) -> Result<AprioriRadii> {
    let m = model.bound_m;
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!("bound m must be finite and >= 0, got {m}")));
    }
    if !(cb.c > 0.0) || !(cb.alpha < 1.0) || !(cb.m_const >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "degenerate constants c = {}, alpha = {}, M = {}",
            cb.c, cb.alpha, cb.m_const
        )));
    }
    let m0 = m * (d.projector_norm(Part::P) + d.projector_norm(Part::Q));
    let q_plus = d.projector_norm(Part::QPlus);
    let q_minus = d.projector_norm(Part::QMinus);
    let decay = if cb.c.is_infinite() { 0.0 } else { (-cb.c).exp() / cb.c };
    let plus_part = m0 * cb.m_const * q_plus * (decay + 1.0 / (1.0 - cb.alpha));
    let c_prime = d
        .idx_minus
        .iter()
        .map(|&i| (d.eigenvalue(i) + cb.delta).powf(cb.alpha))
        .fold(0.0, f64::max);
    let minus_part = if q_minus == 0.0 {
        0.0
    } else {
        m0 * c_prime * cb.m_const * q_minus / cb.c
    };
    Ok(AprioriRadii {
        m0,
        plus_part,
        minus_part,
        c_prime,
        r1: plus_part + minus_part,
    })
}

/// `R₁ = m₀M‖Q₊‖(e^{−c}/c + 1/(1−α)) + m₀C′M‖Q₋‖/c`.
pub fn apriori_radius_r1(model: &NonlinearityModel, d: &Decomposition, cb: &ConstantsBundle) -> Result<f64> {
    Ok(apriori_radii(model, d, cb)?.r1)
}

/// `I(ū) = ∫_{ū>0} f₊ū + ∫_{ū<0} f₋ū` at nodal values of `ū`.
fn ll_integral(model: &NonlinearityModel, gk: &Galerkin, u: &SpectralState) -> f64 {
    let (f_plus, f_minus) = model.limits.as_ref().expect("checked by caller");
    let (values, _) = gk.synthesize(u);
    let grid = gk.grid();
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .zip(&values)
        .map(|((&x, &w), &v)| {
            if v > 0.0 {
                w * f_plus(x) * v
            } else if v < 0.0 {
                w * f_minus(x) * v
            } else {
                0.0
            }
        })
        .sum()
}

/// Landesman-Lazer integrals over `n_sphere_samples` points of the unit sphere of `X₀`.
pub fn check_landesman_lazer(
    model: &NonlinearityModel,
    es: &EigenSystem,
    k: usize,
    grid: &QuadratureGrid,
    n_sphere_samples: usize,
) -> Result<ConditionVerdict> {
    if model.limits.is_none() {
        return Err(Error::InsufficientMetadata(format!(
            "{} has no limits f+ / f-",
            model.name
        )));
    }
    let d = decompose(es, k)?;
    let gk = Galerkin::new(es, grid)?;
    let samples = kernel_directions(&d, n_sphere_samples.max(1), 0)
        .into_iter()
        .map(|u| Witness {
            value: ll_integral(model, &gk, &u),
            point: u.0,
        })
        .collect();
    Ok(sign_verdict(Condition::LL1, Condition::LL2, samples, PAIRING_TOLERANCE))
}

/// `∫ f_∞` plus a sampled check of the floor `f·s ≥ h` (or ceiling `f·s ≤ h`).
pub fn check_strong_resonance(
    model: &NonlinearityModel,
    es: &EigenSystem,
    grid: &QuadratureGrid,
    sample_spec: &BoundSampleSpec,
) -> Result<ConditionVerdict> {
    let (Some(f_inf), Some(floor)) = (&model.limit_infty, &model.floor_h) else {
        return Err(Error::InsufficientMetadata(format!(
            "{} has no finite limit f_inf with an integrable floor h",
            model.name
        )));
    };
    if let Some(length) = es.length() {
        if (length - grid.length).abs() > 1e-12 * length {
            return Err(Error::InvalidArgument("quadrature grid does not match the domain".into()));
        }
    }
    let integral = grid.integrate(|x| f_inf(x));
    let sign = match floor.kind {
        FloorKind::Below => 1.0,
        FloorKind::Above => -1.0,
    };
    // signed slack of the floor inequality, >= 0 where it holds
    let xs = sample_spec.x_values();
    let ys = sample_spec.y_values();
    let mut worst = Witness {
        point: vec![xs[0], 0.0, 0.0],
        value: f64::INFINITY,
    };
    let mut n = 0;
    for s in sample_spec.s_values() {
        for &y in &ys {
            for &x in &xs {
                let slack = sign * (model.eval(x, s, y) * s - (floor.h)(x));
                n += 1;
                if slack < worst.value || slack.is_nan() {
                    worst = Witness {
                        point: vec![x, s, y],
                        value: if slack.is_nan() { f64::NEG_INFINITY } else { slack },
                    };
                }
            }
        }
    }
    let floor_ok = worst.value >= -1e-12;
    let condition = match floor.kind {
        FloorKind::Below if floor_ok && integral > PAIRING_TOLERANCE => Some(Condition::SR1),
        FloorKind::Above if floor_ok && integral < -PAIRING_TOLERANCE => Some(Condition::SR2),
        _ => None,
    };
    let mut caveats = vec!["strong-resonance implication is stated for domains of dimension n >= 3; checked here in 1D".to_string()];
    if !floor_ok {
        caveats.push(format!(
            "floor inequality fails at (x, s, y) = ({:.4}, {:.4e}, {:.4})",
            worst.point[0], worst.point[1], worst.point[2]
        ));
    }
    Ok(ConditionVerdict {
        condition,
        holds: condition.is_some(),
        min_value: worst.value,
        max_value: integral,
        witnesses: vec![worst],
        radius_r: None,
        tolerance: PAIRING_TOLERANCE,
        n_samples: n,
        integral: Some(integral),
        caveats,
    })
}

/// Sample counts for [`check_g_direct`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GSampleSpec {
    pub ball_samples: usize,
    pub radii: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for GSampleSpec {
    fn default() -> Self {
        Self {
            ball_samples: 64,
            radii: 32,
            directions: 2,
            seed: 0,
        }
    }
}

/// Geometric radii `R·10^{j/(n−1)}`, `j = 0..n`.
fn radius_grid(r: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![r];
    }
    (0..n)
        .map(|j| r * 10f64.powf(j as f64 / (n - 1) as f64))
        .collect()
}

/// Monte-Carlo test of `⟨F(x+y), x⟩ ≷ 0` for `y` in the `α`-ball of `X₊⊕X₋` and
/// `x ∈ X₀` with `‖x‖ ∈ [R, 10R]`.
#[allow(clippy::too_many_arguments)]
pub fn check_g_direct(
    model: &NonlinearityModel,
    es: &EigenSystem,
    d: &Decomposition,
    grid: &QuadratureGrid,
    alpha: f64,
    ball_radius_alpha: f64,
    r_candidate: f64,
    spec: &GSampleSpec,
) -> Result<ConditionVerdict> {
    if !(r_candidate > 0.0) || !(ball_radius_alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need R > 0 and ball radius >= 0, got R = {r_candidate}, ball = {ball_radius_alpha}"
        )));
    }
    let gk = Galerkin::new(es, grid)?;
    let weights = alpha_weights(es, alpha, 0.0)?;
    let radii = radius_grid(r_candidate, spec.radii);
    let dirs = kernel_directions(d, spec.directions.max(1), spec.seed);
    let ys: Vec<SpectralState> = (0..spec.ball_samples.max(1))
        .map(|i| uniform_in_q_ball(&mut stream(spec.seed, i as u64), d, &weights, ball_radius_alpha))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..ys.len())
        .flat_map(|i| (0..dirs.len()).map(move |j| (i, j)))
        .collect();
    let nodes = &grid.nodes;
    let samples: Vec<Witness> = jobs
        .par_iter()
        .flat_map_iter(|&(i, j)| {
            let (y, omega) = (&ys[i], &dirs[j]);
            let (yv, ys_) = gk.synthesize(y);
            let (wv, ws) = gk.synthesize(omega);
            let gk = &gk;
            radii.iter().map(move |&r| {
                let g: Vec<f64> = (0..nodes.len())
                    .map(|q| model.eval(nodes[q], yv[q] + r * wv[q], ys_[q] + r * ws[q]))
                    .collect();
                let pairing: f64 = d.idx0.iter().map(|&m| r * omega[m] * gk.project_mode(&g, m)).sum();
                let mut point = y.clone();
                point.axpy(r, omega);
                Witness { point: point.0, value: pairing }
            })
        })
        .collect();
    let mut verdict = sign_verdict(Condition::G1, Condition::G2, samples, PAIRING_TOLERANCE);
    verdict.radius_r = Some(r_candidate);
    Ok(verdict)
}

/// Geometric search grid for the kernel radius `R_P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSearch {
    pub start: f64,
    pub factor: f64,
    pub cap: f64,
    pub samples: GSampleSpec,
}

impl Default for RadiusSearch {
    fn default() -> Self {
        Self {
            start: 0.125,
            factor: 2.0,
            cap: 1e6,
            samples: GSampleSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolatingNeighborhood {
    /// `α`-norm radius of `N₁ ⊂ X₊⊕X₋`, equal to `R₁ + 1`.
    pub r_q: f64,
    /// `H`-norm radius of `N₂ ⊂ X₀`.
    pub r_p: f64,
    pub r1: f64,
    pub radii: AprioriRadii,
    pub condition: Condition,
    pub verdict: ConditionVerdict,
    pub k: usize,
}

impl IsolatingNeighborhood {
    pub fn contains(&self, u: &SpectralState, es: &EigenSystem, d: &Decomposition, alpha: f64, delta: f64) -> Result<bool> {
        let q = crate::spectral::project(u, d, Part::Q)?;
        let p = crate::spectral::project(u, d, Part::P)?;
        Ok(crate::spectral::fractional_norm_with(&q, es, alpha, delta)? <= self.r_q && p.norm() <= self.r_p)
    }
}

/// `N = N₁ ⊕ N₂` with `R_Q = R₁ + 1` and the smallest `R_P` on the search grid
/// for which the geometric check passes.
pub fn build_isolating_neighborhood(
    model: &NonlinearityModel,
    es: &EigenSystem,
    d: &Decomposition,
    cb: &ConstantsBundle,
    grid: &QuadratureGrid,
    search: &RadiusSearch,
) -> Result<IsolatingNeighborhood> {
    if !(search.start > 0.0 && search.factor > 1.0) {
        return Err(Error::InvalidArgument("radius search needs start > 0 and factor > 1".into()));
    }
    let radii = apriori_radii(model, d, cb)?;
    let r_q = radii.r1 + 1.0;
    let mut r = search.start;
    let mut last = None;
    while r <= search.cap {
        let verdict = check_g_direct(model, es, d, grid, cb.alpha, r_q, r, &search.samples)?;
        if let (true, Some(condition)) = (verdict.holds, verdict.condition) {
            return Ok(IsolatingNeighborhood {
                r_q,
                r_p: r,
                r1: radii.r1,
                radii,
                condition,
                verdict,
                k: d.k,
            });
        }
        last = Some(verdict);
        r *= search.factor;
    }
    let detail = last.map_or(String::new(), |v| {
        format!(": pairings span [{:.3e}, {:.3e}] at the cap", v.min_value, v.max_value)
    });
    Err(Error::ConditionNotVerified(format!(
        "no radius up to {} gives a uniform sign for {}{detail}",
        search.cap, model.name
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::builtin::*;
    use crate::spectral::build_laplacian_1d;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn setup(n: usize, k: usize) -> (EigenSystem, Decomposition, QuadratureGrid) {
        let es = build_laplacian_1d(n, PI).unwrap();
        let d = decompose(&es, k).unwrap();
        let grid = QuadratureGrid::default_for(PI, n).unwrap();
        (es, d, grid)
    }

    #[test]
    fn r1_with_empty_minus_space() {
        let (_, d, _) = setup(8, 1);
        let model = arctan(1.0);
        let cb = ConstantsBundle::new(0.8, 0.0, 1.0, 5.0).unwrap();
        let m = PI / 2.0;
        let r = apriori_radii(&model, &d, &cb).unwrap();
        assert_relative_eq!(r.r1, 2.0 * m * ((-5f64).exp() / 5.0 + 5.0), max_relative = 1e-14);
        assert_eq!(r.minus_part, 0.0);
    }

    #[test]
    fn r1_large_gap_limit() {
        let (_, d, _) = setup(8, 1);
        let model = arctan(1.0);
        let cb = ConstantsBundle::new(0.8, 0.0, 1.0, 1e6).unwrap();
        assert_relative_eq!(apriori_radius_r1(&model, &d, &cb).unwrap(), PI / 0.2, max_relative = 1e-12);
    }

    #[test]
    fn r1_at_resonance_k2() {
        let (_, d, _) = setup(16, 2);
        let model = arctan_minus_gauss(1.0, 2.5);
        let cb = ConstantsBundle::new(0.8, 0.0, 1.0, 5.0).unwrap();
        let m = PI / 2.0 + 2.5 / (2.0 * std::f64::consts::E).sqrt();
        let m0 = 2.0 * m;
        let expected = m0 * ((-5f64).exp() / 5.0 + 5.0) + m0 * 1.0 / 5.0;
        assert_relative_eq!(apriori_radius_r1(&model, &d, &cb).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn landesman_lazer_for_arctan() {
        let (es, _, grid) = setup(32, 2);
        let v = check_landesman_lazer(&arctan(1.0), &es, 2, &grid, 2).unwrap();
        assert_eq!(v.condition, Some(Condition::LL1));
        for w in &v.witnesses {
            assert_abs_diff_eq!(w.value, (2.0 * PI).sqrt(), epsilon = 1e-10);
        }
        let v = check_landesman_lazer(&arctan(-1.0), &es, 2, &grid, 2).unwrap();
        assert_eq!(v.condition, Some(Condition::LL2));
        assert_abs_diff_eq!(v.max_value, -(2.0 * PI).sqrt(), epsilon = 1e-10);
        let v = check_landesman_lazer(&strong_res(1.0), &es, 2, &grid, 2).unwrap();
        assert!(!v.holds);
        assert_eq!(v.condition, None);
        assert!(matches!(
            check_landesman_lazer(&const_kernel(2, PI), &es, 2, &grid, 2),
            Err(Error::InsufficientMetadata(_))
        ));
    }

    #[test]
    fn strong_resonance_examples() {
        let (es, _, grid) = setup(16, 2);
        let spec = BoundSampleSpec::for_length(PI);
        let v = check_strong_resonance(&strong_res(1.0), &es, &grid, &spec).unwrap();
        assert_eq!(v.condition, Some(Condition::SR1));
        assert_abs_diff_eq!(v.integral.unwrap(), PI, epsilon = 1e-12);
        let v = check_strong_resonance(&strong_res(-4.0), &es, &grid, &spec).unwrap();
        assert_eq!(v.condition, Some(Condition::SR2));
        assert_abs_diff_eq!(v.integral.unwrap(), -4.0 * PI, epsilon = 1e-12);
        assert!(matches!(
            check_strong_resonance(&arctan(1.0), &es, &grid, &spec),
            Err(Error::InsufficientMetadata(_))
        ));
        let v = check_strong_resonance(&strong_res_cos(1.0, PI), &es, &grid, &spec).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn g_check_signs() {
        let (es, d, grid) = setup(12, 2);
        let cb = ConstantsBundle::diagonal(0.8, 0.0, &d).unwrap();
        let spec = GSampleSpec {
            ball_samples: 8,
            radii: 4,
            ..Default::default()
        };
        let model = arctan(1.0);
        let r_q = apriori_radius_r1(&model, &d, &cb).unwrap() + 1.0;
        let v = check_g_direct(&model, &es, &d, &grid, 0.8, r_q, 100.0, &spec).unwrap();
        assert_eq!(v.condition, Some(Condition::G1));
        assert_eq!(v.n_samples, 8 * 4 * 2);
        let v = check_g_direct(&strong_res(-4.0), &es, &d, &grid, 0.8, r_q, 100.0, &spec).unwrap();
        assert_eq!(v.condition, Some(Condition::G2));
        // a constant kernel source pairs with +R and -R on the two kernel directions
        let v = check_g_direct(&const_kernel(2, PI), &es, &d, &grid, 0.8, r_q, 10.0, &spec).unwrap();
        assert_eq!(v.condition, None);
        assert_abs_diff_eq!(v.max_value, 100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v.min_value, -100.0, epsilon = 1e-9);
    }

    #[test]
    fn g_check_is_deterministic() {
        let (es, d, grid) = setup(10, 2);
        let spec = GSampleSpec {
            ball_samples: 6,
            radii: 3,
            seed: 42,
            ..Default::default()
        };
        let model = arctan_minus_gauss(1.0, 2.5);
        let a = check_g_direct(&model, &es, &d, &grid, 0.8, 5.0, 3.0, &spec).unwrap();
        let b = check_g_direct(&model, &es, &d, &grid, 0.8, 5.0, 3.0, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn neighborhood_for_mixed_sign_source_is_rejected() {
        let (es, d, grid) = setup(10, 2);
        let cb = ConstantsBundle::diagonal(0.8, 0.0, &d).unwrap();
        let search = RadiusSearch {
            cap: 100.0,
            samples: GSampleSpec {
                ball_samples: 4,
                radii: 3,
                ..Default::default()
            },
            ..Default::default()
        };
        let err = build_isolating_neighborhood(&strong_res_cos(1.0, PI), &es, &d, &cb, &grid, &search);
        assert!(matches!(err, Err(Error::ConditionNotVerified(_))));
        let err = build_isolating_neighborhood(&const_kernel(2, PI), &es, &d, &cb, &grid, &search);
        assert!(matches!(err, Err(Error::ConditionNotVerified(_))));
    }

    #[test]
    fn implied_conditions() {
        assert_eq!(Condition::LL1.implied_geometric(), Condition::G1);
        assert_eq!(Condition::SR2.implied_geometric(), Condition::G2);
        assert_eq!("SR1".parse::<Condition>().unwrap(), Condition::SR1);
    }
}
