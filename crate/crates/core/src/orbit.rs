//! Numeric search for nonzero orbits with the origin at one end: shooting along
//! the unstable manifold of `0`, and forward attraction from seeded starts in `N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::IsolatingNeighborhood;
use crate::conley::check_hyperbolic;
use crate::error::{Error, Result};
use crate::sampling::{kernel_directions, stream, uniform_in_q_ball};
use crate::semiflow::{IntegratorConfig, Semiflow, Trajectory};
use crate::spectral::{EigenSystem, SpectralState};

/// `H`-norm below which a state counts as the origin.
pub const CONVERGENCE_NORM: f64 = 1e-6;
/// How long the state has to stay below [`CONVERGENCE_NORM`].
pub const CONVERGENCE_WINDOW: f64 = 10.0;
/// Relative residual below which a resident state counts as an equilibrium.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-6;

/// `{‖Qu‖_α ≤ R_Q, ‖Pu‖_H ≤ R_P}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub r_q: f64,
    pub r_p: f64,
}

impl From<&IsolatingNeighborhood> for Region {
    fn from(n: &IsolatingNeighborhood) -> Self {
        Self { r_q: n.r_q, r_p: n.r_p }
    }
}

impl Region {
    pub fn contains(&self, flow: &Semiflow<'_>, u: &SpectralState) -> bool {
        flow.q_alpha_norm(u) <= self.r_q && flow.p_norm(u) <= self.r_p
    }
}

/// Modes with `λ + ν − λ_i > 0`.
pub fn unstable_directions(es: &EigenSystem, lambda: f64, nu: f64) -> Result<Vec<usize>> {
    check_hyperbolic(es, lambda, nu)?;
    Ok((0..es.n_modes()).filter(|&i| lambda + nu - es.eigenvalue(i) > 0.0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShotClass {
    BoundedInN,
    ExitsN,
    ConvergesToZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub sign: f64,
    pub epsilon: f64,
    pub class: ShotClass,
    pub exit_time: Option<f64>,
    pub final_h_norm: f64,
    /// `‖(λ − A)u + F(u)‖ / max(1, ‖u‖)` at the last state.
    pub equilibrium_residual: f64,
    pub nonzero_equilibrium: bool,
    /// First time `‖u‖_H` reached the common threshold `10³·ε₀`.
    pub threshold_time: Option<f64>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
}

/// Comparison of a shot with its restart from `ε/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingCheck {
    pub sign: f64,
    /// `log 2 / (λ + ν − λ_j)` for the fastest unstable mode `j` in the direction.
    pub predicted_shift: f64,
    pub measured_shift: Option<f64>,
    pub same_class: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotReport {
    pub direction: Vec<f64>,
    pub epsilon: f64,
    pub growth_rate: f64,
    pub shots: Vec<Shot>,
    pub halving: Vec<HalvingCheck>,
}

impl ShotReport {
    /// True if some shot stays in `N` or settles on a nonzero equilibrium.
    pub fn has_bounded_witness(&self) -> bool {
        self.shots
            .iter()
            .any(|s| s.class == ShotClass::BoundedInN || s.nonzero_equilibrium)
    }
}

fn run_shot(
    flow: &Semiflow<'_>,
    region: &Region,
    u0: &SpectralState,
    cfg: &IntegratorConfig,
    threshold: f64,
) -> Result<(Trajectory, Option<f64>, Option<f64>, bool)> {
    let mut crossed = None;
    let mut below_since: Option<f64> = None;
    let mut exited = None;
    let mut converged = false;
    let traj = flow.integrate_until(u0, cfg, |t, u| {
        let h = u.norm();
        if crossed.is_none() && h >= threshold {
            crossed = Some(t);
        }
        if !region.contains(flow, u) {
            exited = Some(t);
            return true;
        }
        if h < CONVERGENCE_NORM {
            let since = *below_since.get_or_insert(t);
            if t - since >= CONVERGENCE_WINDOW {
                converged = true;
                return true;
            }
        } else {
            below_since = None;
        }
        false
    })?;
    Ok((traj, crossed, exited, converged))
}

fn classify_shot(
    flow: &Semiflow<'_>,
    sign: f64,
    epsilon: f64,
    run: (Trajectory, Option<f64>, Option<f64>, bool),
) -> Shot {
    let (traj, crossed, exited, converged) = run;
    let last = traj.last_state();
    let norm = last.norm();
    let residual = flow.residual(last) / norm.max(1.0);
    let class = if exited.is_some() {
        ShotClass::ExitsN
    } else if converged {
        ShotClass::ConvergesToZero
    } else {
        ShotClass::BoundedInN
    };
    Shot {
        sign,
        epsilon,
        class,
        exit_time: exited,
        final_h_norm: norm,
        equilibrium_residual: residual,
        nonzero_equilibrium: class == ShotClass::BoundedInN && residual < EQUILIBRIUM_RESIDUAL && norm > 1e-3,
        threshold_time: crossed,
        trajectory: Some(traj),
    }
}

/// Integrates forward from `±ε·direction` and classifies each shot; repeats from
/// `±ε/2` to check the linear time shift along the unstable manifold.
pub fn shoot_from_origin(
    flow: &Semiflow<'_>,
    nu: f64,
    direction: &SpectralState,
    epsilon: f64,
    cfg: &IntegratorConfig,
    region: &Region,
) -> Result<ShotReport> {
    let es = flow.galerkin().eigensystem();
    es.check_state(direction)?;
    let lambda = flow.lambda();
    let unstable = unstable_directions(es, lambda, nu)?;
    if unstable.is_empty() {
        return Err(Error::Inapplicable(
            "the origin has no unstable directions; use forward attraction instead".into(),
        ));
    }
    if let Some(i) = (0..direction.len()).find(|&i| direction[i] != 0.0 && !unstable.contains(&i)) {
        return Err(Error::InvalidArgument(format!(
            "shooting direction has a component on the stable mode {}",
            i + 1
        )));
    }
    let norm = direction.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("shooting direction is zero".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 1e-3 * region.r_p) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1e-3 R_P] = (0, {}], got {epsilon}",
            1e-3 * region.r_p
        )));
    }
    let dir = direction.scaled(1.0 / norm);
    let growth_rate = (0..dir.len())
        .filter(|&i| dir[i] != 0.0)
        .map(|i| lambda + nu - es.eigenvalue(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = 1e3 * epsilon;
    let runs: Vec<(f64, f64)> = [1.0, -1.0]
        .into_iter()
        .flat_map(|sign| [(sign, epsilon), (sign, epsilon / 2.0)])
        .collect();
    let shots: Vec<Shot> = runs
        .par_iter()
        .map(|&(sign, eps)| {
            let run = run_shot(flow, region, &dir.scaled(sign * eps), cfg, threshold)?;
            Ok(classify_shot(flow, sign, eps, run))
        })
        .collect::<Result<_>>()?;
    let predicted_shift = std::f64::consts::LN_2 / growth_rate;
    let halving = shots
        .chunks(2)
        .map(|pair| {
            let measured_shift = match (pair[0].threshold_time, pair[1].threshold_time) {
                (Some(a), Some(b)) => Some(b - a),
                _ => None,
            };
            let same_class = pair[0].class == pair[1].class;
            let consistent = same_class
                && measured_shift
                    .is_some_and(|m| (m - predicted_shift).abs() <= 0.05 * predicted_shift + 2.0 * cfg.step_h);
            HalvingCheck {
                sign: pair[0].sign,
                predicted_shift,
                measured_shift,
                same_class,
                consistent,
            }
        })
        .collect();
    let shots = shots.into_iter().step_by(2).collect();
    Ok(ShotReport {
        direction: dir.0,
        epsilon,
        growth_rate,
        shots,
        halving,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StartClass {
    ConvergesToZero,
    ResidentInN,
    ExitsN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub index: usize,
    pub start: Vec<f64>,
    pub start_h_norm: f64,
    pub class: StartClass,
    pub exit_time: Option<f64>,
    pub min_h_norm: f64,
    /// Dipped below `10⁻³` without settling at the origin.
    pub near_return: bool,
    pub final_state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub n_starts: usize,
    pub converged: usize,
    pub resident: usize,
    pub exited: usize,
    pub outcomes: Vec<StartOutcome>,
    /// Trajectories of the first few converging starts.
    #[serde(skip)]
    pub witness_trajectories: Vec<(usize, Trajectory)>,
}

impl OrbitReport {
    pub fn witnesses(&self) -> impl Iterator<Item = &StartOutcome> {
        self.outcomes.iter().filter(|o| o.class == StartClass::ConvergesToZero)
    }
}

/// Seeded starts in `N`: the first half on the kernel slice `Q = 0`, the rest
/// with a uniform `Q`-part in the `α`-ball. Kernel radii lie in `[0.1, 1]·R_P`.
pub fn attraction_starts(flow: &Semiflow<'_>, region: &Region, n_starts: usize, seed: u64) -> Vec<SpectralState> {
    let d = flow.decomposition();
    let n_kernel = if d.dim_x0 == 0 { 0 } else { n_starts.div_ceil(2) };
    let dirs = kernel_directions(d, n_kernel.max(n_starts), seed);
    (0..n_starts)
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            if i < n_kernel {
                let r = region.r_p * (0.1 + 0.9 * (i / 2) as f64 / n_kernel.div_ceil(2).max(1) as f64);
                dirs[i].scaled(r)
            } else {
                let mut u = uniform_in_q_ball(&mut rng, d, flow.alpha_weights(), region.r_q);
                let r = region.r_p * (0.1 + 0.9 * rand::Rng::random::<f64>(&mut rng));
                if d.dim_x0 > 0 {
                    u.axpy(r, &dirs[i]);
                }
                u
            }
        })
        .collect()
}

/// Integrates forward from `n_starts` seeded points of `N` and reports which
/// starts settle at the origin, stay in `N`, or leave it.
pub fn forward_attraction_search(
    flow: &Semiflow<'_>,
    region: &Region,
    n_starts: usize,
    cfg: &IntegratorConfig,
    seed: u64,
    keep_trajectories: usize,
) -> Result<OrbitReport> {
    let starts = attraction_starts(flow, region, n_starts, seed);
    let runs: Vec<(StartOutcome, Trajectory)> = starts
        .par_iter()
        .enumerate()
        .map(|(index, u0)| {
            let (traj, _, exited, converged) = run_shot(flow, region, u0, cfg, f64::INFINITY)?;
            let min_h_norm = traj.h_norms.iter().copied().fold(f64::INFINITY, f64::min);
            let class = if exited.is_some() {
                StartClass::ExitsN
            } else if converged {
                StartClass::ConvergesToZero
            } else {
                StartClass::ResidentInN
            };
            let outcome = StartOutcome {
                index,
                start: u0.0.clone(),
                start_h_norm: u0.norm(),
                class,
                exit_time: exited,
                min_h_norm,
                near_return: class != StartClass::ConvergesToZero && min_h_norm < 1e-3,
                final_state: traj.last_state().0.clone(),
            };
            Ok((outcome, traj))
        })
        .collect::<Result<_>>()?;
    let mut report = OrbitReport {
        n_starts,
        converged: 0,
        resident: 0,
        exited: 0,
        outcomes: Vec::with_capacity(n_starts),
        witness_trajectories: Vec::new(),
    };
    for (outcome, traj) in runs {
        match outcome.class {
            StartClass::ConvergesToZero => {
                report.converged += 1;
                if report.witness_trajectories.len() < keep_trajectories {
                    report.witness_trajectories.push((outcome.index, traj));
                }
            }
            StartClass::ResidentInN => report.resident += 1,
            StartClass::ExitsN => report.exited += 1,
        }
        report.outcomes.push(outcome);
    }
    Ok(report)
}

/// Least-squares slope of `values` against `times`.
pub fn fit_slope(times: &[f64], values: &[f64]) -> f64 {
    let n = times.len().min(values.len()) as f64;
    let mt = times.iter().sum::<f64>() / n;
    let mv = values.iter().sum::<f64>() / n;
    let (num, den) = times
        .iter()
        .zip(values)
        .fold((0.0, 0.0), |(a, b), (t, v)| (a + (t - mt) * (v - mv), b + (t - mt).powi(2)));
    num / den
}

/// Slope of the coefficient of `mode` over saved times in `[t0, t1]`.
pub fn drift_slope(traj: &Trajectory, mode: usize, t0: f64, t1: f64) -> f64 {
    let (times, values): (Vec<f64>, Vec<f64>) = traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(t, u)| (*t, u[mode]))
        .unzip();
    fit_slope(&times, &values)
}
