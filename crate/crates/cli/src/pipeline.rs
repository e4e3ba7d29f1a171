//! The experiment pipeline: hypotheses, sign conditions, indices, criterion, orbit search.

use std::path::{Path, PathBuf};

use resonance_core::conditions::{
    apriori_radii, build_isolating_neighborhood, check_landesman_lazer, check_strong_resonance, ConditionVerdict,
    GSampleSpec, IsolatingNeighborhood, RadiusSearch,
};
use resonance_core::conley::{
    connecting_orbit_criterion, index_of_bounded_invariant_set, linear_index_check, verify_isolating_block,
    BlockReport, BoundarySampling, ExitSet,
};
use resonance_core::homotopy::{equal, smash, HomotopyType};
use resonance_core::nonlinearity::{
    estimate_linearization, from_registry, verify_bound, BoundSampleSpec, NonlinearityModel, REGISTRY,
};
use resonance_core::orbit::{
    drift_slope, forward_attraction_search, shoot_from_origin, unstable_directions, Region, ShotClass, StartClass,
};
use resonance_core::semiflow::{IntegratorConfig, Semiflow, Trajectory};
use resonance_core::spectral::{build_laplacian_1d, decompose, EigenSystem};
use resonance_core::{ConstantsBundle, Decomposition, Error as CoreError, QuadratureGrid};

use crate::artifacts::{plot_script, read_table, save_trajectory};
use crate::config::{ConfigError, LoadedConfig, Mode};
use crate::experiments::BUNDLED;
use crate::report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// At most this many unstable modes are shot along.
const MAX_SHOT_MODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Everything.
    Run,
    /// Hypotheses, sign conditions and the neighbourhood.
    Check,
    /// Hypotheses, the neighbourhood and the orbit search.
    Orbit,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Numerical(#[from] CoreError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => EXIT_CONFIG,
            PipelineError::Numerical(_) => EXIT_NUMERICAL,
            PipelineError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub timestamp: Option<u64>,
}

/// Report, exit code and the trajectories to be written as CSV.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
    pub trajectories: Vec<(String, Trajectory)>,
    pub kernel_modes: Vec<usize>,
    pub n_modes: usize,
}

/// Text of `list`: built-in nonlinearities, then bundled experiments.
pub fn list_registry() -> String {
    let mut s = String::from("nonlinearities:\n");
    for e in REGISTRY {
        s.push_str(&format!("  {:<20} {:<34} {}\n", e.name, e.signature, e.description));
    }
    s.push_str("experiments:\n");
    for (name, text) in BUNDLED {
        let description = LoadedConfig::from_str(text, name, None)
            .map(|c| c.config.experiment.description)
            .unwrap_or_default();
        s.push_str(&format!("  {name:<20} {description}\n"));
    }
    s
}

fn build_model(cfg: &LoadedConfig) -> Result<NonlinearityModel, ConfigError> {
    let nl = &cfg.config.nonlinearity;
    if nl.name == "tabulated" {
        let path = cfg.table_path().expect("validated at load");
        let table = read_table(&path).map_err(|m| cfg.error_at("nonlinearity", "table", m))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(table.into_model(format!("tabulated({stem})")));
    }
    from_registry(&nl.name, &nl.params, cfg.length).map_err(|e| {
        let key = if e.to_string().contains("parameters") || e.to_string().contains("positive integer") {
            "params"
        } else {
            "name"
        };
        cfg.error_at("nonlinearity", key, e.to_string())
    })
}

fn verdict_entry(check: &str, v: &ConditionVerdict) -> VerdictEntry {
    VerdictEntry {
        check: check.into(),
        condition: v.label(),
        holds: v.holds,
        min_value: Some(v.min_value),
        max_value: Some(v.max_value),
        integral: v.integral,
        r: v.radius_r,
        n_samples: Some(v.n_samples),
        note: (!v.caveats.is_empty()).then(|| v.caveats.join("; ")),
    }
}

fn missing_entry(check: &str, reason: String) -> VerdictEntry {
    VerdictEntry {
        check: check.into(),
        condition: "neither".into(),
        holds: false,
        note: Some(reason),
        ..Default::default()
    }
}

fn shot_class(c: ShotClass) -> &'static str {
    match c {
        ShotClass::BoundedInN => "BOUNDED_IN_N",
        ShotClass::ExitsN => "EXITS_N",
        ShotClass::ConvergesToZero => "CONVERGES_TO_ZERO",
    }
}

fn kernel_factor(d: &Decomposition, v: &ConditionVerdict) -> HomotopyType {
    use resonance_core::conditions::Condition;
    match v.condition {
        Some(Condition::G1) => HomotopyType::sphere(d.dim_x0 as u32),
        _ => HomotopyType::sphere(0),
    }
}

/// Shared state of one experiment.
struct Context<'a> {
    cfg: &'a LoadedConfig,
    seed: u64,
    model: NonlinearityModel,
    es: EigenSystem,
    d: Decomposition,
    cb: ConstantsBundle,
    grid: QuadratureGrid,
}

impl Context<'_> {
    fn flow(&self) -> Result<Semiflow<'_>, CoreError> {
        let c = &self.cfg.config.constants;
        Semiflow::new(&self.model, &self.es, &self.d, &self.grid, self.d.lambda)?.with_norm(c.alpha, c.delta)
    }

    fn search(&self) -> RadiusSearch {
        let ch = &self.cfg.config.checks;
        RadiusSearch {
            start: ch.radius_start,
            factor: 2.0,
            cap: ch.radius_cap,
            samples: GSampleSpec {
                ball_samples: ch.ball_samples,
                radii: ch.radii,
                directions: ch.directions,
                seed: self.seed,
            },
        }
    }

    fn sampling(&self, r_q: f64, r_p: f64) -> BoundarySampling {
        BoundarySampling {
            r_q,
            r_p,
            n_samples: self.cfg.config.checks.boundary_samples,
            seed: self.seed,
        }
    }

    /// Smallest `R_P` on the search grid passing the sampled sign check and, with
    /// `with_block`, the boundary-derivative signs along the homotopy.
    fn neighborhood(
        &self,
        report: &mut Report,
        with_block: bool,
    ) -> Result<Option<(IsolatingNeighborhood, Option<BlockReport>)>, CoreError> {
        let c = &self.cfg.config;
        let mut search = self.search();
        loop {
            let nb = match build_isolating_neighborhood(&self.model, &self.es, &self.d, &self.cb, &self.grid, &search) {
                Ok(nb) => nb,
                Err(CoreError::ConditionNotVerified(msg)) => {
                    report.verdicts.push(missing_entry("G", msg.clone()));
                    report.failures.push(format!("no isolating neighbourhood: {msg}"));
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let block = if with_block {
                let flow = self.flow()?;
                let sampling = self.sampling(nb.r_q, nb.r_p);
                let (alpha, delta) = (c.constants.alpha, c.constants.delta);
                match verify_isolating_block(&flow, alpha, delta, &c.checks.s_values, &sampling, Some(nb.condition)) {
                    Ok(block) => Some(block),
                    Err(e @ CoreError::BlockVerificationFailed { .. }) => {
                        search.start = nb.r_p * search.factor;
                        if search.start > search.cap {
                            report.verdicts.push(verdict_entry("G", &nb.verdict));
                            report.failures.push(format!("R_P = {}: {e}", nb.r_p));
                            return Ok(None);
                        }
                        report.notes.push(format!("R_P = {}: {e}; retrying from {}", nb.r_p, search.start));
                        continue;
                    }
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            report.verdicts.push(verdict_entry("G", &nb.verdict));
            report.neighborhood = Some(NeighborhoodEntry {
                condition: nb.condition.to_string(),
                r1: nb.r1,
                r1_plus_part: nb.radii.plus_part,
                r1_minus_part: nb.radii.minus_part,
                m0: nb.radii.m0,
                r_q: nb.r_q,
                r_p: nb.r_p,
                margin: nb.verdict.margin(),
            });
            return Ok(Some((nb, block)));
        }
    }
}

/// Runs `stage` of the experiment described by `cfg`.
pub fn run_experiment(cfg: &LoadedConfig, stage: Stage, opts: &RunOptions) -> Result<Outcome, PipelineError> {
    let c = &cfg.config;
    let seed = opts.seed.unwrap_or(c.checks.seed);
    let model = build_model(cfg)?;
    let es = build_laplacian_1d(c.operator.n_modes, cfg.length)?;
    let d = decompose(&es, c.operator.k)?;
    let cb = ConstantsBundle::diagonal(c.constants.alpha, c.constants.delta, &d)?;
    let grid = QuadratureGrid::default_for(cfg.length, c.operator.n_modes)?;
    let ctx = Context {
        cfg,
        seed,
        model,
        es,
        d,
        cb,
        grid,
    };
    let mut outcome = Outcome {
        report: Report {
            experiment: ExperimentInfo {
                name: c.experiment.name.clone(),
                mode: match c.experiment.mode {
                    Mode::Criterion => "criterion".into(),
                    Mode::Drift => "drift".into(),
                },
                seed,
                timestamp: opts.timestamp,
                n_modes: c.operator.n_modes,
                length: cfg.length,
                k: c.operator.k,
                lambda: ctx.d.lambda,
                nonlinearity: ctx.model.name.clone(),
                alpha: c.constants.alpha,
                delta: c.constants.delta,
            },
            ..Default::default()
        },
        exit_code: EXIT_OK,
        trajectories: Vec::new(),
        kernel_modes: ctx.d.idx0.clone(),
        n_modes: c.operator.n_modes,
    };
    let report = &mut outcome.report;

    let bound = verify_bound(&ctx.model, &BoundSampleSpec::for_length(cfg.length));
    report.hypotheses.bound_m = bound.bound_m;
    report.hypotheses.max_abs_f = bound.max_abs;
    report.hypotheses.e2_holds = bound.pass;
    report.hypotheses.e2_witness = bound.witness.map(|(x, s, y)| vec![x, s, y]);
    report.hypotheses.nu = ctx.model.nu;
    if !bound.pass {
        let (x, s, y) = bound.witness.unwrap_or(bound.argmax);
        report.failures.push(format!(
            "bound |f| <= {} violated: |f({x}, {s}, {y})| = {}",
            bound.bound_m,
            ctx.model.eval(x, s, y).abs()
        ));
        outcome.exit_code = EXIT_HYPOTHESIS;
        return Ok(outcome);
    }
    match estimate_linearization(&ctx.model, &ctx.grid, c.checks.fd_step) {
        Ok(lin) => {
            report.hypotheses.e4_holds = true;
            report.hypotheses.nu_estimated = Some(lin.nu);
        }
        Err(e @ CoreError::HypothesisE4Violated { .. }) => {
            report.hypotheses.e4_holds = false;
            report.hypotheses.e4_message = Some(e.to_string());
            if c.experiment.mode == Mode::Criterion {
                report.failures.push(e.to_string());
                outcome.exit_code = EXIT_HYPOTHESIS;
                return Ok(outcome);
            }
        }
        Err(e) => return Err(e.into()),
    }
    let nu = ctx.model.nu.or(report.hypotheses.nu_estimated);

    if c.experiment.mode == Mode::Drift {
        run_drift(&ctx, &mut outcome)?;
        return Ok(outcome);
    }

    let ll = if stage == Stage::Orbit {
        None
    } else {
        sign_check(&mut outcome.report, "LL", || {
            check_landesman_lazer(&ctx.model, &ctx.es, c.operator.k, &ctx.grid, c.checks.sphere_samples)
        })?
    };
    let sr = if stage == Stage::Orbit {
        None
    } else {
        sign_check(&mut outcome.report, "SR", || {
            check_strong_resonance(&ctx.model, &ctx.es, &ctx.grid, &BoundSampleSpec::for_length(cfg.length))
        })?
    };
    let nb = ctx.neighborhood(&mut outcome.report, true)?;
    let Some((nb, block)) = nb else {
        outcome.exit_code = EXIT_NUMERICAL;
        return Ok(outcome);
    };
    if stage == Stage::Check {
        return Ok(outcome);
    }
    let flow = ctx.flow()?;

    if stage == Stage::Run {
        let numerical_ok = indices_and_criterion(&ctx, &nb, block, [ll.as_ref(), sr.as_ref()], nu, &mut outcome.report)?;
        if !numerical_ok {
            outcome.exit_code = EXIT_NUMERICAL;
        }
    }
    orbit_search(&ctx, &flow, &nb, nu, &mut outcome)?;
    Ok(outcome)
}

/// Runs an LL or SR check; absent metadata is reported as `neither`.
fn sign_check(
    report: &mut Report,
    check: &str,
    f: impl FnOnce() -> Result<ConditionVerdict, CoreError>,
) -> Result<Option<ConditionVerdict>, CoreError> {
    match f() {
        Ok(v) => {
            report.verdicts.push(verdict_entry(check, &v));
            Ok(Some(v))
        }
        Err(CoreError::InsufficientMetadata(msg)) => {
            report.verdicts.push(missing_entry(check, format!("metadata absent: {msg}")));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Index assembly, block signs and the criterion. Returns `false` on a numerical
/// verification failure.
fn indices_and_criterion(
    ctx: &Context<'_>,
    nb: &IsolatingNeighborhood,
    block: Option<BlockReport>,
    analytic: [Option<&ConditionVerdict>; 2],
    nu: Option<f64>,
    report: &mut Report,
) -> Result<bool, CoreError> {
    let c = &ctx.cfg.config;
    let mut ok = true;
    let h_k = index_of_bounded_invariant_set(&ctx.d, &nb.verdict)?;
    let linear = linear_index_check(&ctx.es, &ctx.d, ctx.d.lambda, 1.0);
    let factor = kernel_factor(&ctx.d, &nb.verdict);
    let assembly_holds = linear.consistent && equal(&h_k, &smash(&linear.index, &factor));
    if !assembly_holds {
        ok = false;
        report
            .failures
            .push(format!("index assembly: h(K) = {h_k} but linear part {} smash {factor}", linear.index));
    }
    let mut indices = IndicesEntry {
        h_k: h_k.to_string(),
        linear_index: linear.index.to_string(),
        kernel_factor: factor.to_string(),
        assembly_holds,
        ..Default::default()
    };
    if let Some(block) = block {
        indices.block_exit_set = Some(
            match block.exit_set {
                ExitSet::FullBoundary => "full kernel boundary",
                ExitSet::Empty => "empty",
            }
            .into(),
        );
        indices.block_margin = Some(block.margin);
        indices.block_samples = Some(block.n_samples);
    }
    report.indices = Some(indices);

    let Some(nu) = nu else {
        report.notes.push("criterion skipped: nu unknown".into());
        return Ok(ok);
    };
    let chosen = analytic.into_iter().flatten().find(|v| v.holds).unwrap_or(&nb.verdict);
    if let Some(cond) = chosen.condition {
        if cond.implied_geometric() != nb.condition {
            ok = false;
            report.failures.push(format!(
                "{cond} implies {} but the sampled neighbourhood check found {}",
                cond.implied_geometric(),
                nb.condition
            ));
        }
    }
    match connecting_orbit_criterion(&ctx.es, c.operator.k, nu, chosen) {
        Ok(rec) => {
            report.criterion = Some(CriterionEntry {
                condition: rec.condition.to_string(),
                provenance: rec.provenance,
                nu: rec.nu,
                case: rec.case.map_or("none".into(), |c| c.to_string()),
                h_k: rec.h_k.to_string(),
                h_0: rec.h_0.to_string(),
                existence: rec.existence.to_string(),
                failed_hypothesis: rec.failed_hypothesis,
            });
        }
        Err(CoreError::NonhyperbolicOrigin { value, eigenvalue }) => {
            report.criterion = Some(CriterionEntry {
                condition: nb.condition.to_string(),
                provenance: "origin not hyperbolic".into(),
                nu,
                case: "none".into(),
                h_k: h_k.to_string(),
                h_0: "undefined".into(),
                existence: "INCONCLUSIVE".into(),
                failed_hypothesis: Some(format!("lambda + nu = {value} is the eigenvalue {eigenvalue}")),
            });
        }
        Err(e) => return Err(e),
    }
    Ok(ok)
}

fn orbit_search(
    ctx: &Context<'_>,
    flow: &Semiflow<'_>,
    nb: &IsolatingNeighborhood,
    nu: Option<f64>,
    outcome: &mut Outcome,
) -> Result<(), PipelineError> {
    let c = &ctx.cfg.config;
    let region = Region::from(nb);
    let integ = ctx.cfg.integrator();
    let mut entry = OrbitEntry::default();
    let report = &mut outcome.report;
    if let Some(nu) = nu {
        match unstable_directions(&ctx.es, ctx.d.lambda, nu) {
            Ok(modes) => entry.unstable_modes = modes.iter().map(|m| m + 1).collect(),
            Err(CoreError::NonhyperbolicOrigin { .. }) => {
                report.notes.push("no shooting: origin not hyperbolic".into())
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        report.notes.push("no shooting: nu unknown".into());
    }
    if !entry.unstable_modes.is_empty() && c.orbit.epsilon > 1e-3 * region.r_p {
        return Err(ctx
            .cfg
            .error_at(
                "orbit",
                "epsilon",
                format!("epsilon must not exceed 1e-3 R_P = {}", 1e-3 * region.r_p),
            )
            .into());
    }
    for &mode in entry.unstable_modes.clone().iter().take(MAX_SHOT_MODES) {
        let m = mode - 1;
        let shots = shoot_from_origin(flow, nu.unwrap(), &ctx.es.mode_state(m), c.orbit.epsilon, &integ, &region)?;
        for (shot, halving) in shots.shots.iter().zip(&shots.halving) {
            if matches!(shot.class, ShotClass::BoundedInN) || shot.nonzero_equilibrium {
                entry.orbit_witnesses += 1;
            }
            entry.shots.push(ShotEntry {
                mode,
                sign: shot.sign,
                class: shot_class(shot.class).into(),
                exit_time: shot.exit_time,
                nonzero_equilibrium: shot.nonzero_equilibrium,
                halving_shift_predicted: Some(halving.predicted_shift),
                halving_shift_measured: halving.measured_shift,
                halving_consistent: halving.consistent,
            });
            if let Some(traj) = &shot.trajectory {
                let sign = if shot.sign > 0.0 { "plus" } else { "minus" };
                outcome.trajectories.push((format!("shot_c{mode}_{sign}.csv"), traj.clone()));
            }
        }
    }
    let fa = forward_attraction_search(flow, &region, c.orbit.n_starts, &integ, ctx.seed, c.orbit.keep_trajectories)?;
    entry.n_starts = fa.n_starts;
    entry.converged = fa.converged;
    entry.resident = fa.resident;
    entry.exited = fa.exited;
    entry.near_returns = fa.outcomes.iter().filter(|o| o.near_return).count();
    entry.orbit_witnesses += fa.converged;
    for (index, traj) in fa.witness_trajectories {
        outcome.trajectories.push((format!("start_{index}.csv"), traj));
    }
    if report.criterion.as_ref().is_some_and(|c| c.existence == "EXISTS") && entry.orbit_witnesses == 0 {
        report
            .notes
            .push("criterion predicts an orbit but the search found no numeric witness".into());
    }
    report.orbit = Some(entry);
    Ok(())
}

/// Drift of the kernel coordinate for a source with no sign condition.
fn run_drift(ctx: &Context<'_>, outcome: &mut Outcome) -> Result<(), PipelineError> {
    let c = &ctx.cfg.config;
    let report = &mut outcome.report;
    let flow = ctx.flow()?;
    let integ = ctx.cfg.integrator();
    let mode = ctx.d.idx0[0];
    let traj = flow.integrate(&ctx.es.zero_state(), &integ)?;
    let slope = drift_slope(&traj, mode, 0.0, integ.t_end);

    if ctx.neighborhood(report, false)?.is_some() {
        report.notes.push("a sign condition holds; drift mode was not needed".into());
    }
    // the failure to find N is the expected outcome here
    report.failures.clear();

    let radii = apriori_radii(&ctx.model, &ctx.d, &ctx.cb)?;
    let region = Region {
        r_q: radii.r1 + 1.0,
        r_p: c.orbit.drift_radius,
    };
    let sampling = ctx.sampling(region.r_q, region.r_p);
    match verify_isolating_block(&flow, c.constants.alpha, c.constants.delta, &c.checks.s_values, &sampling, None) {
        Ok(block) => report.notes.push(format!(
            "boundary derivative has one sign on the drift region (margin {})",
            block.margin
        )),
        Err(e @ CoreError::BlockVerificationFailed { .. }) => {
            report.notes.push(format!("drift region is not an isolating block: {e}"))
        }
        Err(e) => return Err(e.into()),
    }
    // a start at kernel radius r needs at most 2 R_P / |slope| to cross the region
    let search_cfg = IntegratorConfig {
        t_end: integ.t_end.max(2.0 * region.r_p / slope.abs().max(1e-3) + 10.0),
        ..integ
    };
    let fa = forward_attraction_search(&flow, &region, c.orbit.n_starts, &search_cfg, ctx.seed, 0)?;
    let max_exit_time = fa.outcomes.iter().filter_map(|o| o.exit_time).fold(0.0, f64::max);
    let all_exit = fa.exited == fa.n_starts && fa.outcomes.iter().all(|o| o.class == StartClass::ExitsN);
    report.drift = Some(DriftEntry {
        demonstration: if all_exit { "NO-ORBIT" } else { "INCOMPLETE" }.into(),
        slope,
        t0: 0.0,
        t1: integ.t_end,
        mode: mode + 1,
        r_q: region.r_q,
        r_p: region.r_p,
        n_starts: fa.n_starts,
        exited: fa.exited,
        max_exit_time,
    });
    outcome.trajectories.push(("drift.csv".into(), traj));
    Ok(())
}

/// Writes `report.toml`, the trajectory CSVs and `plot.gp` into `dir`.
pub fn write_artifacts(outcome: &Outcome, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let report_path = dir.join("report.toml");
    let text = outcome.report.to_toml().map_err(std::io::Error::other)?;
    std::fs::write(&report_path, text)?;
    written.push(report_path);
    let mut csv_names = Vec::new();
    for (name, traj) in &outcome.trajectories {
        let path = dir.join(name);
        save_trajectory(&path, traj)?;
        csv_names.push(name.clone());
        written.push(path);
    }
    if !csv_names.is_empty() {
        let path = dir.join("plot.gp");
        std::fs::write(&path, plot_script(&csv_names, outcome.n_modes, &outcome.kernel_modes))?;
        written.push(path);
    }
    Ok(written)
}
