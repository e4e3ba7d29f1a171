//! Time integration of `u̇ = −Au + λu + G(s, u)` in Galerkin coordinates.
//!
//! The linear part is diagonal with rates `λ − λ_i`, so exponential time
//! differencing propagates it exactly and only the nonlinearity is
//! approximated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::Galerkin;
use crate::nonlinearity::NonlinearityModel;
use crate::quadrature::QuadratureGrid;
use crate::spectral::{alpha_weights, project, Decomposition, EigenSystem, ModeRole, Part, SpectralState};

pub const BLOW_UP_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Exponential Euler.
    Etd1,
    /// Second-order exponential Runge-Kutta (Cox-Matthews ETD2RK).
    Etd2,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Etd1 => 1,
            Scheme::Etd2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step_h: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    /// Below this `|z|` the φ-functions are evaluated by their Taylor series.
    pub phi_taylor_threshold: f64,
    /// Keep every `save_stride`-th step (the final state is always kept).
    pub save_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_h: 1e-2,
            scheme: Scheme::Etd2,
            t_end: 50.0,
            phi_taylor_threshold: 1e-4,
            save_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_h > 0.0) || !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need step_h > 0 and t_end > 0, got h = {}, T = {}",
                self.step_h, self.t_end
            )));
        }
        if self.step_h > self.t_end {
            return Err(Error::InvalidArgument(format!(
                "step {} exceeds the horizon {}",
                self.step_h, self.t_end
            )));
        }
        if !(self.phi_taylor_threshold >= 0.0) || self.save_stride == 0 {
            return Err(Error::InvalidArgument(
                "phi_taylor_threshold must be >= 0 and save_stride >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// `φ₁(z) = (e^z − 1)/z`
pub fn phi1(z: f64, threshold: f64) -> f64 {
    if z.abs() < threshold {
        1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0))
    } else {
        z.exp_m1() / z
    }
}

/// `φ₂(z) = (φ₁(z) − 1)/z`
pub fn phi2(z: f64, threshold: f64) -> f64 {
    if z.abs() < threshold {
        0.5 + z / 6.0 * (1.0 + z / 4.0 * (1.0 + z / 5.0))
    } else {
        (phi1(z, threshold) - 1.0) / z
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralState>,
    pub alpha_norms: Vec<f64>,
    pub h_norms: Vec<f64>,
    /// `‖Pu‖_H`
    pub p_h_norms: Vec<f64>,
    /// `‖Qu‖_α`
    pub q_alpha_norms: Vec<f64>,
    /// Time at which a stopping predicate fired.
    pub stopped_at: Option<f64>,
}

impl Trajectory {
    fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            alpha_norms: Vec::new(),
            h_norms: Vec::new(),
            p_h_norms: Vec::new(),
            q_alpha_norms: Vec::new(),
            stopped_at: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &SpectralState {
        self.states.last().expect("trajectories start with the initial state")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectories start with the initial state")
    }

    /// Coefficient of `mode` at every saved time.
    pub fn coefficient(&self, mode: usize) -> Vec<f64> {
        self.states.iter().map(|u| u[mode]).collect()
    }
}

/// The semiflow of `u̇ = −Au + λu + G(s, u)` on a Galerkin space.
#[derive(Debug, Clone)]
pub struct Semiflow<'a> {
    model: &'a NonlinearityModel,
    gk: Galerkin,
    d: Decomposition,
    lambda: f64,
    s: f64,
    weights: Vec<f64>,
}

impl<'a> Semiflow<'a> {
    pub fn new(
        model: &'a NonlinearityModel,
        es: &EigenSystem,
        d: &Decomposition,
        grid: &QuadratureGrid,
        lambda: f64,
    ) -> Result<Self> {
        if d.n_modes() != es.n_modes() {
            return Err(Error::ShapeMismatch {
                expected: es.n_modes(),
                got: d.n_modes(),
            });
        }
        Ok(Self {
            model,
            gk: Galerkin::new(es, grid)?,
            d: d.clone(),
            lambda,
            s: 1.0,
            weights: alpha_weights(es, 0.8, 0.0)?,
        })
    }

    /// Position `s ∈ [0, 1]` along the homotopy; `s = 1` is the original equation.
    pub fn with_homotopy(mut self, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("homotopy parameter must lie in [0, 1], got {s}")));
        }
        self.s = s;
        Ok(self)
    }

    /// Fractional exponent and shift used for the cached `α`-norms.
    pub fn with_norm(mut self, alpha: f64, delta: f64) -> Result<Self> {
        self.weights = alpha_weights(self.gk.eigensystem(), alpha, delta)?;
        Ok(self)
    }

    pub fn galerkin(&self) -> &Galerkin {
        &self.gk
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn homotopy_parameter(&self) -> f64 {
        self.s
    }

    /// `(λ_i+δ)^α` per mode, as set by [`Semiflow::with_norm`].
    pub fn alpha_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `‖(λ − A)u + G(s, u)‖`, zero exactly at equilibria.
    pub fn residual(&self, u: &SpectralState) -> f64 {
        let g = self.field(u);
        self.gk
            .eigensystem()
            .modes()
            .iter()
            .enumerate()
            .map(|(i, m)| ((self.lambda - m.eigenvalue) * u[i] + g[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn alpha_norm(&self, u: &SpectralState) -> f64 {
        self.weights
            .iter()
            .zip(u.coefficients())
            .map(|(w, c)| (w * c).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn q_alpha_norm(&self, u: &SpectralState) -> f64 {
        self.weights
            .iter()
            .zip(u.coefficients())
            .zip(self.d.roles())
            .filter(|(_, r)| **r != ModeRole::Kernel)
            .map(|((w, c), _)| (w * c).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn p_norm(&self, u: &SpectralState) -> f64 {
        self.d.idx0.iter().map(|&i| u[i] * u[i]).sum::<f64>().sqrt()
    }

    /// `G(s, u) = P F(sQu + Pu) + s Q F(sQu + Pu)`.
    pub fn field(&self, u: &SpectralState) -> SpectralState {
        let s = self.s;
        if s == 1.0 {
            return self.model.apply(u, &self.gk);
        }
        let roles = self.d.roles();
        let w = SpectralState(
            u.coefficients()
                .iter()
                .zip(roles)
                .map(|(&c, r)| if *r == ModeRole::Kernel { c } else { s * c })
                .collect(),
        );
        let mut f = self.model.apply(&w, &self.gk);
        for (c, r) in f.0.iter_mut().zip(roles) {
            if *r != ModeRole::Kernel {
                *c *= s;
            }
        }
        f
    }

    fn check(&self, u: &SpectralState) -> Result<()> {
        self.gk.eigensystem().check_state(u)?;
        if !u.is_finite() {
            return Err(Error::InvalidArgument("initial state has non-finite entries".into()));
        }
        Ok(())
    }

    fn record(&self, traj: &mut Trajectory, t: f64, u: &SpectralState) {
        traj.times.push(t);
        traj.alpha_norms.push(self.alpha_norm(u));
        traj.h_norms.push(u.norm());
        traj.p_h_norms.push(self.p_norm(u));
        traj.q_alpha_norms.push(self.q_alpha_norm(u));
        traj.states.push(u.clone());
    }

    pub fn integrate(&self, u0: &SpectralState, cfg: &IntegratorConfig) -> Result<Trajectory> {
        self.integrate_until(u0, cfg, |_, _| false)
    }

    /// Integrates until `t_end` or until `stop(t, u)` returns true after a step.
    pub fn integrate_until(
        &self,
        u0: &SpectralState,
        cfg: &IntegratorConfig,
        mut stop: impl FnMut(f64, &SpectralState) -> bool,
    ) -> Result<Trajectory> {
        cfg.validate()?;
        self.check(u0)?;
        let (n_steps, tail) = split_horizon(cfg.t_end, cfg.step_h);
        let full = EtdStepper::new(self, cfg.step_h, cfg);
        let last = tail.map(|h| EtdStepper::new(self, h, cfg));
        let mut traj = Trajectory::new();
        self.record(&mut traj, 0.0, u0);
        let mut u = u0.clone();
        let total = n_steps + usize::from(last.is_some());
        for step in 1..=total {
            let (stepper, t) = if step <= n_steps {
                (&full, step as f64 * cfg.step_h)
            } else {
                (last.as_ref().expect("tail step"), cfg.t_end)
            };
            u = stepper.step(self, &u);
            guard_blow_up(t, &u)?;
            let stopped = stop(t, &u);
            if stopped || step == total || step % cfg.save_stride == 0 {
                self.record(&mut traj, t, &u);
            }
            if stopped {
                traj.stopped_at = Some(t);
                break;
            }
        }
        Ok(traj)
    }

    /// Classical RK4 on the kernel flow `u̇ = P F(u)` in `X₀`.
    pub fn integrate_kernel_flow(&self, u0: &SpectralState, cfg: &IntegratorConfig) -> Result<Trajectory> {
        cfg.validate()?;
        self.check(u0)?;
        if let Some(i) = (0..u0.len()).find(|&i| u0[i] != 0.0 && self.d.role(i) != ModeRole::Kernel) {
            return Err(Error::InvalidArgument(format!(
                "kernel flow start has a nonzero coefficient on mode {} outside X0",
                i + 1
            )));
        }
        let rhs = |u: &SpectralState| -> SpectralState {
            let mut f = SpectralState::zeros(u.len());
            let values = self.model.apply_on_modes(u, &self.gk, &self.d.idx0);
            for (&i, v) in self.d.idx0.iter().zip(values) {
                f.0[i] = v;
            }
            f
        };
        let (n_steps, tail) = split_horizon(cfg.t_end, cfg.step_h);
        let total = n_steps + usize::from(tail.is_some());
        let mut traj = Trajectory::new();
        self.record(&mut traj, 0.0, u0);
        let mut u = u0.clone();
        for step in 1..=total {
            let (h, t) = if step <= n_steps {
                (cfg.step_h, step as f64 * cfg.step_h)
            } else {
                (tail.expect("tail step"), cfg.t_end)
            };
            let k1 = rhs(&u);
            let k2 = rhs(&offset(&u, h / 2.0, &k1));
            let k3 = rhs(&offset(&u, h / 2.0, &k2));
            let k4 = rhs(&offset(&u, h, &k3));
            for (i, c) in u.0.iter_mut().enumerate() {
                *c += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            guard_blow_up(t, &u)?;
            if step == total || step % cfg.save_stride == 0 {
                self.record(&mut traj, t, &u);
            }
        }
        Ok(traj)
    }

    /// `2⟨P F(sQu + Pu), Pu⟩`, the derivative of `‖Pu(t)‖²` at a point of `∂N₂`.
    pub fn boundary_exit_derivative(&self, u: &SpectralState, radius: f64) -> Result<f64> {
        self.gk.eigensystem().check_state(u)?;
        let p = self.p_norm(u);
        if (p - radius).abs() > 1e-9 * radius.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "point is not on the kernel sphere of radius {radius}: |Pu| = {p}"
            )));
        }
        let g = self.field(u);
        Ok(2.0 * self.d.idx0.iter().map(|&i| g[i] * u[i]).sum::<f64>())
    }
}

fn offset(u: &SpectralState, a: f64, k: &SpectralState) -> SpectralState {
    let mut out = u.clone();
    out.axpy(a, k);
    out
}

fn guard_blow_up(t: f64, u: &SpectralState) -> Result<()> {
    let norm = u.norm();
    if !(norm <= BLOW_UP_NORM) {
        return Err(Error::BlowUpDetected { t, norm });
    }
    Ok(())
}

/// Number of full steps and the length of a final partial step, if any.
fn split_horizon(t_end: f64, h: f64) -> (usize, Option<f64>) {
    let n = (t_end / h).round();
    if (n * h - t_end).abs() <= 1e-9 * t_end {
        (n as usize, None)
    } else {
        let n = (t_end / h).floor() as usize;
        (n, Some(t_end - n as f64 * h))
    }
}

struct EtdStepper {
    scheme: Scheme,
    decay: Vec<f64>,
    h_phi1: Vec<f64>,
    h_phi2: Vec<f64>,
}

impl EtdStepper {
    fn new(flow: &Semiflow<'_>, h: f64, cfg: &IntegratorConfig) -> Self {
        let modes = flow.gk.eigensystem().modes();
        let zs: Vec<f64> = modes.iter().map(|m| h * (flow.lambda - m.eigenvalue)).collect();
        Self {
            scheme: cfg.scheme,
            decay: zs.iter().map(|z| z.exp()).collect(),
            h_phi1: zs.iter().map(|&z| h * phi1(z, cfg.phi_taylor_threshold)).collect(),
            h_phi2: zs.iter().map(|&z| h * phi2(z, cfg.phi_taylor_threshold)).collect(),
        }
    }

    fn step(&self, flow: &Semiflow<'_>, u: &SpectralState) -> SpectralState {
        let nu = flow.field(u);
        let a = SpectralState(
            (0..u.len())
                .map(|i| self.decay[i] * u[i] + self.h_phi1[i] * nu[i])
                .collect(),
        );
        match self.scheme {
            Scheme::Etd1 => a,
            Scheme::Etd2 => {
                let na = flow.field(&a);
                SpectralState(
                    (0..u.len())
                        .map(|i| a[i] + self.h_phi2[i] * (na[i] - nu[i]))
                        .collect(),
                )
            }
        }
    }
}

/// `G(s, u)` for a single evaluation.
pub fn homotopy_field(
    model: &NonlinearityModel,
    d: &Decomposition,
    s: f64,
    u: &SpectralState,
    es: &EigenSystem,
    grid: &QuadratureGrid,
) -> Result<SpectralState> {
    let flow = Semiflow::new(model, es, d, grid, d.lambda)?.with_homotopy(s)?;
    es.check_state(u)?;
    Ok(flow.field(u))
}

#[allow(clippy::too_many_arguments)]
pub fn integrate(
    model: &NonlinearityModel,
    es: &EigenSystem,
    d: &Decomposition,
    lambda: f64,
    s: f64,
    u0: &SpectralState,
    cfg: &IntegratorConfig,
    grid: &QuadratureGrid,
) -> Result<Trajectory> {
    Semiflow::new(model, es, d, grid, lambda)?
        .with_homotopy(s)?
        .integrate(u0, cfg)
}

pub fn integrate_kernel_flow(
    model: &NonlinearityModel,
    es: &EigenSystem,
    d: &Decomposition,
    u0: &SpectralState,
    cfg: &IntegratorConfig,
    grid: &QuadratureGrid,
) -> Result<Trajectory> {
    Semiflow::new(model, es, d, grid, d.lambda)?.integrate_kernel_flow(u0, cfg)
}

/// The boundary radius is taken to be `‖Pu‖` itself.
pub fn boundary_exit_derivative(
    model: &NonlinearityModel,
    es: &EigenSystem,
    d: &Decomposition,
    s: f64,
    u_on_boundary: &SpectralState,
    radius: f64,
    grid: &QuadratureGrid,
) -> Result<f64> {
    Semiflow::new(model, es, d, grid, d.lambda)?
        .with_homotopy(s)?
        .boundary_exit_derivative(u_on_boundary, radius)
}

/// `P u` and `Q u` as a pair.
pub fn split(u: &SpectralState, d: &Decomposition) -> Result<(SpectralState, SpectralState)> {
    Ok((project(u, d, Part::P)?, project(u, d, Part::Q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::builtin::*;
    use crate::spectral::{build_laplacian_1d, decompose, shifted_semigroup_apply};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn setup(n: usize) -> (EigenSystem, Decomposition, QuadratureGrid) {
        let es = build_laplacian_1d(n, PI).unwrap();
        let d = decompose(&es, 2).unwrap();
        let grid = QuadratureGrid::default_for(PI, n).unwrap();
        (es, d, grid)
    }

    fn cfg(h: f64, t: f64) -> IntegratorConfig {
        IntegratorConfig {
            step_h: h,
            t_end: t,
            ..Default::default()
        }
    }

    #[test]
    fn phi_functions_match_closed_forms() {
        for z in [-30.0, -1.0, -1e-3, 1e-3, 0.7] {
            let e: f64 = f64::exp(z);
            assert_abs_diff_eq!(phi1(z, 1e-4), (e - 1.0) / z, epsilon = 1e-12);
            assert_abs_diff_eq!(phi2(z, 1e-4), (e - 1.0 - z) / (z * z), epsilon = 1e-9);
        }
        assert_eq!(phi1(0.0, 1e-4), 1.0);
        assert_eq!(phi2(0.0, 1e-4), 0.5);
        // the two branches agree at the switch
        let z = 1.001e-4;
        assert_abs_diff_eq!(phi2(z, 1e-4), 0.5 + z / 6.0 + z * z / 24.0, epsilon = 1e-11);
    }

    #[test]
    fn linear_flow_is_exact() {
        let (es, d, grid) = setup(6);
        let zero = zero();
        let u0 = es.mode_state(2);
        let traj = integrate(&zero, &es, &d, 4.0, 1.0, &u0, &cfg(0.01, 1.0), &grid).unwrap();
        assert_abs_diff_eq!(traj.last_state()[2], (-5f64).exp(), epsilon = 1e-12);
        let exact = shifted_semigroup_apply(&u0, 1.0, 4.0, &es).unwrap();
        assert!(traj.last_state().max_abs_diff(&exact) < 1e-12);
        // kernel modes are fixed points
        let traj = integrate(&zero, &es, &d, 4.0, 1.0, &es.mode_state(1), &cfg(0.1, 10.0), &grid).unwrap();
        assert_eq!(traj.last_state(), &es.mode_state(1));
    }

    #[test]
    fn constant_kernel_source_drifts() {
        let (es, d, grid) = setup(8);
        let f = const_kernel(2, PI);
        let traj = integrate(&f, &es, &d, 4.0, 1.0, &es.zero_state(), &cfg(1e-2, 7.0), &grid).unwrap();
        assert_abs_diff_eq!(traj.last_state()[1], 7.0, epsilon = 1e-8);
        let kf = integrate_kernel_flow(&f, &es, &d, &es.zero_state(), &cfg(1e-2, 3.0), &grid).unwrap();
        for (t, u) in kf.times.iter().zip(&kf.states) {
            assert_abs_diff_eq!(u[1], *t, epsilon = 1e-10);
            assert!(u.0.iter().enumerate().all(|(i, c)| i == 1 || *c == 0.0));
        }
    }

    #[test]
    fn homotopy_endpoints() {
        let (es, d, grid) = setup(10);
        let f = arctan(1.0);
        let u = SpectralState((0..10).map(|i| 2.0 / (i + 1) as f64).collect());
        let g1 = homotopy_field(&f, &d, 1.0, &u, &es, &grid).unwrap();
        let direct = crate::nonlinearity::apply_niemytzki(&f, &u, &es, &grid).unwrap();
        assert!(g1.max_abs_diff(&direct) < 1e-14);
        // s = 0 with no kernel part gives P F(0) = 0
        let q = project(&u, &d, Part::Q).unwrap();
        let g0 = homotopy_field(&f, &d, 0.0, &q, &es, &grid).unwrap();
        assert!(g0.norm() < 1e-15);
        let m0 = 2.0 * f.bound_m;
        for s in [0.0, 0.3, 1.0] {
            assert!(homotopy_field(&f, &d, s, &u, &es, &grid).unwrap().norm() <= m0);
        }
    }

    #[test]
    fn kernel_flow_directions_of_motion() {
        let (es, d, grid) = setup(8);
        let u0 = es.mode_state(1).scaled(20.0);
        let c = cfg(0.05, 2.0);
        let out = integrate_kernel_flow(&arctan(1.0), &es, &d, &u0, &c, &grid).unwrap();
        assert!(out.h_norms[1] > out.h_norms[0]);
        let inn = integrate_kernel_flow(&strong_res(-4.0), &es, &d, &u0, &c, &grid).unwrap();
        assert!(inn.h_norms.windows(2).all(|w| w[1] < w[0]));
        let bad = es.mode_state(0);
        assert!(integrate_kernel_flow(&arctan(1.0), &es, &d, &bad, &c, &grid).is_err());
    }

    #[test]
    fn boundary_derivative_examples() {
        let (es, d, grid) = setup(8);
        let r = 3.0;
        let u = es.mode_state(1).scaled(r);
        let v = boundary_exit_derivative(&const_kernel(2, PI), &es, &d, 1.0, &u, r, &grid).unwrap();
        assert_abs_diff_eq!(v, 2.0 * r, epsilon = 1e-10);
        assert!(boundary_exit_derivative(&const_kernel(2, PI), &es, &d, 1.0, &u, 2.0, &grid).is_err());
    }

    #[test]
    fn blow_up_guard_fires() {
        let es = build_laplacian_1d(4, PI).unwrap();
        let d = decompose(&es, 4).unwrap();
        let grid = QuadratureGrid::default_for(PI, 4).unwrap();
        let zero = zero();
        // lambda = 16 makes mode 1 grow like e^{15 t}
        let err = integrate(&zero, &es, &d, 16.0, 1.0, &es.mode_state(0), &cfg(0.1, 5.0), &grid);
        assert!(matches!(err, Err(Error::BlowUpDetected { .. })));
    }

    #[test]
    fn partial_final_step_lands_on_horizon() {
        let (es, d, grid) = setup(4);
        let traj = integrate(&zero(), &es, &d, 4.0, 1.0, &es.mode_state(3), &cfg(0.3, 1.0), &grid).unwrap();
        assert_eq!(traj.last_time(), 1.0);
        assert_abs_diff_eq!(traj.last_state()[3], (-12f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(2.0, 1.0).validate().is_err());
        assert!(cfg(0.0, 1.0).validate().is_err());
        assert!(cfg(0.1, 1.0).validate().is_ok());
    }
}
