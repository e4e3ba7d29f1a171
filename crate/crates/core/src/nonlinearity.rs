//! Niemytzki operators `F(u)(x) = f(x, u(x), u′(x))` and the metadata the
//! condition checkers rely on.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::Galerkin;
use crate::quadrature::QuadratureGrid;
use crate::spectral::{EigenSystem, SpectralState};

/// Central-difference step used to estimate `ν = D_s f(x,0,0)`.
pub const FD_STEP: f64 = 1e-5;
/// Admissible spread of the finite-difference slopes (and of `f(x,0,0)`, `D_y f(x,0,0)`).
pub const E4_TOLERANCE: f64 = 1e-4;

pub type PointwiseFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Direction of the strong-resonance inequality `f(x,s,y)·s ≥ h(x)` or `≤ h(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FloorKind {
    Below,
    Above,
}

#[derive(Clone)]
pub struct Floor {
    pub kind: FloorKind,
    pub h: Profile,
}

/// `f(x, s, y)` together with the analytic facts known about it.
#[derive(Clone)]
pub struct NonlinearityModel {
    pub name: String,
    eval: PointwiseFn,
    /// `sup |f|`.
    pub bound_m: f64,
    pub lipschitz_l: Option<f64>,
    /// `(f₊, f₋)`: limits as `s → ±∞`.
    pub limits: Option<(Profile, Profile)>,
    /// `f_∞ = lim_{|s|→∞} f·s`.
    pub limit_infty: Option<Profile>,
    pub floor_h: Option<Floor>,
    /// Common value of `D_s f(x,0,0)`.
    pub nu: Option<f64>,
}

impl fmt::Debug for NonlinearityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearityModel")
            .field("name", &self.name)
            .field("bound_m", &self.bound_m)
            .field("lipschitz_l", &self.lipschitz_l)
            .field("limits", &self.limits.is_some())
            .field("limit_infty", &self.limit_infty.is_some())
            .field("floor_h", &self.floor_h.as_ref().map(|fl| fl.kind))
            .field("nu", &self.nu)
            .finish()
    }
}

impl NonlinearityModel {
    pub fn new(
        name: impl Into<String>,
        bound_m: f64,
        eval: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            bound_m,
            lipschitz_l: None,
            limits: None,
            limit_infty: None,
            floor_h: None,
            nu: None,
        }
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz_l = Some(l);
        self
    }

    pub fn with_limits(
        mut self,
        f_plus: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_minus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.limits = Some((Arc::new(f_plus), Arc::new(f_minus)));
        self
    }

    pub fn with_limit_infty(mut self, f_inf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.limit_infty = Some(Arc::new(f_inf));
        self
    }

    pub fn with_floor(mut self, kind: FloorKind, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.floor_h = Some(Floor { kind, h: Arc::new(h) });
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = Some(nu);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64, s: f64, y: f64) -> f64 {
        (self.eval)(x, s, y)
    }

    /// Nodal values of `f(x_q, u(x_q), u′(x_q))`.
    pub fn nodal(&self, u: &SpectralState, gk: &Galerkin) -> Vec<f64> {
        let (values, slopes) = gk.synthesize(u);
        gk.grid()
            .nodes
            .iter()
            .zip(values.iter().zip(&slopes))
            .map(|(&x, (&s, &y))| self.eval(x, s, y))
            .collect()
    }

    /// `F(u)` projected onto the retained modes.
    pub fn apply(&self, u: &SpectralState, gk: &Galerkin) -> SpectralState {
        gk.project(&self.nodal(u, gk))
    }

    /// Only the coefficients of `F(u)` on `modes`, in that order.
    pub fn apply_on_modes(&self, u: &SpectralState, gk: &Galerkin, modes: &[usize]) -> Vec<f64> {
        let g = self.nodal(u, gk);
        modes.iter().map(|&j| gk.project_mode(&g, j)).collect()
    }
}

/// `F(u)` for a sine-realized eigensystem.
pub fn apply_niemytzki(
    model: &NonlinearityModel,
    u: &SpectralState,
    es: &EigenSystem,
    grid: &QuadratureGrid,
) -> Result<SpectralState> {
    let gk = Galerkin::new(es, grid)?;
    es.check_state(u)?;
    Ok(model.apply(u, &gk))
}

/// Built-in nonlinearities. Names and parameter lists are part of the config format.
pub mod builtin {
    use super::*;

    /// `a·arctan(s)`
    pub fn arctan(a: f64) -> NonlinearityModel {
        let mut model = arctan_minus_gauss(a, 0.0);
        model.name = if a == 1.0 {
            "arctan".to_string()
        } else {
            format!("arctan({a})")
        };
        model
    }

    /// `a·arctan(s) − b·s·e^{−s²}`
    pub fn arctan_minus_gauss(a: f64, b: f64) -> NonlinearityModel {
        // max |s e^{-s²}| = 1/√(2e) at s = 1/√2
        let bound = a.abs() * PI / 2.0 + b.abs() / (2.0 * E).sqrt();
        NonlinearityModel::new(format!("arctan_minus_gauss({a}, {b})"), bound, move |_, s, _| {
            a * s.atan() - b * s * (-s * s).exp()
        })
        .with_lipschitz(a.abs() + b.abs())
        .with_limits(move |_| a * PI / 2.0, move |_| -a * PI / 2.0)
        .with_nu(a - b)
    }

    /// `a·s/(1+s²)`: bounded by `|a|/2`, `f·s → a`.
    pub fn strong_res(a: f64) -> NonlinearityModel {
        let kind = if a >= 0.0 { FloorKind::Below } else { FloorKind::Above };
        NonlinearityModel::new(format!("strong_res({a})"), a.abs() / 2.0, move |_, s, _| {
            a * s / (1.0 + s * s)
        })
        .with_lipschitz(a.abs())
        .with_limits(|_| 0.0, |_| 0.0)
        .with_limit_infty(move |_| a)
        .with_floor(kind, |_| 0.0)
        .with_nu(a)
    }

    /// `a·cos(πx/L)·s/(1+s²)`: strong-resonance type with a sign-changing `f_∞`.
    pub fn strong_res_cos(a: f64, length: f64) -> NonlinearityModel {
        let profile = move |x: f64| a * (PI * x / length).cos();
        NonlinearityModel::new(format!("strong_res_cos({a})"), a.abs() / 2.0, move |x, s, _| {
            profile(x) * s / (1.0 + s * s)
        })
        .with_lipschitz(a.abs())
        .with_limits(|_| 0.0, |_| 0.0)
        .with_limit_infty(profile)
        .with_floor(FloorKind::Below, move |x| profile(x).min(0.0))
    }

    /// The constant source `F ≡ φ_k`, independent of the state.
    pub fn const_kernel(k: usize, length: f64) -> NonlinearityModel {
        let scale = (2.0 / length).sqrt();
        let freq = k as f64 * PI / length;
        NonlinearityModel::new(format!("const_kernel({k})"), scale, move |x, _, _| {
            scale * (freq * x).sin()
        })
        .with_lipschitz(0.0)
    }

    pub fn zero() -> NonlinearityModel {
        NonlinearityModel::new("zero", 0.0, |_, _, _| 0.0)
            .with_lipschitz(0.0)
            .with_limits(|_| 0.0, |_| 0.0)
            .with_nu(0.0)
    }

    /// `f(s) = s`. Unbounded; the declared bound `1` is there to be refuted.
    pub fn linear() -> NonlinearityModel {
        NonlinearityModel::new("linear", 1.0, |_, s, _| s)
            .with_lipschitz(1.0)
            .with_nu(1.0)
    }
}

/// Registry entry for `list` output.
#[derive(Debug, Clone, Copy)]
pub struct RegistryEntry {
    pub name: &'static str,
    pub signature: &'static str,
    pub description: &'static str,
}

pub const REGISTRY: &[RegistryEntry] = &[
    RegistryEntry {
        name: "arctan",
        signature: "arctan(a = 1)",
        description: "a*arctan(s); Landesman-Lazer type, f+- = +-a*pi/2, nu = a",
    },
    RegistryEntry {
        name: "arctan_minus_gauss",
        signature: "arctan_minus_gauss(a, b)",
        description: "a*arctan(s) - b*s*exp(-s^2); Landesman-Lazer type, nu = a - b",
    },
    RegistryEntry {
        name: "const_kernel",
        signature: "const_kernel(k)",
        description: "constant source phi_k(x); resonance obstruction, no bounded orbits",
    },
    RegistryEntry {
        name: "linear",
        signature: "linear",
        description: "s; unbounded, rejected by the bound check",
    },
    RegistryEntry {
        name: "strong_res",
        signature: "strong_res(a)",
        description: "a*s/(1+s^2); strong resonance, f_inf = a, nu = a",
    },
    RegistryEntry {
        name: "strong_res_cos",
        signature: "strong_res_cos(a)",
        description: "a*cos(pi x/L)*s/(1+s^2); strong resonance with sign-changing f_inf",
    },
    RegistryEntry {
        name: "tabulated",
        signature: "tabulated(table = <csv of x,s,f>)",
        description: "bilinear interpolation of a table; metadata estimated numerically",
    },
    RegistryEntry {
        name: "zero",
        signature: "zero",
        description: "f = 0; purely linear flow",
    },
];

/// Instantiate a built-in by registry name.
pub fn from_registry(name: &str, params: &[f64], length: f64) -> Result<NonlinearityModel> {
    let arity = |expected: &[usize]| -> Result<()> {
        if expected.contains(&params.len()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{name} takes {expected:?} parameters, got {}",
                params.len()
            )))
        }
    };
    match name {
        "arctan" => {
            arity(&[0, 1])?;
            Ok(builtin::arctan(params.first().copied().unwrap_or(1.0)))
        }
        "arctan_minus_gauss" => {
            arity(&[2])?;
            Ok(builtin::arctan_minus_gauss(params[0], params[1]))
        }
        "strong_res" => {
            arity(&[1])?;
            Ok(builtin::strong_res(params[0]))
        }
        "strong_res_cos" => {
            arity(&[1])?;
            Ok(builtin::strong_res_cos(params[0], length))
        }
        "const_kernel" => {
            arity(&[1])?;
            let k = params[0];
            if k < 1.0 || k.fract() != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "const_kernel needs a positive integer mode, got {k}"
                )));
            }
            Ok(builtin::const_kernel(k as usize, length))
        }
        "zero" => {
            arity(&[0])?;
            Ok(builtin::zero())
        }
        "linear" => {
            arity(&[0])?;
            Ok(builtin::linear())
        }
        other => Err(Error::InvalidArgument(format!("unknown nonlinearity {other:?}"))),
    }
}

/// `f` tabulated on a rectangular `(x, s)` grid; `y` is ignored and values are
/// held constant outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedF {
    xs: Vec<f64>,
    ss: Vec<f64>,
    /// Row-major, `values[i * ss.len() + j] = f(xs[i], ss[j])`.
    values: Vec<f64>,
}

fn bracket(grid: &[f64], v: f64) -> (usize, f64) {
    if grid.len() == 1 || v <= grid[0] {
        return (0, 0.0);
    }
    let last = grid.len() - 1;
    if v >= grid[last] {
        return (last - 1, 1.0);
    }
    let i = grid.partition_point(|&g| g <= v) - 1;
    (i, (v - grid[i]) / (grid[i + 1] - grid[i]))
}

impl TabulatedF {
    pub fn new(xs: Vec<f64>, ss: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || ss.is_empty() || values.len() != xs.len() * ss.len() {
            return Err(Error::InvalidArgument(format!(
                "table needs {}x{} values, got {}",
                xs.len(),
                ss.len(),
                values.len()
            )));
        }
        for axis in [&xs, &ss] {
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument("table axes must be strictly increasing".into()));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("table values must be finite".into()));
        }
        Ok(Self { xs, ss, values })
    }

    /// Assemble from scattered `(x, s, f)` rows covering a full rectangular grid.
    pub fn from_rows(rows: &[(f64, f64, f64)]) -> Result<Self> {
        let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ss: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for axis in [&mut xs, &mut ss] {
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        let mut values = vec![f64::NAN; xs.len() * ss.len()];
        for &(x, s, f) in rows {
            let i = xs.partition_point(|&v| v < x);
            let j = ss.partition_point(|&v| v < s);
            values[i * ss.len() + j] = f;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument(
                "table rows do not cover a full (x, s) grid".into(),
            ));
        }
        Self::new(xs, ss, values)
    }

    pub fn value(&self, x: f64, s: f64) -> f64 {
        let ns = self.ss.len();
        let (i, tx) = bracket(&self.xs, x);
        let (j, ts) = bracket(&self.ss, s);
        let i1 = (i + 1).min(self.xs.len() - 1);
        let j1 = (j + 1).min(ns - 1);
        let v = |a: usize, b: usize| self.values[a * ns + b];
        (1.0 - tx) * ((1.0 - ts) * v(i, j) + ts * v(i, j1)) + tx * ((1.0 - ts) * v(i1, j) + ts * v(i1, j1))
    }

    /// Model with metadata read off the table: bound from the extreme entry,
    /// `f±` from the outermost `s` columns. `ν` is left to [`estimate_linearization`].
    pub fn into_model(self, name: impl Into<String>) -> NonlinearityModel {
        let bound = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let table = Arc::new(self);
        let (t_eval, t_plus, t_minus) = (table.clone(), table.clone(), table.clone());
        let s_max = *table.ss.last().expect("non-empty");
        let s_min = table.ss[0];
        NonlinearityModel::new(name, bound, move |x, s, _| t_eval.value(x, s))
            .with_limits(move |x| t_plus.value(x, s_max), move |x| t_minus.value(x, s_min))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizationReport {
    pub nu: f64,
    /// `max_x |D_s f(x,0,0) − ν|`
    pub max_deviation: f64,
    pub max_abs_f0: f64,
    pub max_abs_dy: f64,
}

/// Estimate `ν = D_s f(x,0,0)` by central differences at every node and check
/// that `f(x,0,0) = 0`, `D_y f(x,0,0) = 0` and `ν` is constant in `x`.
pub fn estimate_linearization(
    model: &NonlinearityModel,
    grid: &QuadratureGrid,
    fd_step: f64,
) -> Result<LinearizationReport> {
    if !(fd_step > 0.0) {
        return Err(Error::InvalidArgument(format!("fd_step must be positive, got {fd_step}")));
    }
    let h = fd_step;
    let samples: Vec<(f64, f64, f64, f64)> = grid
        .nodes
        .iter()
        .map(|&x| {
            let ds = (model.eval(x, h, 0.0) - model.eval(x, -h, 0.0)) / (2.0 * h);
            let dy = (model.eval(x, 0.0, h) - model.eval(x, 0.0, -h)) / (2.0 * h);
            (x, ds, dy, model.eval(x, 0.0, 0.0))
        })
        .collect();
    let nu = samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64;

    type Sample = (f64, f64, f64, f64);
    let worst = |key: &dyn Fn(&Sample) -> f64| {
        samples
            .iter()
            .map(|s| (s.0, key(s)))
            .fold((f64::NAN, 0.0f64), |acc, (x, v)| if v > acc.1 { (x, v) } else { acc })
    };
    let (x_dev, max_deviation) = worst(&|s| (s.1 - nu).abs());
    let (x_f0, max_abs_f0) = worst(&|s| s.3.abs());
    let (x_dy, max_abs_dy) = worst(&|s| s.2.abs());

    if max_abs_f0 > E4_TOLERANCE {
        return Err(Error::HypothesisE4Violated {
            x: x_f0,
            reason: format!("f(x,0,0) = {:e} is not zero", max_abs_f0),
        });
    }
    if max_abs_dy > E4_TOLERANCE {
        return Err(Error::HypothesisE4Violated {
            x: x_dy,
            reason: format!("|D_y f(x,0,0)| = {:e} is not zero", max_abs_dy),
        });
    }
    if max_deviation > E4_TOLERANCE {
        return Err(Error::HypothesisE4Violated {
            x: x_dev,
            reason: format!("D_s f(x,0,0) deviates from its mean {nu} by {max_deviation:e}"),
        });
    }
    Ok(LinearizationReport {
        nu,
        max_deviation,
        max_abs_f0,
        max_abs_dy,
    })
}

/// Sampling box for [`verify_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSampleSpec {
    pub length: f64,
    pub x_samples: usize,
    /// Integer `s` values in `[-s_box, s_box]` are scanned first.
    pub s_box: u32,
    pub fine_step: f64,
    pub y_box: f64,
    pub y_samples: usize,
    /// Heavy tails `s = ±10^e` for `e = 1..=tail_exponent`.
    pub tail_exponent: u32,
}

impl BoundSampleSpec {
    pub fn for_length(length: f64) -> Self {
        Self {
            length,
            x_samples: 17,
            s_box: 10,
            fine_step: 0.05,
            y_box: 10.0,
            y_samples: 5,
            tail_exponent: 12,
        }
    }

    /// Cell midpoints of a uniform partition of `(0, length)`.
    pub fn x_values(&self) -> Vec<f64> {
        (0..self.x_samples)
            .map(|i| self.length * (i as f64 + 0.5) / self.x_samples as f64)
            .collect()
    }

    /// Gradient values sorted by magnitude, so `y = 0` comes first.
    pub fn y_values(&self) -> Vec<f64> {
        if self.y_samples <= 1 {
            return vec![0.0];
        }
        let mut ys: Vec<f64> = (0..self.y_samples)
            .map(|i| -self.y_box + 2.0 * self.y_box * i as f64 / (self.y_samples - 1) as f64)
            .collect();
        ys.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        ys
    }

    /// `s` values in scan order: integers by increasing magnitude, tails, then the fine grid.
    pub fn s_values(&self) -> Vec<f64> {
        let mut s = vec![0.0];
        for i in 1..=self.s_box {
            s.push(i as f64);
            s.push(-(i as f64));
        }
        for e in 1..=self.tail_exponent {
            let v = 10f64.powi(e as i32);
            s.push(v);
            s.push(-v);
        }
        let n_fine = (2.0 * self.s_box as f64 / self.fine_step).round() as usize;
        s.extend((0..=n_fine).map(|i| -(self.s_box as f64) + i as f64 * self.fine_step));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_m: f64,
    pub max_abs: f64,
    /// `(x, s, y)` where the maximum was attained.
    pub argmax: (f64, f64, f64),
    pub pass: bool,
    /// First sample, in scan order, with `|f| > m`.
    pub witness: Option<(f64, f64, f64)>,
}

/// Sampled check of `|f(x,s,y)| ≤ m`.
pub fn verify_bound(model: &NonlinearityModel, spec: &BoundSampleSpec) -> BoundReport {
    let xs = spec.x_values();
    let ys = spec.y_values();
    let mut max_abs = 0.0f64;
    let mut argmax = (xs[0], 0.0, 0.0);
    let mut witness = None;
    // tiny slack for values that sit exactly on the bound
    let limit = model.bound_m * (1.0 + 1e-12);
    for s in spec.s_values() {
        for &y in &ys {
            for &x in &xs {
                let v = model.eval(x, s, y).abs();
                if v > max_abs || v.is_nan() {
                    max_abs = if v.is_nan() { f64::INFINITY } else { v };
                    argmax = (x, s, y);
                }
                if witness.is_none() && !(v <= limit) {
                    witness = Some((x, s, y));
                }
            }
        }
    }
    BoundReport {
        bound_m: model.bound_m,
        max_abs,
        argmax,
        pass: witness.is_none(),
        witness,
    }
}
