//! Experiment configuration: a TOML file with one table per pipeline stage.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use resonance_core::semiflow::{IntegratorConfig, Scheme};

/// A configuration problem, located in the source text when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source_name: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.source_name, line, self.message),
            None => write!(f, "{}: {}", self.source_name, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Conditions, indices, criterion and orbit search.
    #[default]
    Criterion,
    /// Drift demonstration for a source without a sign condition.
    Drift,
}

/// A number, or a multiple of π written as `"pi"`, `"2pi"`, `"0.5*pi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Value(f64),
    Expr(String),
}

impl Length {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            Length::Value(v) => Ok(*v),
            Length::Expr(s) => {
                let t = s.trim();
                let head = t
                    .strip_suffix("pi")
                    .ok_or_else(|| format!("cannot read length {s:?}; use a number or a multiple of pi"))?
                    .trim()
                    .trim_end_matches('*')
                    .trim();
                if head.is_empty() {
                    return Ok(PI);
                }
                head.parse::<f64>()
                    .map(|m| m * PI)
                    .map_err(|_| format!("cannot read length {s:?}; use a number or a multiple of pi"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub n_modes: usize,
    pub length: Length,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySection {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
    /// CSV with columns `x, s, f`, relative to the config file.
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub delta: f64,
}

fn default_alpha() -> f64 {
    0.8
}

impl Default for ConstantsSection {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            delta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSection {
    pub seed: u64,
    pub ball_samples: usize,
    pub radii: usize,
    pub directions: usize,
    pub sphere_samples: usize,
    pub boundary_samples: usize,
    pub s_values: Vec<f64>,
    pub radius_start: f64,
    pub radius_cap: f64,
    pub fd_step: f64,
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self {
            seed: 0,
            ball_samples: 64,
            radii: 32,
            directions: 2,
            sphere_samples: 2,
            boundary_samples: 256,
            s_values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            radius_start: 0.125,
            radius_cap: 1e6,
            fd_step: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationSection {
    pub scheme: String,
    pub step: f64,
    pub t_end: f64,
    pub save_stride: usize,
    pub phi_taylor_threshold: f64,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        Self {
            scheme: "ETD2".into(),
            step: 1e-2,
            t_end: 50.0,
            save_stride: 10,
            phi_taylor_threshold: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitSection {
    pub epsilon: f64,
    pub n_starts: usize,
    /// Kernel radius of the bounded region used when no isolating neighbourhood exists.
    pub drift_radius: f64,
    pub keep_trajectories: usize,
}

impl Default for OrbitSection {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            n_starts: 32,
            drift_radius: 10.0,
            keep_trajectories: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentSection,
    pub operator: OperatorSection,
    pub nonlinearity: NonlinearitySection,
    #[serde(default)]
    pub constants: ConstantsSection,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    #[serde(default)]
    pub orbit: OrbitSection,
}

/// A parsed and validated configuration together with its origin.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    pub text: String,
    pub source_name: String,
    pub base_dir: Option<PathBuf>,
    pub length: f64,
    pub scheme: Scheme,
}

/// 1-based line of `key = …` inside `[section]`, if present.
fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut section_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                section_line = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    section_line
}

fn line_col(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            source_name: path.display().to_string(),
            line: None,
            message: format!("cannot read config: {e}"),
        })?;
        Self::from_str(&text, &path.display().to_string(), path.parent().map(Path::to_path_buf))
    }

    pub fn from_str(text: &str, source_name: &str, base_dir: Option<PathBuf>) -> Result<Self, ConfigError> {
        let err = |line: Option<usize>, message: String| ConfigError {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let config: Config = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_col(text, s.start));
            err(line, e.message().to_string())
        })?;
        let at = |section: &str, key: &str, message: String| err(line_of(text, section, key), message);

        let op = &config.operator;
        if op.n_modes == 0 || op.n_modes > 4096 {
            return Err(at("operator", "n_modes", format!("n_modes must lie in 1..=4096, got {}", op.n_modes)));
        }
        let length = op.length.value().map_err(|m| at("operator", "length", m))?;
        if !(length > 0.0) || !length.is_finite() {
            return Err(at("operator", "length", format!("length must be positive, got {length}")));
        }
        if op.k == 0 || op.k > op.n_modes {
            return Err(at(
                "operator",
                "k",
                format!("k must lie in 1..={} (the retained eigenvalues), got {}", op.n_modes, op.k),
            ));
        }
        let c = &config.constants;
        if !(c.alpha > 0.75 && c.alpha < 1.0) {
            return Err(at("constants", "alpha", format!("alpha must lie in (3/4, 1), got {}", c.alpha)));
        }
        if !(c.delta >= 0.0) {
            return Err(at("constants", "delta", format!("delta must be >= 0, got {}", c.delta)));
        }
        let ch = &config.checks;
        for (key, v) in [
            ("ball_samples", ch.ball_samples),
            ("radii", ch.radii),
            ("directions", ch.directions),
            ("sphere_samples", ch.sphere_samples),
            ("boundary_samples", ch.boundary_samples),
        ] {
            if v == 0 {
                return Err(at("checks", key, format!("{key} must be positive")));
            }
        }
        if ch.s_values.is_empty() || ch.s_values.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(at("checks", "s_values", "s_values must be a non-empty list in [0, 1]".into()));
        }
        if !(ch.radius_start > 0.0 && ch.radius_cap >= ch.radius_start) {
            return Err(at("checks", "radius_start", "need 0 < radius_start <= radius_cap".into()));
        }
        if !(ch.fd_step > 0.0) {
            return Err(at("checks", "fd_step", "fd_step must be positive".into()));
        }
        let scheme = match config.integration.scheme.to_ascii_uppercase().as_str() {
            "ETD1" => Scheme::Etd1,
            "ETD2" => Scheme::Etd2,
            other => {
                return Err(at(
                    "integration",
                    "scheme",
                    format!("unknown scheme {other:?}; expected ETD1 or ETD2"),
                ))
            }
        };
        let loaded = Self {
            config,
            text: text.to_string(),
            source_name: source_name.to_string(),
            base_dir,
            length,
            scheme,
        };
        loaded
            .integrator()
            .validate()
            .map_err(|e| at("integration", "step", e.to_string()))?;
        let o = &loaded.config.orbit;
        if !(o.epsilon > 0.0) {
            return Err(at("orbit", "epsilon", "epsilon must be positive".into()));
        }
        if !(o.drift_radius > 0.0) {
            return Err(at("orbit", "drift_radius", "drift_radius must be positive".into()));
        }
        let nl = &loaded.config.nonlinearity;
        if nl.name == "tabulated" && nl.table.is_none() {
            return Err(at("nonlinearity", "name", "tabulated nonlinearity needs a table path".into()));
        }
        Ok(loaded)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let i = &self.config.integration;
        IntegratorConfig {
            step_h: i.step,
            scheme: self.scheme,
            t_end: i.t_end,
            phi_taylor_threshold: i.phi_taylor_threshold,
            save_stride: i.save_stride,
        }
    }

    pub fn table_path(&self) -> Option<PathBuf> {
        let table = self.config.nonlinearity.table.as_ref()?;
        Some(match &self.base_dir {
            Some(dir) if table.is_relative() => dir.join(table),
            _ => table.clone(),
        })
    }

    /// Diagnostic located at `key` in `[section]`, for problems found after parsing.
    pub fn error_at(&self, section: &str, key: &str, message: String) -> ConfigError {
        ConfigError {
            source_name: self.source_name.clone(),
            line: line_of(&self.text, section, key),
            message,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[experiment]
name = "t"

[operator]
n_modes = 8
length = "pi"
k = 2

[nonlinearity]
name = "arctan"
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = LoadedConfig::from_str(MINIMAL, "t.toml", None).unwrap();
        assert_eq!(c.length, PI);
        assert_eq!(c.config.constants.alpha, 0.8);
        assert_eq!(c.config.checks.boundary_samples, 256);
        assert_eq!(c.scheme, Scheme::Etd2);
        assert_eq!(c.config.experiment.mode, Mode::Criterion);
    }

    #[test]
    fn lengths() {
        assert_eq!(Length::Expr("2pi".into()).value().unwrap(), 2.0 * PI);
        assert_eq!(Length::Expr("0.5 * pi".into()).value().unwrap(), 0.5 * PI);
        assert_eq!(Length::Value(3.0).value().unwrap(), 3.0);
        assert!(Length::Expr("tau".into()).value().is_err());
    }

    #[test]
    fn semantic_errors_carry_lines() {
        let bad = MINIMAL.replace("k = 2", "k = 9");
        let e = LoadedConfig::from_str(&bad, "t.toml", None).unwrap_err();
        assert_eq!(e.line, Some(8));
        assert!(e.to_string().starts_with("t.toml:8:"));
        let bad = format!("{MINIMAL}\n[constants]\nalpha = 0.5\n");
        let e = LoadedConfig::from_str(&bad, "t.toml", None).unwrap_err();
        assert_eq!(e.line, Some(14));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let bad = MINIMAL.replace("n_modes = 8", "n_modes = ");
        let e = LoadedConfig::from_str(&bad, "t.toml", None).unwrap_err();
        assert_eq!(e.line, Some(6));
        let bad = MINIMAL.replace("k = 2", "k = 2\nbogus = 1");
        let e = LoadedConfig::from_str(&bad, "t.toml", None).unwrap_err();
        assert_eq!(e.line, Some(9));
    }
}
