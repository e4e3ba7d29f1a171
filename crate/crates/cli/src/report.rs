//! Experiment report. Field names are stable; the TOML form round-trips.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Report {
    pub experiment: ExperimentInfo,
    pub hypotheses: Hypotheses,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<VerdictEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighborhood: Option<NeighborhoodEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<IndicesEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<CriterionEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ExperimentInfo {
    pub name: String,
    pub mode: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub n_modes: usize,
    pub length: f64,
    pub k: usize,
    pub lambda: f64,
    pub nonlinearity: String,
    pub alpha: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Hypotheses {
    pub bound_m: f64,
    pub max_abs_f: f64,
    pub e2_holds: bool,
    /// `(x, s, y)` of the first sample with `|f| > m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e2_witness: Option<Vec<f64>>,
    pub e4_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e4_message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_estimated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct VerdictEntry {
    /// `LL`, `SR` or `G`.
    pub check: String,
    /// `LL1`, …, or `neither`.
    pub condition: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral: Option<f64>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct NeighborhoodEntry {
    pub condition: String,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R1_plus_part")]
    pub r1_plus_part: f64,
    #[serde(rename = "R1_minus_part")]
    pub r1_minus_part: f64,
    pub m0: f64,
    #[serde(rename = "R_Q")]
    pub r_q: f64,
    #[serde(rename = "R_P")]
    pub r_p: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct IndicesEntry {
    #[serde(rename = "h_K")]
    pub h_k: String,
    pub linear_index: String,
    pub kernel_factor: String,
    pub assembly_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_exit_set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CriterionEntry {
    pub condition: String,
    pub provenance: String,
    pub nu: f64,
    pub case: String,
    #[serde(rename = "h_K")]
    pub h_k: String,
    pub h_0: String,
    pub existence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_hypothesis: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ShotEntry {
    pub mode: usize,
    pub sign: f64,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exit_time: Option<f64>,
    pub nonzero_equilibrium: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halving_shift_predicted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halving_shift_measured: Option<f64>,
    pub halving_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OrbitEntry {
    /// Shots and starts that are numeric witnesses of an orbit with one end at 0.
    pub orbit_witnesses: usize,
    pub unstable_modes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shots: Vec<ShotEntry>,
    pub n_starts: usize,
    pub converged: usize,
    pub resident: usize,
    pub exited: usize,
    pub near_returns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DriftEntry {
    pub demonstration: String,
    pub slope: f64,
    pub t0: f64,
    pub t1: f64,
    pub mode: usize,
    #[serde(rename = "R_Q")]
    pub r_q: f64,
    #[serde(rename = "R_P")]
    pub r_p: f64,
    pub n_starts: usize,
    pub exited: usize,
    pub max_exit_time: f64,
}

impl Report {
    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
