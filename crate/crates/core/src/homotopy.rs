//! Symbolic pointed homotopy types: the zero type `0̄` and finite wedges of spheres.
//!
//! Rendering: `0`, `Sigma^2`, `Sigma^1 v Sigma^2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HomotopyType {
    Zero,
    /// Sorted, non-empty multiset of sphere dimensions.
    Wedge(Vec<u32>),
}

impl HomotopyType {
    /// `Σ^d`.
    pub fn sphere(d: u32) -> Self {
        HomotopyType::Wedge(vec![d])
    }

    /// Canonical form of an arbitrary multiset; empty means `0̄`.
    pub fn from_dims(mut dims: Vec<u32>) -> Self {
        if dims.is_empty() {
            HomotopyType::Zero
        } else {
            dims.sort_unstable();
            HomotopyType::Wedge(dims)
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, HomotopyType::Zero)
    }

    pub fn dims(&self) -> &[u32] {
        match self {
            HomotopyType::Zero => &[],
            HomotopyType::Wedge(d) => d,
        }
    }

    /// The single sphere dimension, if this is `Σ^d`.
    pub fn sphere_dim(&self) -> Option<u32> {
        match self.dims() {
            [d] => Some(*d),
            _ => None,
        }
    }
}

pub fn wedge(h1: &HomotopyType, h2: &HomotopyType) -> HomotopyType {
    let mut dims = h1.dims().to_vec();
    dims.extend_from_slice(h2.dims());
    HomotopyType::from_dims(dims)
}

/// `Σᵃ ∧ Σᵇ = Σ^{a+b}`, extended bilinearly over wedges; `0̄` annihilates.
pub fn smash(h1: &HomotopyType, h2: &HomotopyType) -> HomotopyType {
    let dims = h1
        .dims()
        .iter()
        .flat_map(|a| h2.dims().iter().map(move |b| a + b))
        .collect();
    HomotopyType::from_dims(dims)
}

pub fn equal(h1: &HomotopyType, h2: &HomotopyType) -> bool {
    HomotopyType::from_dims(h1.dims().to_vec()) == HomotopyType::from_dims(h2.dims().to_vec())
}

impl fmt::Display for HomotopyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomotopyType::Zero => write!(f, "0"),
            HomotopyType::Wedge(dims) => {
                for (i, d) in dims.iter().enumerate() {
                    if i > 0 {
                        write!(f, " v ")?;
                    }
                    write!(f, "Sigma^{d}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseHomotopyError(String);

impl fmt::Display for ParseHomotopyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse homotopy type from {:?}", self.0)
    }
}

impl std::error::Error for ParseHomotopyError {}

impl FromStr for HomotopyType {
    type Err = ParseHomotopyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(HomotopyType::Zero);
        }
        let dims = s
            .split(" v ")
            .map(|part| {
                part.trim()
                    .strip_prefix("Sigma^")
                    .and_then(|d| d.parse::<u32>().ok())
                    .ok_or_else(|| ParseHomotopyError(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HomotopyType::from_dims(dims))
    }
}

impl Serialize for HomotopyType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HomotopyType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
