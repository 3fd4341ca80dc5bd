use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::AggregateKind;
use crate::error::{BffError, Result};
use crate::o2bff::InitKind;
use crate::peeling::Scorer;

/// A solver as named in grids and on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Peeling with the given scorer, or the default one for the kind.
    Bff(Option<Scorer>),
    Dcs,
    Iterative(InitKind),
    IncDensity,
    IncOverlap,
}

impl SolverKind {
    pub fn is_o2(self) -> bool {
        matches!(
            self,
            SolverKind::Iterative(_) | SolverKind::IncDensity | SolverKind::IncOverlap
        )
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::Bff(None) => f.write_str("bff"),
            SolverKind::Bff(Some(Scorer::Greedy(_))) => f.write_str("bff-greedy"),
            SolverKind::Bff(Some(s)) => write!(f, "bff-{s}"),
            SolverKind::Dcs => f.write_str("dcs"),
            SolverKind::Iterative(InitKind::Random(seed)) => write!(f, "itr-r:{seed}"),
            SolverKind::Iterative(InitKind::Contiguous) => f.write_str("itr-c"),
            SolverKind::Iterative(InitKind::AtLeastK) => f.write_str("itr-k"),
            SolverKind::IncDensity => f.write_str("inc-d"),
            SolverKind::IncOverlap => f.write_str("inc-o"),
        }
    }
}

/// Accepts `bff`, `bff-min`, `bff-avg`, `bff-greedy`, `dcs`, `itr-r[:seed]`,
/// `itr-c`, `itr-k`, `inc-d`, `inc-o`. A greedy scorer targets the kind it
/// is run with.
impl FromStr for SolverKind {
    type Err = BffError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "bff" => SolverKind::Bff(None),
            "bff-min" => SolverKind::Bff(Some(Scorer::MinDegree)),
            "bff-avg" => SolverKind::Bff(Some(Scorer::AvgDegree)),
            // placeholder target, replaced per kind when run
            "bff-greedy" => SolverKind::Bff(Some(Scorer::Greedy(AggregateKind::MM))),
            "dcs" => SolverKind::Dcs,
            "itr-r" => SolverKind::Iterative(InitKind::Random(0)),
            "itr-c" => SolverKind::Iterative(InitKind::Contiguous),
            "itr-k" => SolverKind::Iterative(InitKind::AtLeastK),
            "inc-d" => SolverKind::IncDensity,
            "inc-o" => SolverKind::IncOverlap,
            other => match other.strip_prefix("itr-r:") {
                Some(seed) => SolverKind::Iterative(InitKind::Random(
                    seed.parse().map_err(|e| BffError::domain(format!("bad seed in `{s}`: {e}")))?,
                )),
                None => return Err(BffError::domain(format!("unknown solver `{s}`"))),
            },
        })
    }
}

impl Serialize for SolverKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SolverKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A history file with an optional ground-truth sidecar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub history: PathBuf,
    #[serde(default)]
    pub truth: Option<PathBuf>,
}

/// What the grid varies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum Protocol {
    /// One plant in every snapshot; x = its edge probability.
    Recovery {
        n: usize,
        tau: usize,
        plant_size: usize,
        p_a: Vec<f64>,
    },
    /// Plant A in every snapshot and plant B in a fraction of them;
    /// x = that fraction.
    TwoPlant {
        n: usize,
        tau: usize,
        plant_size: usize,
        p_a: f64,
        p_b: f64,
        fractions: Vec<f64>,
    },
    /// As `two-plant`, with O²BFF solvers run at `k` = the number of
    /// snapshots holding B.
    OnOff {
        n: usize,
        tau: usize,
        plant_size: usize,
        p_a: f64,
        p_b: f64,
        fractions: Vec<f64>,
    },
    /// Histories read from disk; x = 0. O²BFF solvers need `k`.
    Files {
        files: Vec<FileEntry>,
        #[serde(default)]
        k: Option<usize>,
    },
}

fn default_burn() -> f64 {
    0.35
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

/// An experiment grid, usually read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub protocol: Protocol,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub kinds: Vec<AggregateKind>,
    pub solvers: Vec<SolverKind>,
    #[serde(default = "default_burn")]
    pub p_forward: f64,
    #[serde(default = "default_burn")]
    pub p_backward: f64,
    /// Plant whose F-measure fills the `f` column; defaults to B for
    /// `on-off` and to the first plant otherwise.
    #[serde(default)]
    pub target_plant: Option<usize>,
}

impl GridConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let grid: GridConfig = toml::from_str(text).map_err(|e| BffError::InvalidSpec(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BffError::InvalidSpec(m.to_string()));
        if self.kinds.is_empty() || self.solvers.is_empty() {
            return bad("grid needs at least one kind and one solver");
        }
        if self.seeds.is_empty() {
            return bad("grid needs at least one seed");
        }
        let probs_ok = |ps: &[f64]| ps.iter().all(|p| (0.0..=1.0).contains(p));
        match &self.protocol {
            Protocol::Recovery { p_a, .. } => {
                if p_a.is_empty() || !probs_ok(p_a) {
                    return bad("recovery needs p_a values in [0, 1]");
                }
            }
            Protocol::TwoPlant { p_a, p_b, fractions, .. } | Protocol::OnOff { p_a, p_b, fractions, .. } => {
                if fractions.is_empty() || !probs_ok(fractions) || !probs_ok(&[*p_a, *p_b]) {
                    return bad("fractions and probabilities must lie in [0, 1]");
                }
            }
            Protocol::Files { files, k } => {
                if files.is_empty() {
                    return bad("files protocol needs at least one file");
                }
                if k.is_none() && self.solvers.iter().any(|s| s.is_o2()) {
                    return bad("O²BFF solvers need `k` in the files protocol");
                }
            }
        }
        Ok(())
    }

    pub(crate) fn target(&self) -> usize {
        self.target_plant.unwrap_or(match self.protocol {
            Protocol::OnOff { .. } => 1,
            _ => 0,
        })
    }
}
