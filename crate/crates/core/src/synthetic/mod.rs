//! Synthetic graph histories: forest-fire snapshots with planted dense
//! subgraphs, adversarial constructions and plain `G(n, p)` histories.
//!
//! All randomness comes from ChaCha8 streams derived from one 64-bit seed,
//! so a history is reproducible on any platform. Snapshot `t` of the
//! background uses stream `t`; plant `p` in snapshot `t` uses its own
//! stream, so dropping the plants leaves the background bit-identical.

mod adversarial;
mod forest_fire;

use std::io::{BufRead, Write};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use adversarial::{AdversarialFamily, AdversarialInstance};
pub use forest_fire::forest_fire_edges;

use crate::error::{BffError, Result};
use crate::graph_model::{GraphHistory, NodeId, Snapshot};

/// Name of the generator recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8Rng";

const DEFAULT_BURN: f64 = 0.35;

fn default_burn() -> f64 {
    DEFAULT_BURN
}

/// A forest-fire history with planted dense subgraphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub n: usize,
    pub tau: usize,
    #[serde(default = "default_burn")]
    pub p_forward: f64,
    #[serde(default = "default_burn")]
    pub p_backward: f64,
    #[serde(default)]
    pub planted: Vec<PlantSpec>,
    #[serde(default)]
    pub seed: u64,
}

/// One planted subgraph: every pair of its nodes gains an edge with
/// probability `edge_prob` in each listed snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub size: usize,
    pub edge_prob: f64,
    /// Snapshot indices; all snapshots when absent.
    #[serde(default)]
    pub snapshots: Option<Vec<usize>>,
    /// How the nodes are chosen; random with a seed derived from the
    /// instance seed when absent.
    #[serde(default)]
    pub node_choice: Option<NodeChoice>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeChoice {
    /// Uniform among nodes not used by earlier plants.
    Random(u64),
    Explicit(Vec<NodeId>),
}

/// A planted set as generated: node ids and the snapshots it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedSet {
    pub nodes: Vec<NodeId>,
    pub snapshots: Vec<usize>,
}

impl InstanceSpec {
    pub fn new(n: usize, tau: usize, seed: u64) -> Self {
        InstanceSpec {
            n,
            tau,
            p_forward: DEFAULT_BURN,
            p_backward: DEFAULT_BURN,
            planted: Vec::new(),
            seed,
        }
    }

    /// Adds a plant over `snapshots` (all when `None`) with randomly chosen nodes.
    pub fn plant(mut self, size: usize, edge_prob: f64, snapshots: Option<Vec<usize>>) -> Self {
        self.planted.push(PlantSpec {
            size,
            edge_prob,
            snapshots,
            node_choice: None,
        });
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: InstanceSpec = toml::from_str(text).map_err(|e| BffError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("instance spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BffError::InvalidSpec(m));
        if self.n == 0 || self.tau == 0 {
            return bad("n and tau must be at least 1".into());
        }
        for (name, p) in [("p_forward", self.p_forward), ("p_backward", self.p_backward)] {
            if !(0.0..1.0).contains(&p) {
                return bad(format!("{name} = {p} must lie in [0, 1)"));
            }
        }
        for (i, plant) in self.planted.iter().enumerate() {
            if !(0.0..=1.0).contains(&plant.edge_prob) {
                return bad(format!("plant {i}: edge_prob {} must lie in [0, 1]", plant.edge_prob));
            }
            if plant.size == 0 || plant.size > self.n {
                return bad(format!("plant {i}: size {} must lie in [1, {}]", plant.size, self.n));
            }
            if let Some(s) = &plant.snapshots {
                if let Some(t) = s.iter().find(|&&t| t >= self.tau) {
                    return bad(format!("plant {i}: snapshot {t} out of range"));
                }
            }
            if let Some(NodeChoice::Explicit(nodes)) = &plant.node_choice {
                let mut sorted = nodes.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != plant.size || sorted.last().is_some_and(|&u| u >= self.n) {
                    return bad(format!("plant {i}: explicit nodes must be {} distinct ids below n", plant.size));
                }
            }
        }
        Ok(())
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn plant_stream(plant: usize, t: usize) -> u64 {
    ((plant as u64 + 1) << 32) | t as u64
}

fn choose_plants(spec: &InstanceSpec) -> Result<Vec<PlantedSet>> {
    let mut used = vec![false; spec.n];
    let mut out = Vec::with_capacity(spec.planted.len());
    for (p, plant) in spec.planted.iter().enumerate() {
        let mut nodes = match &plant.node_choice {
            Some(NodeChoice::Explicit(nodes)) => nodes.clone(),
            choice => {
                let seed = match choice {
                    Some(NodeChoice::Random(seed)) => *seed,
                    _ => spec.seed,
                };
                let free: Vec<NodeId> = (0..spec.n).filter(|&u| !used[u]).collect();
                if free.len() < plant.size {
                    return Err(BffError::InvalidSpec(format!(
                        "plant {p}: only {} nodes left outside earlier plants",
                        free.len()
                    )));
                }
                let mut rng = stream_rng(seed, plant_stream(p, u32::MAX as usize));
                sample(&mut rng, free.len(), plant.size).into_iter().map(|i| free[i]).collect()
            }
        };
        nodes.sort_unstable();
        nodes.dedup();
        for &u in &nodes {
            used[u] = true;
        }
        let snapshots = plant.snapshots.clone().map_or_else(|| (0..spec.tau).collect(), |mut s| {
            s.sort_unstable();
            s.dedup();
            s
        });
        out.push(PlantedSet { nodes, snapshots });
    }
    Ok(out)
}

// Pairs of `nodes` kept independently with probability `p`.
fn random_pairs<R: Rng>(nodes: &[NodeId], p: f64, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    let mut e = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if rng.gen::<f64>() < p {
                e.push((a, b));
            }
        }
    }
    e
}

/// Builds the history described by `spec` and returns it with the planted
/// sets as ground truth, in plant order.
pub fn generate_history(spec: &InstanceSpec) -> Result<(GraphHistory, Vec<PlantedSet>)> {
    spec.validate()?;
    let plants = choose_plants(spec)?;
    let snapshots = (0..spec.tau)
        .map(|t| {
            let mut rng = stream_rng(spec.seed, t as u64);
            let mut edges = forest_fire_edges(spec.n, spec.p_forward, spec.p_backward, &mut rng);
            for (p, (plant, set)) in spec.planted.iter().zip(&plants).enumerate() {
                if set.snapshots.binary_search(&t).is_ok() {
                    let mut rng = stream_rng(spec.seed, plant_stream(p, t));
                    edges.extend(random_pairs(&set.nodes, plant.edge_prob, &mut rng));
                }
            }
            Snapshot::from_edges(spec.n, edges)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((GraphHistory::new(spec.n, snapshots)?, plants))
}

/// `tau` independent `G(n, p)` snapshots.
pub fn gnp_history(n: usize, tau: usize, p: f64, seed: u64) -> Result<GraphHistory> {
    if !(0.0..=1.0).contains(&p) {
        return Err(BffError::InvalidSpec(format!("edge probability {p} must lie in [0, 1]")));
    }
    let snapshots = (0..tau)
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            Snapshot::from_edges(n, gnp_edges(n, p, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    GraphHistory::new(n, snapshots)
}

// Geometric skipping over the pairs (u, v), u < v, in row order.
fn gnp_edges<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    let mut e = Vec::new();
    if p <= 0.0 || n < 2 {
        return e;
    }
    if p >= 1.0 {
        for v in 1..n {
            e.extend((0..v).map(|u| (u, v)));
        }
        return e;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = 1.0 - rng.gen::<f64>();
        w += 1 + (r.ln() / log_q).floor() as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            e.push((w as NodeId, v));
        }
    }
    e
}

/// Writes one line per planted set: snapshot indices, `|`, node labels.
pub fn write_ground_truth<W: Write>(history: &GraphHistory, plants: &[PlantedSet], mut out: W) -> Result<()> {
    for plant in plants {
        let snaps: Vec<String> = plant.snapshots.iter().map(ToString::to_string).collect();
        let labels: Vec<String> = plant.nodes.iter().map(|&u| history.label(u).into_owned()).collect();
        writeln!(out, "{} | {}", snaps.join(" "), labels.join(" "))?;
    }
    Ok(())
}

/// Reads a ground-truth sidecar, resolving labels against `history`.
pub fn read_ground_truth<R: BufRead>(history: &GraphHistory, input: R) -> Result<Vec<PlantedSet>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| BffError::Parse { line: i + 1, message };
        let (snaps, labels) = line
            .split_once('|')
            .ok_or_else(|| parse_err("expected `snapshots | labels`".into()))?;
        let snapshots = snaps
            .split_whitespace()
            .map(|s| s.parse::<usize>().map_err(|e| parse_err(format!("bad snapshot index `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<&str> = labels.split_whitespace().collect();
        let mut nodes = history.resolve_labels(&labels)?;
        nodes.sort_unstable();
        out.push(PlantedSet { nodes, snapshots });
    }
    Ok(out)
}
