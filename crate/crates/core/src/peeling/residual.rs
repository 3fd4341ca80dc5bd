use crate::density::{aggregate_fraction, AggregateKind, DensityKind, Frac, InducedStats};
use crate::error::{BffError, Result};
use crate::graph_model::{HistoryView, NodeId, Snapshot};

#[derive(Clone, Debug)]
struct Track<'a> {
    snapshot: &'a Snapshot,
    degree: Vec<u32>,
    // number of residual nodes at each degree
    histogram: Vec<u32>,
    min_degree: usize,
    edges: u64,
}

impl Track<'_> {
    fn settle(&mut self) {
        while self.min_degree < self.histogram.len() && self.histogram[self.min_degree] == 0 {
            self.min_degree += 1;
        }
    }
}

/// The residual node set of a peel together with, per snapshot, its induced
/// degrees, edge count and minimum degree, all maintained under removals.
///
/// The aggregate objective of the residual set is available at any point in
/// `O(tau)`.
#[derive(Clone, Debug)]
pub struct ResidualHistory<'a> {
    tracks: Vec<Track<'a>>,
    alive: Vec<bool>,
    size: usize,
}

impl<'a> ResidualHistory<'a> {
    pub fn new(view: &HistoryView<'a>) -> Self {
        Self::within(view, None)
    }

    /// Residual set starting from the `active` nodes (all nodes if `None`).
    pub fn within(view: &HistoryView<'a>, active: Option<&[bool]>) -> Self {
        let n = view.n();
        let alive = active.map_or_else(|| vec![true; n], <[bool]>::to_vec);
        let size = alive.iter().filter(|&&a| a).count();
        let tracks = view
            .snapshots()
            .iter()
            .map(|&snapshot| {
                let degree: Vec<u32> = (0..n)
                    .map(|u| {
                        if alive[u] {
                            snapshot.neighbors(u).iter().filter(|&&v| alive[v]).count() as u32
                        } else {
                            0
                        }
                    })
                    .collect();
                let top = degree.iter().copied().max().unwrap_or(0) as usize;
                let mut histogram = vec![0u32; top + 1];
                let mut twice = 0u64;
                for u in (0..n).filter(|&u| alive[u]) {
                    histogram[degree[u] as usize] += 1;
                    twice += u64::from(degree[u]);
                }
                let mut track = Track {
                    snapshot,
                    degree,
                    histogram,
                    min_degree: 0,
                    edges: twice / 2,
                };
                track.settle();
                track
            })
            .collect();
        ResidualHistory { tracks, alive, size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tau(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_alive(&self, u: NodeId) -> bool {
        self.alive[u]
    }

    pub fn alive_mask(&self) -> &[bool] {
        &self.alive
    }

    pub fn alive_nodes(&self) -> Vec<NodeId> {
        (0..self.alive.len()).filter(|&u| self.alive[u]).collect()
    }

    /// Degree of `u` inside the residual set in snapshot `t`.
    pub fn degree(&self, t: usize, u: NodeId) -> u32 {
        self.tracks[t].degree[u]
    }

    pub fn edges(&self, t: usize) -> u64 {
        self.tracks[t].edges
    }

    /// Minimum degree of the residual set in snapshot `t` (0 when empty).
    pub fn min_degree(&self, t: usize) -> u64 {
        if self.size == 0 {
            0
        } else {
            self.tracks[t].min_degree as u64
        }
    }

    fn stats(&self) -> impl Iterator<Item = InducedStats> + '_ {
        (0..self.tracks.len()).map(|t| InducedStats {
            edges: self.edges(t),
            min_degree: self.min_degree(t),
        })
    }

    /// `f` of the residual set. `None` when the set is empty.
    pub(crate) fn objective(&self, kind: AggregateKind) -> Option<Frac> {
        (self.size > 0).then(|| Frac::new(aggregate_fraction(kind, self.size, self.stats())))
    }

    pub fn remove(&mut self, u: NodeId) {
        if !self.alive[u] {
            return;
        }
        self.alive[u] = false;
        self.size -= 1;
        let alive = &self.alive;
        for track in &mut self.tracks {
            let du = track.degree[u];
            track.histogram[du as usize] -= 1;
            track.edges -= u64::from(du);
            for &w in track.snapshot.neighbors(u) {
                if alive[w] {
                    let d = track.degree[w] as usize;
                    track.histogram[d] -= 1;
                    track.histogram[d - 1] += 1;
                    track.degree[w] -= 1;
                    track.min_degree = track.min_degree.min(d - 1);
                }
            }
            track.degree[u] = 0;
            track.settle();
        }
    }

    /// `f(S \ {u})` for a residual node `u`, leaving the state unchanged.
    /// Requires at least two residual nodes.
    pub(crate) fn objective_without(&mut self, u: NodeId, kind: AggregateKind) -> Frac {
        debug_assert!(self.alive[u] && self.size >= 2);
        let need_min = kind.density() == DensityKind::MinDegree;
        let alive = &self.alive;
        let stats: Vec<InducedStats> = self
            .tracks
            .iter_mut()
            .map(|track| {
                let du = track.degree[u];
                let edges = track.edges - u64::from(du);
                if !need_min {
                    return InducedStats {
                        edges,
                        min_degree: 0,
                    };
                }
                track.histogram[du as usize] -= 1;
                for &w in track.snapshot.neighbors(u) {
                    if alive[w] {
                        let d = track.degree[w] as usize;
                        track.histogram[d] -= 1;
                        track.histogram[d - 1] += 1;
                    }
                }
                let mut m = track.min_degree.saturating_sub(1);
                while track.histogram[m] == 0 {
                    m += 1;
                }
                for &w in track.snapshot.neighbors(u) {
                    if alive[w] {
                        let d = track.degree[w] as usize;
                        track.histogram[d - 1] -= 1;
                        track.histogram[d] += 1;
                    }
                }
                track.histogram[du as usize] += 1;
                InducedStats {
                    edges,
                    min_degree: m as u64,
                }
            })
            .collect();
        Frac::new(aggregate_fraction(kind, self.size - 1, stats))
    }

    /// The residual node whose removal leaves the largest `f`, smallest id on
    /// ties.
    pub fn greedy_choice(&mut self, kind: AggregateKind) -> Result<NodeId> {
        if self.size < 2 {
            return Err(BffError::domain("greedy step needs at least two residual nodes"));
        }
        let mut best: Option<(Frac, NodeId)> = None;
        for u in 0..self.alive.len() {
            if !self.alive[u] {
                continue;
            }
            let value = self.objective_without(u, kind);
            if best.is_none_or(|(b, _)| value > b) {
                best = Some((value, u));
            }
        }
        Ok(best.map(|(_, u)| u).expect("size >= 2"))
    }
}

/// Removes and returns the node `v` maximizing `f(S \ {v})` for the target
/// aggregate (smallest id on ties).
pub fn peel_step_greedy(residual: &mut ResidualHistory<'_>, target: AggregateKind) -> Result<NodeId> {
    let u = residual.greedy_choice(target)?;
    residual.remove(u);
    Ok(u)
}
