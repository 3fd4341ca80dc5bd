use std::borrow::Cow;
use std::collections::BTreeSet;

use crate::error::{BffError, Result};
use crate::graph_model::{AverageGraph, HistoryView, NodeId, Snapshot};

/// What the bucket layers index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BucketBasis {
    /// One layer per snapshot, keyed by the node's degree there.
    Snapshots,
    /// A single layer keyed by `tau ×` the node's weighted degree in the
    /// average graph.
    AverageGraph,
}

#[derive(Clone, Debug)]
enum Source<'a> {
    Snapshots(Vec<&'a Snapshot>),
    Average(Cow<'a, AverageGraph>),
}

#[derive(Clone, Debug)]
struct Layer {
    degree: Vec<u64>,
    buckets: Vec<BTreeSet<NodeId>>,
    min_cursor: usize,
}

impl Layer {
    fn new(degree: Vec<u64>, selectable: &[bool], alive: &[bool]) -> Self {
        let top = degree.iter().copied().max().unwrap_or(0) as usize;
        let mut buckets = vec![BTreeSet::new(); top + 1];
        for (u, &d) in degree.iter().enumerate() {
            if alive[u] && selectable[u] {
                buckets[d as usize].insert(u);
            }
        }
        Layer {
            degree,
            buckets,
            min_cursor: 0,
        }
    }

    /// Smallest non-empty bucket index, advancing the cursor.
    fn min_degree(&mut self, steps: &mut u64) -> Option<usize> {
        while self.min_cursor < self.buckets.len() && self.buckets[self.min_cursor].is_empty() {
            self.min_cursor += 1;
            *steps += 1;
        }
        (self.min_cursor < self.buckets.len()).then_some(self.min_cursor)
    }
}

/// Per-layer lists of nodes indexed by current degree in the residual graph.
///
/// Each bucket keeps its members ordered, so the node returned for the
/// minimum is always the smallest id among all tied nodes. A node moves one
/// bucket down (by the edge weight, for the average graph) each time one of
/// its neighbors is removed, so a full peel performs at most `M` moves.
#[derive(Clone, Debug)]
pub struct DegreeBuckets<'a> {
    source: Source<'a>,
    layers: Vec<Layer>,
    alive: Vec<bool>,
    selectable: Vec<bool>,
    alive_count: usize,
    moves: u64,
    cursor_steps: u64,
}

impl<'a> DegreeBuckets<'a> {
    /// One layer per snapshot of the view, over all nodes.
    pub fn for_snapshots(view: &HistoryView<'a>) -> Self {
        Self::for_snapshots_within(view, None, None)
    }

    /// Snapshot layers over the `active` nodes only; nodes not `selectable`
    /// keep their degrees tracked but are never returned as the minimum.
    pub fn for_snapshots_within(
        view: &HistoryView<'a>,
        active: Option<&[bool]>,
        selectable: Option<&[bool]>,
    ) -> Self {
        let n = view.n();
        let alive = active.map_or_else(|| vec![true; n], <[bool]>::to_vec);
        let selectable = selectable.map_or_else(|| vec![true; n], <[bool]>::to_vec);
        let layers = view
            .snapshots()
            .iter()
            .map(|s| {
                let degree = (0..n)
                    .map(|u| {
                        if alive[u] {
                            s.neighbors(u).iter().filter(|&&v| alive[v]).count() as u64
                        } else {
                            0
                        }
                    })
                    .collect();
                Layer::new(degree, &selectable, &alive)
            })
            .collect();
        let alive_count = alive.iter().filter(|&&a| a).count();
        DegreeBuckets {
            source: Source::Snapshots(view.snapshots().to_vec()),
            layers,
            alive,
            selectable,
            alive_count,
            moves: 0,
            cursor_steps: 0,
        }
    }

    /// A single layer over the average graph, over all nodes.
    pub fn for_average_graph(avg: impl Into<Cow<'a, AverageGraph>>) -> Self {
        Self::for_average_graph_within(avg, None, None)
    }

    pub fn for_average_graph_within(
        avg: impl Into<Cow<'a, AverageGraph>>,
        active: Option<&[bool]>,
        selectable: Option<&[bool]>,
    ) -> Self {
        let avg = avg.into();
        let n = avg.n();
        let alive = active.map_or_else(|| vec![true; n], <[bool]>::to_vec);
        let selectable = selectable.map_or_else(|| vec![true; n], <[bool]>::to_vec);
        let degree = (0..n)
            .map(|u| {
                if alive[u] {
                    avg.neighbors(u)
                        .iter()
                        .filter(|&&(v, _)| alive[v])
                        .map(|&(_, c)| u64::from(c))
                        .sum()
                } else {
                    0
                }
            })
            .collect();
        let layer = Layer::new(degree, &selectable, &alive);
        let alive_count = alive.iter().filter(|&&a| a).count();
        DegreeBuckets {
            source: Source::Average(avg),
            layers: vec![layer],
            alive,
            selectable,
            alive_count,
            moves: 0,
            cursor_steps: 0,
        }
    }

    pub fn basis(&self) -> BucketBasis {
        match self.source {
            Source::Snapshots(_) => BucketBasis::Snapshots,
            Source::Average(_) => BucketBasis::AverageGraph,
        }
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn node_count(&self) -> usize {
        self.alive.len()
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_alive(&self, u: NodeId) -> bool {
        self.alive[u]
    }

    /// Current (scaled, for the average graph) degree of `u` in `layer`.
    pub fn degree(&self, layer: usize, u: NodeId) -> u64 {
        self.layers[layer].degree[u]
    }

    /// Whether `u` is filed in bucket `d` of `layer`.
    pub fn bucket_contains(&self, layer: usize, d: u64, u: NodeId) -> bool {
        self.layers[layer]
            .buckets
            .get(d as usize)
            .is_some_and(|b| b.contains(&u))
    }

    /// Bucket moves performed so far (one per residual edge touched).
    pub fn moves(&self) -> u64 {
        self.moves
    }

    /// Cursor advances over empty buckets so far.
    pub fn cursor_steps(&self) -> u64 {
        self.cursor_steps
    }

    /// The smallest score over selectable residual nodes, where a node's score
    /// is its minimum degree across layers.
    pub fn min_score(&mut self) -> Option<u64> {
        let mut steps = 0;
        let best = self
            .layers
            .iter_mut()
            .filter_map(|l| l.min_degree(&mut steps))
            .min();
        self.cursor_steps += steps;
        best.map(|d| d as u64)
    }

    /// The selectable node with the smallest score, smallest id on ties.
    pub fn peek_min(&mut self) -> Option<(NodeId, u64)> {
        let score = self.min_score()?;
        let node = self
            .layers
            .iter()
            .filter(|l| l.min_cursor == score as usize)
            .filter_map(|l| l.buckets[score as usize].first().copied())
            .min()?;
        Some((node, score))
    }

    /// Removes `u` and its edges from every layer.
    pub fn remove(&mut self, u: NodeId) {
        if !self.alive[u] {
            return;
        }
        self.alive[u] = false;
        self.alive_count -= 1;
        let selectable = self.selectable[u];
        let alive = &self.alive;
        let sel = &self.selectable;
        let mut moves = 0;
        let mut apply = |layer: &mut Layer, v: NodeId, by: u64| {
            if !alive[v] {
                return;
            }
            let d = layer.degree[v];
            layer.degree[v] = d - by;
            if sel[v] {
                layer.buckets[d as usize].remove(&v);
                layer.buckets[(d - by) as usize].insert(v);
                layer.min_cursor = layer.min_cursor.min((d - by) as usize);
            }
            moves += 1;
        };
        match &self.source {
            Source::Snapshots(snapshots) => {
                for (layer, s) in self.layers.iter_mut().zip(snapshots) {
                    if selectable {
                        layer.buckets[layer.degree[u] as usize].remove(&u);
                    }
                    for &v in s.neighbors(u) {
                        apply(layer, v, 1);
                    }
                }
            }
            Source::Average(avg) => {
                let layer = &mut self.layers[0];
                if selectable {
                    layer.buckets[layer.degree[u] as usize].remove(&u);
                }
                for &(v, c) in avg.neighbors(u) {
                    apply(layer, v, u64::from(c));
                }
            }
        }
        self.moves += moves;
    }

    /// Removes and returns the minimum-score node.
    pub fn pop_min(&mut self) -> Option<(NodeId, u64)> {
        let (u, score) = self.peek_min()?;
        self.remove(u);
        Some((u, score))
    }
}

/// Removes and returns the node with the smallest minimum degree across
/// snapshots (smallest id on ties).
pub fn peel_step_min(buckets: &mut DegreeBuckets<'_>) -> Result<NodeId> {
    if buckets.basis() != BucketBasis::Snapshots {
        return Err(BffError::domain("peel_step_min needs per-snapshot buckets"));
    }
    buckets.pop_min().map(|(u, _)| u).ok_or(BffError::EmptySet)
}

/// Removes and returns the node with the smallest weighted degree in the
/// average graph (smallest id on ties).
pub fn peel_step_avg(buckets: &mut DegreeBuckets<'_>) -> Result<NodeId> {
    if buckets.basis() != BucketBasis::AverageGraph {
        return Err(BffError::domain("peel_step_avg needs average-graph buckets"));
    }
    buckets.pop_min().map(|(u, _)| u).ok_or(BffError::EmptySet)
}
