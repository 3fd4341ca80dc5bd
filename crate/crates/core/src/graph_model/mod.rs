//! Graph histories, snapshots and the average graph.

mod average;
mod edge_list;

use std::borrow::Cow;
use std::collections::HashMap;

pub use average::AverageGraph;
pub use edge_list::{canonical_form, load_history, parse_history, write_history, CanonicalHistory};

use crate::error::{BffError, Result};

/// Dense index into the node universe, `0 <= id < n`.
pub type NodeId = usize;

/// One undirected simple graph over the shared node universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Snapshot {
    /// An edgeless snapshot on `n` nodes.
    pub fn empty(n: usize) -> Self {
        Snapshot {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a snapshot from an edge list. Self-loops are dropped and
    /// duplicate (or reversed) edges collapse to one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(BffError::NodeOutOfRange { id, n });
                }
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        let mut degree_sum = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            degree_sum += list.len();
        }
        Ok(Snapshot {
            adjacency,
            edge_count: degree_sum / 2,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Each edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A sequence of `tau >= 1` snapshots over nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphHistory {
    n: usize,
    snapshots: Vec<Snapshot>,
    labels: Option<Vec<String>>,
}

impl GraphHistory {
    pub fn new(n: usize, snapshots: Vec<Snapshot>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(BffError::EmptyHistory);
        }
        if let Some(bad) = snapshots.iter().find(|s| s.node_count() != n) {
            return Err(BffError::domain(format!(
                "snapshot has {} nodes, history universe has {n}",
                bad.node_count()
            )));
        }
        Ok(GraphHistory {
            n,
            snapshots,
            labels: None,
        })
    }

    /// One edge list per snapshot.
    pub fn from_edge_lists(n: usize, edge_lists: Vec<Vec<(NodeId, NodeId)>>) -> Result<Self> {
        let snapshots = edge_lists
            .into_iter()
            .map(|edges| Snapshot::from_edges(n, edges))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, snapshots)
    }

    /// Attaches external labels, one per node.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(BffError::domain(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> &Snapshot {
        &self.snapshots[t]
    }

    /// `M`, the edge count summed over snapshots.
    pub fn total_edges(&self) -> usize {
        self.snapshots.iter().map(Snapshot::edge_count).sum()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The external label of `u`, or its decimal id when unlabeled.
    pub fn label(&self, u: NodeId) -> Cow<'_, str> {
        match &self.labels {
            Some(labels) => Cow::Borrowed(labels[u].as_str()),
            None => Cow::Owned(u.to_string()),
        }
    }

    /// Resolves external labels to node ids.
    pub fn resolve_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<NodeId>> {
        let index: HashMap<Cow<'_, str>, NodeId> = (0..self.n).map(|u| (self.label(u), u)).collect();
        labels
            .iter()
            .map(|l| {
                index
                    .get(l.as_ref())
                    .copied()
                    .ok_or_else(|| BffError::domain(format!("unknown node label `{}`", l.as_ref())))
            })
            .collect()
    }

    /// Borrowed view over every snapshot.
    pub fn view(&self) -> HistoryView<'_> {
        HistoryView {
            n: self.n,
            snapshots: self.snapshots.iter().collect(),
            indices: (0..self.tau()).collect(),
        }
    }

    /// Borrowed view over the snapshots at `indices` (in the given order).
    pub fn select(&self, indices: &[usize]) -> Result<HistoryView<'_>> {
        if indices.is_empty() {
            return Err(BffError::EmptyHistory);
        }
        if let Some(&bad) = indices.iter().find(|&&t| t >= self.tau()) {
            return Err(BffError::domain(format!(
                "snapshot index {bad} out of range for tau = {}",
                self.tau()
            )));
        }
        Ok(HistoryView {
            n: self.n,
            snapshots: indices.iter().map(|&t| &self.snapshots[t]).collect(),
            indices: indices.to_vec(),
        })
    }

    /// The history restricted to `nodes`, with ids remapped to
    /// `0..nodes.len()` in ascending order of original id.
    pub fn induced_subhistory(&self, nodes: &[NodeId]) -> Result<SubHistory> {
        let mapping = normalize_node_set(nodes, self.n)?;
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in mapping.iter().enumerate() {
            local[u] = i;
        }
        let snapshots = self
            .snapshots
            .iter()
            .map(|s| {
                let edges = s
                    .edges()
                    .filter(|&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
                    .map(|(u, v)| (local[u], local[v]));
                Snapshot::from_edges(mapping.len(), edges)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut history = GraphHistory::new(mapping.len(), snapshots)?;
        history.labels = Some(mapping.iter().map(|&u| self.label(u).into_owned()).collect());
        Ok(SubHistory { history, mapping })
    }
}

/// A history restricted to a node subset, with the id mapping back to the
/// parent history.
#[derive(Clone, Debug)]
pub struct SubHistory {
    pub history: GraphHistory,
    /// `mapping[local] = original`, ascending.
    pub mapping: Vec<NodeId>,
}

impl SubHistory {
    pub fn to_original(&self, local: &[NodeId]) -> Vec<NodeId> {
        local.iter().map(|&u| self.mapping[u]).collect()
    }

    pub fn to_local(&self, original: NodeId) -> Option<NodeId> {
        self.mapping.binary_search(&original).ok()
    }
}

/// Borrowed selection of snapshots from one history. Solvers run on views so
/// that snapshot subsets never need copying.
#[derive(Clone, Debug)]
pub struct HistoryView<'a> {
    n: usize,
    snapshots: Vec<&'a Snapshot>,
    indices: Vec<usize>,
}

impl<'a> HistoryView<'a> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshot(&self, i: usize) -> &'a Snapshot {
        self.snapshots[i]
    }

    pub fn snapshots(&self) -> &[&'a Snapshot] {
        &self.snapshots
    }

    /// Index of each viewed snapshot in the parent history.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn total_edges(&self) -> usize {
        self.snapshots.iter().map(|s| s.edge_count()).sum()
    }
}

impl<'a> From<&'a GraphHistory> for HistoryView<'a> {
    fn from(history: &'a GraphHistory) -> Self {
        history.view()
    }
}

impl<'a> From<&HistoryView<'a>> for HistoryView<'a> {
    fn from(view: &HistoryView<'a>) -> Self {
        view.clone()
    }
}

/// Sorts and deduplicates `nodes`, rejecting empty sets and ids `>= n`.
pub fn normalize_node_set(nodes: &[NodeId], n: usize) -> Result<Vec<NodeId>> {
    if nodes.is_empty() {
        return Err(BffError::EmptySet);
    }
    if let Some(&id) = nodes.iter().find(|&&u| u >= n) {
        return Err(BffError::NodeOutOfRange { id, n });
    }
    let mut set = nodes.to_vec();
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

/// Membership mask of a validated, non-empty node set.
pub fn membership_mask(nodes: &[NodeId], n: usize) -> Result<Vec<bool>> {
    if nodes.is_empty() {
        return Err(BffError::EmptySet);
    }
    let mut mask = vec![false; n];
    for &u in nodes {
        if u >= n {
            return Err(BffError::NodeOutOfRange { id: u, n });
        }
        mask[u] = true;
    }
    Ok(mask)
}
