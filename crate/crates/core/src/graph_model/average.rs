use num_rational::Ratio;

use super::{HistoryView, NodeId};

/// Weighted graph whose edge weights are the fraction of snapshots that
/// contain the edge.
///
/// Weights are stored as integer counts over the common denominator `tau`,
/// so every weighted degree is `count_sum / tau` exactly. Pairs that appear
/// in no snapshot are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageGraph {
    n: usize,
    tau: usize,
    adjacency: Vec<Vec<(NodeId, u32)>>,
}

impl AverageGraph {
    pub fn build<'a>(history: impl Into<HistoryView<'a>>) -> Self {
        let view = history.into();
        let n = view.n();
        let mut adjacency = Vec::with_capacity(n);
        let mut merged: Vec<NodeId> = Vec::new();
        for u in 0..n {
            merged.clear();
            for s in view.snapshots() {
                merged.extend_from_slice(s.neighbors(u));
            }
            merged.sort_unstable();
            let mut row: Vec<(NodeId, u32)> = Vec::new();
            for &v in &merged {
                match row.last_mut() {
                    Some((w, c)) if *w == v => *c += 1,
                    _ => row.push((v, 1)),
                }
            }
            adjacency.push(row);
        }
        AverageGraph {
            n,
            tau: view.tau(),
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The common weight denominator.
    pub fn tau(&self) -> usize {
        self.tau
    }

    /// `(neighbor, count)` pairs of `u`, sorted by neighbor; the weight is
    /// `count / tau`.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, u32)] {
        &self.adjacency[u]
    }

    /// Number of snapshots containing `(u, v)`.
    pub fn count(&self, u: NodeId, v: NodeId) -> u32 {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.adjacency[u][i].1)
            .unwrap_or(0)
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Ratio<i64> {
        Ratio::new(i64::from(self.count(u, v)), self.tau as i64)
    }

    /// Weighted degree scaled by `tau`; always an integer.
    pub fn scaled_degree(&self, u: NodeId) -> u64 {
        self.adjacency[u].iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn weighted_degree(&self, u: NodeId) -> Ratio<i64> {
        Ratio::new(self.scaled_degree(u) as i64, self.tau as i64)
    }

    /// Number of stored (positive-weight) edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

impl<'a> From<&'a AverageGraph> for std::borrow::Cow<'a, AverageGraph> {
    fn from(avg: &'a AverageGraph) -> Self {
        std::borrow::Cow::Borrowed(avg)
    }
}

impl From<AverageGraph> for std::borrow::Cow<'_, AverageGraph> {
    fn from(avg: AverageGraph) -> Self {
        std::borrow::Cow::Owned(avg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GraphHistory;

    #[test]
    fn weights_are_snapshot_fractions() {
        // (0,1) in 2 of 4 snapshots, (1,2) in all, (0,2) in 1.
        let h = GraphHistory::from_edge_lists(
            3,
            vec![
                vec![(0, 1), (1, 2)],
                vec![(0, 1), (1, 2), (0, 2)],
                vec![(1, 2)],
                vec![(2, 1)],
            ],
        )
        .unwrap();
        let avg = AverageGraph::build(&h);
        assert_eq!(avg.weight(0, 1), Ratio::new(2, 4));
        assert_eq!(avg.weight(1, 2), Ratio::from_integer(1));
        assert_eq!(avg.weight(0, 2), Ratio::new(1, 4));
        assert_eq!(avg.weight(0, 0), Ratio::from_integer(0));
        // 1/2 + 1/4
        assert_eq!(avg.weighted_degree(0), Ratio::new(3, 4));
        assert_eq!(avg.scaled_degree(0), 3);
        assert_eq!(avg.edge_count(), 3);
    }

    #[test]
    fn degree_is_time_average_of_degrees() {
        let h = GraphHistory::from_edge_lists(
            4,
            vec![vec![(0, 1), (2, 3)], vec![(0, 2), (0, 3), (1, 2)], vec![]],
        )
        .unwrap();
        let avg = AverageGraph::build(&h);
        for u in 0..4 {
            let total: usize = h.snapshots().iter().map(|s| s.degree(u)).sum();
            assert_eq!(avg.weighted_degree(u), Ratio::new(total as i64, 3));
        }
    }
}
