//! Greedy peeling for the best friends forever (BFF) problem.
//!
//! Starting from the whole node set, one node is removed per step until a
//! single node remains; the solution is the intermediate set with the
//! largest aggregate density. Which node goes is decided by a [`Scorer`].

mod buckets;
mod query;
mod residual;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use buckets::{peel_step_avg, peel_step_min, BucketBasis, DegreeBuckets};
pub use query::{find_bff_query, restrict_to_component};
pub use residual::{peel_step_greedy, ResidualHistory};

use crate::density::{AggregateKind, Aggregator, Frac};
use crate::error::{BffError, Result};
use crate::graph_model::{AverageGraph, HistoryView, NodeId};
use crate::scalar::Scalar;

/// Node-selection rule for one peeling step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scorer {
    /// Remove the node with the smallest degree in any snapshot.
    MinDegree,
    /// Remove the node with the smallest weighted degree in the average graph.
    AvgDegree,
    /// Remove the node whose removal leaves the largest objective for the
    /// given aggregate. Quadratic; meant for small inputs and comparisons.
    Greedy(AggregateKind),
}

impl Scorer {
    /// The scorer matching the temporal aggregator of `kind`: min-degree for
    /// `mm` and `ma`, average-degree for `am` and `aa`. For `mm` and `aa`
    /// this is the pairing with an approximation guarantee.
    pub fn default_for(kind: AggregateKind) -> Scorer {
        match kind.aggregator() {
            Aggregator::Min => Scorer::MinDegree,
            Aggregator::Avg => Scorer::AvgDegree,
        }
    }

    /// Whether this scorer is proven to be good for `kind`.
    pub fn has_guarantee(self, kind: AggregateKind) -> bool {
        matches!(
            (self, kind),
            (Scorer::MinDegree, AggregateKind::MM) | (Scorer::AvgDegree, AggregateKind::AA)
        )
    }
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scorer::MinDegree => f.write_str("min"),
            Scorer::AvgDegree => f.write_str("avg"),
            Scorer::Greedy(k) => write!(f, "greedy-{k}"),
        }
    }
}

impl FromStr for Scorer {
    type Err = BffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "min-degree" | "m" => Ok(Scorer::MinDegree),
            "avg" | "avg-degree" | "a" => Ok(Scorer::AvgDegree),
            other => match other.strip_prefix("greedy-").or_else(|| other.strip_prefix("greedy:")) {
                Some(k) => Ok(Scorer::Greedy(k.parse()?)),
                None => Err(BffError::domain(format!("unknown scorer `{s}`"))),
            },
        }
    }
}

/// Result of a peeling run.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<S> {
    /// Sorted node ids of the returned set.
    pub nodes: Vec<NodeId>,
    pub score: S,
    pub kind: AggregateKind,
    pub scorer: Scorer,
    /// Number of removals before the returned set.
    pub peel_index: usize,
    /// Nodes in the order they were removed.
    pub removal_order: Vec<NodeId>,
    /// The whole input had objective zero (e.g. no edges at all).
    pub degenerate: bool,
}

impl<S: Scalar> Solution<S> {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// The same solution with its score converted to another scalar.
    pub fn map_score<T: Scalar>(self, convert: impl FnOnce(S) -> T) -> Solution<T> {
        Solution {
            nodes: self.nodes,
            score: convert(self.score),
            kind: self.kind,
            scorer: self.scorer,
            peel_index: self.peel_index,
            removal_order: self.removal_order,
            degenerate: self.degenerate,
        }
    }
}

enum Selector<'a> {
    Buckets(DegreeBuckets<'a>),
    Greedy(AggregateKind),
}

impl<'a> Selector<'a> {
    fn new(
        view: &HistoryView<'a>,
        scorer: Scorer,
        active: Option<&[bool]>,
        selectable: Option<&[bool]>,
    ) -> Self {
        match scorer {
            Scorer::MinDegree => {
                Selector::Buckets(DegreeBuckets::for_snapshots_within(view, active, selectable))
            }
            Scorer::AvgDegree => {
                let avg: Cow<'a, AverageGraph> = Cow::Owned(AverageGraph::build(view));
                Selector::Buckets(DegreeBuckets::for_average_graph_within(avg, active, selectable))
            }
            Scorer::Greedy(k) => Selector::Greedy(k),
        }
    }

    fn choose(&mut self, residual: &mut ResidualHistory<'_>) -> Option<NodeId> {
        match self {
            Selector::Buckets(b) => b.peek_min().map(|(u, _)| u),
            Selector::Greedy(k) => residual.greedy_choice(*k).ok(),
        }
    }

    fn remove(&mut self, u: NodeId) {
        if let Selector::Buckets(b) = self {
            b.remove(u);
        }
    }
}

pub(crate) struct PeelTrace {
    pub initial: Vec<NodeId>,
    pub order: Vec<NodeId>,
    pub best_index: usize,
    pub best: Frac,
}

impl PeelTrace {
    pub fn best_set(&self) -> Vec<NodeId> {
        let mut removed = vec![false; self.initial.iter().max().map_or(0, |&m| m + 1)];
        for &u in &self.order[..self.best_index] {
            removed[u] = true;
        }
        self.initial.iter().copied().filter(|&u| !removed[u]).collect()
    }

    pub fn into_solution<S: Scalar>(self, kind: AggregateKind, scorer: Scorer) -> Solution<S> {
        Solution {
            nodes: self.best_set(),
            score: self.best.to_scalar(),
            kind,
            scorer,
            peel_index: self.best_index,
            degenerate: self.best.num == 0,
            removal_order: self.order,
        }
    }
}

/// Runs a peel from the `active` nodes. `stop` is consulted with each chosen
/// node before it is removed; returning true ends the run. Nodes that are not
/// `selectable` are never chosen (bucket scorers only).
pub(crate) fn run_peel(
    view: &HistoryView<'_>,
    kind: AggregateKind,
    scorer: Scorer,
    active: Option<&[bool]>,
    selectable: Option<&[bool]>,
    mut stop: impl FnMut(NodeId) -> bool,
) -> Result<PeelTrace> {
    if view.tau() == 0 {
        return Err(BffError::EmptyHistory);
    }
    let mut residual = ResidualHistory::within(view, active);
    if residual.size() == 0 {
        return Err(BffError::EmptySet);
    }
    let mut selector = Selector::new(view, scorer, active, selectable);
    let initial = residual.alive_nodes();
    let mut best = residual.objective(kind).expect("non-empty");
    let mut best_index = 0;
    let mut order = Vec::with_capacity(initial.len());
    while residual.size() > 1 {
        let Some(u) = selector.choose(&mut residual) else {
            break;
        };
        if stop(u) {
            break;
        }
        selector.remove(u);
        residual.remove(u);
        order.push(u);
        let value = residual.objective(kind).expect("non-empty");
        if value > best {
            best = value;
            best_index = order.len();
        }
    }
    Ok(PeelTrace {
        initial,
        order,
        best_index,
        best,
    })
}

/// Peels the whole history and returns the best intermediate set.
pub fn find_bff<'a, S: Scalar>(
    history: impl Into<HistoryView<'a>>,
    kind: AggregateKind,
    scorer: Scorer,
) -> Result<Solution<S>> {
    let view = history.into();
    if view.n() == 0 {
        return Err(BffError::EmptySet);
    }
    Ok(run_peel(&view, kind, scorer, None, None, |_| false)?.into_solution(kind, scorer))
}

/// Peels starting from the `active` nodes only.
pub fn find_bff_within<'a, S: Scalar>(
    history: impl Into<HistoryView<'a>>,
    kind: AggregateKind,
    scorer: Scorer,
    active: &[bool],
) -> Result<Solution<S>> {
    let view = history.into();
    if active.len() != view.n() {
        return Err(BffError::domain("active mask length differs from node count"));
    }
    Ok(run_peel(&view, kind, scorer, Some(active), None, |_| false)?.into_solution(kind, scorer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::aggregate_density;
    use crate::{GraphHistory, Rational};

    #[test]
    fn clique_plus_path_returns_clique() {
        let mut e: Vec<(usize, usize)> = vec![];
        for i in 0..4 {
            for j in i + 1..4 {
                e.push((i, j));
            }
        }
        e.extend([(3, 4), (4, 5), (5, 6)]);
        let h = GraphHistory::from_edge_lists(7, vec![e.clone(), e]).unwrap();
        for (kind, scorer) in [
            (AggregateKind::MM, Scorer::MinDegree),
            (AggregateKind::AA, Scorer::AvgDegree),
            (AggregateKind::MA, Scorer::Greedy(AggregateKind::MA)),
        ] {
            let s: Solution<Rational> = find_bff(&h, kind, scorer).unwrap();
            assert_eq!(s.nodes, vec![0, 1, 2, 3], "{kind} {scorer}");
            let direct: Rational = aggregate_density(kind, &s.nodes, &h).unwrap();
            assert_eq!(s.score, direct);
        }
    }

    #[test]
    fn edgeless_history_is_degenerate() {
        let h = GraphHistory::from_edge_lists(3, vec![vec![], vec![]]).unwrap();
        let s: Solution<Rational> = find_bff(&h, AggregateKind::AA, Scorer::AvgDegree).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.nodes, vec![0, 1, 2]);
        assert_eq!(s.score, Rational::from_integer(0));
    }

    #[test]
    fn single_node_history() {
        let h = GraphHistory::from_edge_lists(1, vec![vec![]]).unwrap();
        let s: Solution<f64> = find_bff(&h, AggregateKind::MM, Scorer::MinDegree).unwrap();
        assert_eq!(s.nodes, vec![0]);
        assert!(s.removal_order.is_empty());
    }

    #[test]
    fn removal_order_covers_all_but_one() {
        let h = GraphHistory::from_edge_lists(5, vec![vec![(0, 1), (2, 3)], vec![(1, 2), (3, 4)]]).unwrap();
        let s: Solution<Rational> = find_bff(&h, AggregateKind::AM, Scorer::MinDegree).unwrap();
        assert_eq!(s.removal_order.len(), 4);
    }

    #[test]
    fn scorer_parsing() {
        assert_eq!("min".parse::<Scorer>().unwrap(), Scorer::MinDegree);
        assert_eq!("avg".parse::<Scorer>().unwrap(), Scorer::AvgDegree);
        assert_eq!(
            "greedy-am".parse::<Scorer>().unwrap(),
            Scorer::Greedy(AggregateKind::AM)
        );
        assert!("median".parse::<Scorer>().is_err());
        assert_eq!(Scorer::Greedy(AggregateKind::MA).to_string(), "greedy-ma");
    }
}
