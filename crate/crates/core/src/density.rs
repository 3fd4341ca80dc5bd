//! Per-snapshot densities and their temporal aggregates.
//!
//! `d_a(S, G) = 2|E(S)| / |S|` and `d_m(S, G) = min degree in G[S]`. A
//! temporal aggregator (minimum or mean over snapshots) combined with one of
//! the two densities gives the four aggregate densities `f_mm`, `f_ma`,
//! `f_am` and `f_aa` (aggregator first).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BffError, Result};
use crate::graph_model::{membership_mask, AverageGraph, HistoryView, NodeId, Snapshot};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityKind {
    /// Average degree, `2|E| / |V|`.
    AvgDegree,
    /// Minimum degree.
    MinDegree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Aggregator {
    Min,
    Avg,
}

/// Aggregate density `g ∘ d`, named aggregator first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateKind {
    MM,
    MA,
    AM,
    AA,
}

impl AggregateKind {
    pub const ALL: [AggregateKind; 4] = [AggregateKind::MM, AggregateKind::MA, AggregateKind::AM, AggregateKind::AA];

    pub fn aggregator(self) -> Aggregator {
        match self {
            AggregateKind::MM | AggregateKind::MA => Aggregator::Min,
            AggregateKind::AM | AggregateKind::AA => Aggregator::Avg,
        }
    }

    /// The per-snapshot density being aggregated.
    pub fn density(self) -> DensityKind {
        match self {
            AggregateKind::MM | AggregateKind::AM => DensityKind::MinDegree,
            AggregateKind::MA | AggregateKind::AA => DensityKind::AvgDegree,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AggregateKind::MM => "mm",
            AggregateKind::MA => "ma",
            AggregateKind::AM => "am",
            AggregateKind::AA => "aa",
        }
    }
}

impl fmt::Display for AggregateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AggregateKind {
    type Err = BffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mm" => Ok(AggregateKind::MM),
            "ma" => Ok(AggregateKind::MA),
            "am" => Ok(AggregateKind::AM),
            "aa" => Ok(AggregateKind::AA),
            other => Err(BffError::domain(format!("unknown density `{other}` (expected mm, ma, am or aa)"))),
        }
    }
}

/// Edge count and minimum degree of `G[S]` for one snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct InducedStats {
    pub edges: u64,
    pub min_degree: u64,
}

pub(crate) fn induced_stats(snapshot: &Snapshot, nodes: &[NodeId], mask: &[bool]) -> InducedStats {
    let mut twice_edges = 0u64;
    let mut min_degree = u64::MAX;
    for &u in nodes {
        let d = snapshot.neighbors(u).iter().filter(|&&v| mask[v]).count() as u64;
        twice_edges += d;
        min_degree = min_degree.min(d);
    }
    InducedStats {
        edges: twice_edges / 2,
        min_degree,
    }
}

/// `f` as an unreduced `(numerator, denominator)` pair from per-snapshot
/// induced statistics of a set of `size` nodes.
pub(crate) fn aggregate_fraction<I>(kind: AggregateKind, size: usize, stats: I) -> (i64, i64)
where
    I: IntoIterator<Item = InducedStats>,
{
    let mut tau = 0i64;
    let mut min_edges = u64::MAX;
    let mut sum_edges = 0u64;
    let mut min_min = u64::MAX;
    let mut sum_min = 0u64;
    for s in stats {
        tau += 1;
        min_edges = min_edges.min(s.edges);
        sum_edges += s.edges;
        min_min = min_min.min(s.min_degree);
        sum_min += s.min_degree;
    }
    debug_assert!(tau > 0 && size > 0);
    let size = size as i64;
    match kind {
        AggregateKind::MM => (min_min as i64, 1),
        AggregateKind::MA => (2 * min_edges as i64, size),
        AggregateKind::AM => (sum_min as i64, tau),
        AggregateKind::AA => (2 * sum_edges as i64, tau * size),
    }
}

/// Unreduced non-negative fraction with a positive denominator, compared by
/// cross-multiplication.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frac {
    pub num: i64,
    pub den: i64,
}

impl Frac {
    pub fn new((num, den): (i64, i64)) -> Self {
        debug_assert!(den > 0);
        Frac { num, den }
    }

    pub fn to_scalar<S: Scalar>(self) -> S {
        S::from_frac(self.num, self.den)
    }
}

impl PartialEq for Frac {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for Frac {}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (i128::from(self.num) * i128::from(other.den)).cmp(&(i128::from(other.num) * i128::from(self.den)))
    }
}

/// Density of `nodes` in a single snapshot.
pub fn density<S: Scalar>(kind: DensityKind, nodes: &[NodeId], snapshot: &Snapshot) -> Result<S> {
    let set = crate::graph_model::normalize_node_set(nodes, snapshot.node_count())?;
    let mask = membership_mask(&set, snapshot.node_count())?;
    let stats = induced_stats(snapshot, &set, &mask);
    Ok(match kind {
        DensityKind::AvgDegree => S::from_frac(2 * stats.edges as i64, set.len() as i64),
        DensityKind::MinDegree => S::from_frac(stats.min_degree as i64, 1),
    })
}

/// `d(S, G_t)` for every snapshot of the view, in view order.
pub fn density_sequence<'a, S: Scalar>(
    kind: DensityKind,
    nodes: &[NodeId],
    history: impl Into<HistoryView<'a>>,
) -> Result<Vec<S>> {
    let view = history.into();
    view.snapshots().iter().map(|s| density(kind, nodes, s)).collect()
}

/// `f(S, G)` for the given aggregate kind.
pub fn aggregate_density<'a, S: Scalar>(
    kind: AggregateKind,
    nodes: &[NodeId],
    history: impl Into<HistoryView<'a>>,
) -> Result<S> {
    let view = history.into();
    if view.tau() == 0 {
        return Err(BffError::EmptyHistory);
    }
    let set = crate::graph_model::normalize_node_set(nodes, view.n())?;
    let mask = membership_mask(&set, view.n())?;
    let (num, den) = aggregate_fraction(
        kind,
        set.len(),
        view.snapshots().iter().map(|s| induced_stats(s, &set, &mask)),
    );
    Ok(S::from_frac(num, den))
}

/// Average weighted degree of `nodes` in the average graph. Equals
/// `aggregate_density(AA, nodes, history)` for the history it was built from.
pub fn density_on_average_graph<S: Scalar>(nodes: &[NodeId], avg: &AverageGraph) -> Result<S> {
    let set = crate::graph_model::normalize_node_set(nodes, avg.n())?;
    let mask = membership_mask(&set, avg.n())?;
    let mut twice_weight: i64 = 0;
    for &u in &set {
        for &(v, c) in avg.neighbors(u) {
            if mask[v] {
                twice_weight += i64::from(c);
            }
        }
    }
    Ok(S::from_frac(twice_weight, (avg.tau() * set.len()) as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GraphHistory, Rational};

    fn k4() -> Vec<(usize, usize)> {
        vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn k4_densities() {
        let s = Snapshot::from_edges(4, k4()).unwrap();
        let all = [0, 1, 2, 3];
        assert_eq!(density::<Rational>(DensityKind::AvgDegree, &all, &s).unwrap(), r(3, 1));
        assert_eq!(density::<Rational>(DensityKind::MinDegree, &all, &s).unwrap(), r(3, 1));
    }

    #[test]
    fn singleton_has_zero_density() {
        let s = Snapshot::from_edges(4, k4()).unwrap();
        for kind in [DensityKind::AvgDegree, DensityKind::MinDegree] {
            assert_eq!(density::<Rational>(kind, &[2], &s).unwrap(), r(0, 1));
        }
    }

    #[test]
    fn five_nodes_eight_edges() {
        // K4 on {0..3} plus node 4 joined to 0 and 1.
        let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 0), (4, 1)];
        let s = Snapshot::from_edges(5, edges).unwrap();
        let all = [0, 1, 2, 3, 4];
        assert_eq!(density::<Rational>(DensityKind::AvgDegree, &all, &s).unwrap(), r(16, 5));
        assert_eq!(density::<Rational>(DensityKind::MinDegree, &all, &s).unwrap(), r(2, 1));
    }

    #[test]
    fn empty_set_is_an_error() {
        let s = Snapshot::from_edges(4, k4()).unwrap();
        assert!(matches!(density::<Rational>(DensityKind::AvgDegree, &[], &s), Err(BffError::EmptySet)));
    }

    #[test]
    fn constant_clique_history() {
        let h = GraphHistory::from_edge_lists(4, vec![k4(), k4(), k4()]).unwrap();
        for kind in AggregateKind::ALL {
            assert_eq!(aggregate_density::<Rational>(kind, &[0, 1, 2, 3], &h).unwrap(), r(3, 1));
        }
    }

    #[test]
    fn min_degree_sequence_two_two_two_one() {
        // 5-cycle (min degree 2) in three snapshots; in the last one node 4
        // keeps only one edge.
        let cycle = vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let last = vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)];
        let h = GraphHistory::from_edge_lists(5, vec![cycle.clone(), cycle.clone(), cycle, last]).unwrap();
        let all = [0, 1, 2, 3, 4];
        let seq: Vec<Rational> = density_sequence(DensityKind::MinDegree, &all, &h).unwrap();
        assert_eq!(seq, vec![r(2, 1), r(2, 1), r(2, 1), r(1, 1)]);
        assert_eq!(aggregate_density::<Rational>(AggregateKind::MM, &all, &h).unwrap(), r(1, 1));
        assert_eq!(aggregate_density::<Rational>(AggregateKind::AM, &all, &h).unwrap(), r(7, 4));
    }

    #[test]
    fn ma_takes_the_smaller_average() {
        let s1 = k4();
        let s2 = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 0), (4, 1)];
        let h = GraphHistory::from_edge_lists(5, vec![s1, s2]).unwrap();
        // Over {0..3}: d_a = 3 in both. Over all five: 12/5 and 16/5.
        let all = [0, 1, 2, 3, 4];
        let seq: Vec<Rational> = density_sequence(DensityKind::AvgDegree, &all, &h).unwrap();
        assert_eq!(seq, vec![r(12, 5), r(16, 5)]);
        assert_eq!(aggregate_density::<Rational>(AggregateKind::MA, &all, &h).unwrap(), r(12, 5));
    }

    #[test]
    fn average_graph_density() {
        let h = GraphHistory::from_edge_lists(2, vec![vec![(0, 1)], vec![]]).unwrap();
        let avg = AverageGraph::build(&h);
        assert_eq!(density_on_average_graph::<Rational>(&[0, 1], &avg).unwrap(), r(1, 2));
        let k = GraphHistory::from_edge_lists(4, vec![k4(), k4()]).unwrap();
        let avg = AverageGraph::build(&k);
        assert_eq!(density_on_average_graph::<Rational>(&[0, 1, 2, 3], &avg).unwrap(), r(3, 1));
    }

    #[test]
    fn float_instantiation_agrees() {
        let h = GraphHistory::from_edge_lists(4, vec![k4(), vec![(0, 1)]]).unwrap();
        let exact: Rational = aggregate_density(AggregateKind::AA, &[0, 1, 2], &h).unwrap();
        let approx: f64 = aggregate_density(AggregateKind::AA, &[0, 1, 2], &h).unwrap();
        assert_eq!(approx, *exact.numer() as f64 / *exact.denom() as f64);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("MA".parse::<AggregateKind>().unwrap(), AggregateKind::MA);
        assert!("xx".parse::<AggregateKind>().is_err());
        assert_eq!(AggregateKind::AM.aggregator(), Aggregator::Avg);
        assert_eq!(AggregateKind::AM.density(), DensityKind::MinDegree);
    }
}
