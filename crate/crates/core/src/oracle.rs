//! Exhaustive oracles for BFF and O²BFF at desk scale, and the DCS baseline.

use rayon::prelude::*;

use crate::density::{aggregate_fraction, AggregateKind, Frac, InducedStats};
use crate::error::{BffError, Result};
use crate::graph_model::{GraphHistory, HistoryView, NodeId};
use crate::o2bff::{O2Solution, O2Solver, SnapshotSubset};
use crate::peeling::{run_peel, Scorer};
use crate::scalar::Scalar;
use crate::Rational;

/// Limits on exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_nodes: usize,
    /// Largest number of snapshot subsets `C(tau, k)` to enumerate.
    pub max_snapshot_choose: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_nodes: 20,
            max_snapshot_choose: 1 << 20,
        }
    }
}

// Hard limit from the u64 bitmask representation.
const MASK_BITS: usize = 63;

/// Optimal node set found by exhaustive search.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution<S> {
    pub nodes: Vec<NodeId>,
    pub score: S,
    pub kind: AggregateKind,
    /// Number of non-empty subsets evaluated.
    pub evaluated: u64,
}

struct BitHistory {
    // adjacency[t][u]: neighbor mask of u in snapshot t
    adjacency: Vec<Vec<u64>>,
}

impl BitHistory {
    fn new(view: &HistoryView<'_>) -> Self {
        let adjacency = view
            .snapshots()
            .iter()
            .map(|s| {
                (0..view.n())
                    .map(|u| s.neighbors(u).iter().fold(0u64, |m, &v| m | 1 << v))
                    .collect()
            })
            .collect();
        BitHistory { adjacency }
    }

    fn stats(&self, t: usize, set: u64) -> InducedStats {
        let adj = &self.adjacency[t];
        let mut twice = 0u64;
        let mut min_degree = u64::MAX;
        let mut rest = set;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = u64::from((adj[u] & set).count_ones());
            twice += d;
            min_degree = min_degree.min(d);
        }
        InducedStats {
            edges: twice / 2,
            min_degree,
        }
    }
}

// Whether the sorted node list of `a` precedes that of `b`.
fn lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let d = (a ^ b).trailing_zeros();
    let above = !((1u64 << d) | ((1u64 << d) - 1));
    if a >> d & 1 == 1 {
        b & above != 0
    } else {
        a & above == 0
    }
}

fn mask_nodes(mask: u64) -> Vec<NodeId> {
    (0..64).filter(|&u| mask >> u & 1 == 1).collect()
}

// Better of two (value, node mask, tie key) candidates.
fn better(a: (Frac, u64, usize), b: (Frac, u64, usize)) -> (Frac, u64, usize) {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if lex_less(a.1, b.1) || (a.1 == b.1 && a.2 <= b.2) {
                a
            } else {
                b
            }
        }
    }
}

fn check_nodes(n: usize, budget: &OracleBudget) -> Result<()> {
    if n == 0 {
        return Err(BffError::EmptySet);
    }
    if n > budget.max_nodes.min(MASK_BITS) {
        return Err(BffError::Budget(format!(
            "{n} nodes exceeds the oracle limit of {}",
            budget.max_nodes.min(MASK_BITS)
        )));
    }
    Ok(())
}

/// The exact BFF optimum by enumeration of all non-empty node subsets.
/// Ties go to the lexicographically smallest sorted node list.
pub fn brute_force_bff<'a, S: Scalar>(
    history: impl Into<HistoryView<'a>>,
    kind: AggregateKind,
    budget: &OracleBudget,
) -> Result<ExactSolution<S>> {
    let view = history.into();
    if view.tau() == 0 {
        return Err(BffError::EmptyHistory);
    }
    check_nodes(view.n(), budget)?;
    let bits = BitHistory::new(&view);
    let total = 1u64 << view.n();
    let (value, mask, _) = (1..total)
        .into_par_iter()
        .map(|set| {
            let size = set.count_ones() as usize;
            let value = Frac::new(aggregate_fraction(kind, size, (0..view.tau()).map(|t| bits.stats(t, set))));
            (value, set, 0)
        })
        .reduce_with(better)
        .expect("at least one subset");
    Ok(ExactSolution {
        nodes: mask_nodes(mask),
        score: value.to_scalar(),
        kind,
        evaluated: total - 1,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * u128::from(n - i) / u128::from(i + 1);
        if c > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    c as u64
}

// All k-subsets of 0..tau in lexicographic order.
fn combinations(tau: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < tau - k + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// The exact O²BFF optimum over all node subsets and all `k`-subsets of
/// snapshots. Ties go to the lexicographically smallest node list, then to
/// the earliest snapshot subset.
pub fn brute_force_o2bff<S: Scalar>(
    history: &GraphHistory,
    kind: AggregateKind,
    k: usize,
    budget: &OracleBudget,
) -> Result<O2Solution<S>> {
    check_nodes(history.n(), budget)?;
    let tau = history.tau();
    if k == 0 || k > tau {
        return Err(BffError::domain(format!("k = {k} must lie in [1, {tau}]")));
    }
    let choose = binomial(tau as u64, k as u64);
    if choose > budget.max_snapshot_choose {
        return Err(BffError::Budget(format!(
            "C({tau}, {k}) = {choose} snapshot subsets exceeds the limit of {}",
            budget.max_snapshot_choose
        )));
    }
    let combos = combinations(tau, k);
    let bits = BitHistory::new(&history.view());
    let (value, mask, combo) = (1..1u64 << history.n())
        .into_par_iter()
        .map(|set| {
            let size = set.count_ones() as usize;
            let stats: Vec<InducedStats> = (0..tau).map(|t| bits.stats(t, set)).collect();
            combos
                .iter()
                .enumerate()
                .map(|(c, combo)| {
                    let value = Frac::new(aggregate_fraction(kind, size, combo.iter().map(|&t| stats[t])));
                    (value, set, c)
                })
                .reduce(better)
                .expect("at least one combination")
        })
        .reduce_with(better)
        .expect("at least one subset");
    Ok(O2Solution {
        nodes: mask_nodes(mask),
        snapshots: SnapshotSubset::new(combos[combo].clone(), tau)?,
        score: value.to_scalar(),
        kind,
        solver: O2Solver::Exhaustive,
        iterations: 0,
        fallback_used: false,
        trace: Vec::new(),
    })
}

/// Greedy densest subgraph (average degree) of snapshot `t` restricted to
/// the `active` nodes: repeatedly drop a minimum-degree node and keep the
/// densest intermediate set.
pub fn greedy_densest_subgraph(
    history: &GraphHistory,
    t: usize,
    active: Option<&[bool]>,
) -> Result<(Vec<NodeId>, Rational)> {
    let view = history.select(&[t])?;
    let trace = run_peel(&view, AggregateKind::AA, Scorer::MinDegree, active, None, |_| false)?;
    Ok((trace.best_set(), trace.best.to_scalar()))
}

/// Options for [`dcs_baseline`].
#[derive(Clone, Copy, Debug, Default)]
pub struct DcsOptions {
    /// Keep a snapshot's dense subgraph from the previous step when the
    /// removed node was not part of it, instead of recomputing. Faster, but
    /// may differ from the recomputing run.
    pub reuse_unaffected: bool,
}

/// Output of [`dcs_baseline`], scored under `f_ma`.
#[derive(Clone, Debug, PartialEq)]
pub struct DcsSolution<S> {
    pub nodes: Vec<NodeId>,
    pub score: S,
    pub removal_order: Vec<NodeId>,
    /// Snapshot whose dense subgraph supplied each removed node.
    pub chosen_snapshots: Vec<usize>,
    pub peel_index: usize,
}

/// The DCS baseline: at each step, find the greedy densest subgraph of every
/// snapshot of the residual graph, take the snapshot where it is sparsest
/// and remove the minimum-degree residual node of that snapshot. Returns the
/// residual set with the largest `f_ma`.
pub fn dcs_baseline<S: Scalar>(history: &GraphHistory, options: &DcsOptions) -> Result<DcsSolution<S>> {
    let n = history.n();
    if n == 0 {
        return Err(BffError::EmptySet);
    }
    let kind = AggregateKind::MA;
    let mut alive = vec![true; n];
    let mut size = n;
    let objective = |alive: &[bool], size: usize| {
        let nodes: Vec<NodeId> = (0..n).filter(|&u| alive[u]).collect();
        Frac::new(aggregate_fraction(
            kind,
            size,
            history
                .snapshots()
                .iter()
                .map(|s| crate::density::induced_stats(s, &nodes, alive)),
        ))
    };
    let mut best = objective(&alive, size);
    let mut best_index = 0;
    let mut order = Vec::new();
    let mut chosen = Vec::new();
    let mut dense: Vec<Option<(Vec<NodeId>, Rational)>> = vec![None; history.tau()];
    while size > 1 {
        let removed = order.last().copied();
        let refreshed: Vec<(Vec<NodeId>, Rational)> = (0..history.tau())
            .into_par_iter()
            .map(|t| match (&dense[t], removed) {
                (Some((set, d)), Some(v)) if options.reuse_unaffected && set.binary_search(&v).is_err() => {
                    Ok((set.clone(), *d))
                }
                _ => greedy_densest_subgraph(history, t, Some(&alive)),
            })
            .collect::<Result<_>>()?;
        let t = (0..refreshed.len())
            .min_by(|&a, &b| refreshed[a].1.cmp(&refreshed[b].1).then(a.cmp(&b)))
            .expect("tau >= 1");
        let snapshot = history.snapshot(t);
        let v = (0..n)
            .filter(|&u| alive[u])
            .min_by_key(|&u| (snapshot.neighbors(u).iter().filter(|&&w| alive[w]).count(), u))
            .expect("residual set is non-empty");
        alive[v] = false;
        size -= 1;
        order.push(v);
        chosen.push(t);
        dense = refreshed.into_iter().map(Some).collect();
        let value = objective(&alive, size);
        if value > best {
            best = value;
            best_index = order.len();
        }
    }
    let mut removed = vec![false; n];
    for &u in &order[..best_index] {
        removed[u] = true;
    }
    Ok(DcsSolution {
        nodes: (0..n).filter(|&u| !removed[u]).collect(),
        score: best.to_scalar(),
        removal_order: order,
        chosen_snapshots: chosen,
        peel_index: best_index,
    })
}
