//! On-off BFF: choose `k` of the snapshots together with a node set that is
//! dense across them.

use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{induced_stats, AggregateKind, DensityKind, Frac};
use crate::error::{BffError, Result};
use crate::graph_model::{membership_mask, normalize_node_set, GraphHistory, HistoryView, NodeId};
use crate::peeling::{run_peel, Scorer};
use crate::scalar::Scalar;
use crate::Rational;

/// Sorted, duplicate-free snapshot indices of one history.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SnapshotSubset {
    indices: Vec<usize>,
}

impl SnapshotSubset {
    pub fn new(mut indices: Vec<usize>, tau: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(BffError::domain("snapshot subset is empty"));
        }
        if let Some(&t) = indices.iter().find(|&&t| t >= tau) {
            return Err(BffError::domain(format!("snapshot index {t} out of range for {tau} snapshots")));
        }
        Ok(SnapshotSubset { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.indices.binary_search(&t).is_ok()
    }
}

/// Initialization of the iterative solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// `k` snapshots drawn uniformly with the given seed.
    Random(u64),
    /// The best window of `k` consecutive snapshots.
    Contiguous,
    /// Nodes found dense in at least `k` individual snapshots.
    AtLeastK,
}

/// Which solver produced an [`O2Solution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum O2Solver {
    Iterative(InitKind),
    IncDensity,
    IncOverlap,
    /// Exhaustive search.
    Exhaustive,
}

impl fmt::Display for O2Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            O2Solver::Iterative(InitKind::Random(seed)) => write!(f, "itr-r(seed={seed})"),
            O2Solver::Iterative(InitKind::Contiguous) => f.write_str("itr-c"),
            O2Solver::Iterative(InitKind::AtLeastK) => f.write_str("itr-k"),
            O2Solver::IncDensity => f.write_str("inc-d"),
            O2Solver::IncOverlap => f.write_str("inc-o"),
            O2Solver::Exhaustive => f.write_str("oracle"),
        }
    }
}

/// Knobs shared by the O²BFF solvers.
#[derive(Clone, Copy, Debug)]
pub struct O2Options {
    /// Peeling scorer for every inner BFF call; `None` picks
    /// [`Scorer::default_for`] the aggregate kind.
    pub scorer: Option<Scorer>,
    /// Cap on iterative-solver rounds.
    pub max_iters: usize,
    /// Start the incremental-density solver from a random pair drawn with
    /// this seed instead of scanning all pairs.
    pub random_pair_seed: Option<u64>,
}

impl Default for O2Options {
    fn default() -> Self {
        O2Options {
            scorer: None,
            max_iters: 100,
            random_pair_seed: None,
        }
    }
}

impl O2Options {
    fn scorer_for(&self, kind: AggregateKind) -> Scorer {
        self.scorer.unwrap_or_else(|| Scorer::default_for(kind))
    }
}

/// Result of an O²BFF solver.
#[derive(Clone, Debug, PartialEq)]
pub struct O2Solution<S> {
    pub nodes: Vec<NodeId>,
    pub snapshots: SnapshotSubset,
    /// `f(nodes)` over the chosen snapshots.
    pub score: S,
    pub kind: AggregateKind,
    pub solver: O2Solver,
    /// Rounds run by the iterative solver; growth steps for the incremental
    /// ones.
    pub iterations: usize,
    /// The at-least-k initialization came up empty and a random one was used.
    pub fallback_used: bool,
    /// Incumbent score after each round of the iterative solver.
    pub trace: Vec<S>,
}

// A solved BFF instance with the exact objective kept for comparisons.
#[derive(Clone, Debug)]
struct Solved {
    nodes: Vec<NodeId>,
    value: Frac,
}

fn solve(view: &HistoryView<'_>, kind: AggregateKind, scorer: Scorer) -> Result<Solved> {
    let trace = run_peel(view, kind, scorer, None, None, |_| false)?;
    Ok(Solved {
        nodes: trace.best_set(),
        value: trace.best,
    })
}

fn solve_on(history: &GraphHistory, indices: &[usize], kind: AggregateKind, scorer: Scorer) -> Result<Solved> {
    solve(&history.select(indices)?, kind, scorer)
}

fn check_k(history: &GraphHistory, k: usize, min: usize) -> Result<()> {
    if history.n() == 0 {
        return Err(BffError::EmptySet);
    }
    if k < min || k > history.tau() {
        return Err(BffError::domain(format!(
            "k = {k} must lie in [{min}, {}]",
            history.tau()
        )));
    }
    Ok(())
}

fn finish<S: Scalar>(
    solved: Solved,
    snapshots: SnapshotSubset,
    kind: AggregateKind,
    solver: O2Solver,
    iterations: usize,
) -> O2Solution<S> {
    O2Solution {
        nodes: solved.nodes,
        snapshots,
        score: solved.value.to_scalar(),
        kind,
        solver,
        iterations,
        fallback_used: false,
        trace: Vec::new(),
    }
}

/// The `k` snapshots where `nodes` is densest under `density`, smaller index
/// first on ties.
pub fn best_snapshots(
    nodes: &[NodeId],
    history: &GraphHistory,
    k: usize,
    density: DensityKind,
) -> Result<SnapshotSubset> {
    check_k(history, k, 1)?;
    let set = normalize_node_set(nodes, history.n())?;
    let mask = membership_mask(&set, history.n())?;
    let mut scored: Vec<(u64, usize)> = history
        .snapshots()
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let st = induced_stats(s, &set, &mask);
            // |S| is shared by all snapshots, so 2|E| orders d_a.
            let key = match density {
                DensityKind::AvgDegree => 2 * st.edges,
                DensityKind::MinDegree => st.min_degree,
            };
            (key, t)
        })
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    SnapshotSubset::new(scored[..k].iter().map(|&(_, t)| t).collect(), history.tau())
}

/// The window of `k` consecutive snapshots whose BFF solution scores highest,
/// earliest window on ties.
pub fn init_contiguous(
    history: &GraphHistory,
    kind: AggregateKind,
    k: usize,
    options: &O2Options,
) -> Result<(SnapshotSubset, Vec<NodeId>)> {
    check_k(history, k, 1)?;
    let scorer = options.scorer_for(kind);
    let windows: Vec<Solved> = (0..=history.tau() - k)
        .into_par_iter()
        .map(|start| solve_on(history, &(start..start + k).collect::<Vec<_>>(), kind, scorer))
        .collect::<Result<_>>()?;
    let (start, best) = argmax(windows.into_iter().map(|s| (s.value, s))).expect("at least one window");
    Ok((
        SnapshotSubset::new((start..start + k).collect(), history.tau())?,
        best.nodes,
    ))
}

// Index and payload of the first maximum.
fn argmax<T>(items: impl IntoIterator<Item = (Frac, T)>) -> Option<(usize, T)> {
    let mut best: Option<(usize, Frac, T)> = None;
    for (i, (value, item)) in items.into_iter().enumerate() {
        if best.as_ref().is_none_or(|(_, b, _)| value > *b) {
            best = Some((i, value, item));
        }
    }
    best.map(|(i, _, item)| (i, item))
}

// Per-snapshot BFF solutions; a zero-score solution (the whole node set of
// a snapshot with no dense part) is reported as empty.
fn per_snapshot_sets(history: &GraphHistory, kind: AggregateKind, scorer: Scorer) -> Result<Vec<Vec<NodeId>>> {
    (0..history.tau())
        .into_par_iter()
        .map(|t| {
            let s = solve_on(history, &[t], kind, scorer)?;
            Ok(if s.value.num == 0 { Vec::new() } else { s.nodes })
        })
        .collect()
}

/// Nodes that belong to the BFF solution of at least `k` individual
/// snapshots, and the `k` snapshots where they are densest. The node set may
/// be empty, in which case the snapshot subset is `None`.
pub fn init_at_least_k(
    history: &GraphHistory,
    kind: AggregateKind,
    k: usize,
    options: &O2Options,
) -> Result<(Option<SnapshotSubset>, Vec<NodeId>)> {
    check_k(history, k, 1)?;
    let sets = per_snapshot_sets(history, kind, options.scorer_for(kind))?;
    let mut count = vec![0usize; history.n()];
    for set in &sets {
        for &u in set {
            count[u] += 1;
        }
    }
    let nodes: Vec<NodeId> = (0..history.n()).filter(|&u| count[u] >= k).collect();
    if nodes.is_empty() {
        return Ok((None, nodes));
    }
    let subset = best_snapshots(&nodes, history, k, kind.density())?;
    Ok((Some(subset), nodes))
}

fn init_random(
    history: &GraphHistory,
    kind: AggregateKind,
    k: usize,
    seed: u64,
    scorer: Scorer,
) -> Result<(SnapshotSubset, Vec<NodeId>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subset = SnapshotSubset::new(sample(&mut rng, history.tau(), k).into_vec(), history.tau())?;
    let solved = solve_on(history, subset.indices(), kind, scorer)?;
    Ok((subset, solved.nodes))
}

/// Alternates between picking the best `k` snapshots for the current node
/// set and re-solving BFF on them, until the score stops strictly improving
/// or `max_iters` rounds have run. Returns the best pair seen.
pub fn o2bff_iterative<S: Scalar>(
    history: &GraphHistory,
    kind: AggregateKind,
    k: usize,
    init: InitKind,
    options: &O2Options,
) -> Result<O2Solution<S>> {
    check_k(history, k, 1)?;
    if options.max_iters == 0 {
        return Err(BffError::domain("max_iters must be at least 1"));
    }
    let scorer = options.scorer_for(kind);
    let mut fallback_used = false;
    let mut current = match init {
        InitKind::Random(seed) => init_random(history, kind, k, seed, scorer)?.1,
        InitKind::Contiguous => init_contiguous(history, kind, k, options)?.1,
        InitKind::AtLeastK => {
            let (_, nodes) = init_at_least_k(history, kind, k, options)?;
            if nodes.is_empty() {
                fallback_used = true;
                init_random(history, kind, k, 0, scorer)?.1
            } else {
                nodes
            }
        }
    };
    let mut best: Option<(Solved, SnapshotSubset)> = None;
    let mut trace = Vec::new();
    let mut iterations = 0;
    while iterations < options.max_iters {
        iterations += 1;
        let subset = best_snapshots(&current, history, k, kind.density())?;
        let solved = solve_on(history, subset.indices(), kind, scorer)?;
        let improved = best.as_ref().is_none_or(|(b, _)| solved.value > b.value);
        if improved {
            current = solved.nodes.clone();
            best = Some((solved, subset));
        }
        trace.push(best.as_ref().expect("set on first round").0.value.to_scalar());
        if !improved {
            break;
        }
    }
    let (solved, subset) = best.expect("at least one round");
    let mut out = finish(solved, subset, kind, O2Solver::Iterative(init), iterations);
    out.fallback_used = fallback_used;
    out.trace = trace;
    Ok(out)
}

fn grow(indices: &[usize], t: usize) -> Vec<usize> {
    let mut next = indices.to_vec();
    next.push(t);
    next.sort_unstable();
    next
}

/// Starts from the pair of snapshots with the densest BFF solution and adds
/// one snapshot at a time, each time the one whose addition keeps the
/// re-solved BFF densest.
pub fn o2bff_incremental_density<S: Scalar>(
    history: &GraphHistory,
    kind: AggregateKind,
    k: usize,
    options: &O2Options,
) -> Result<O2Solution<S>> {
    check_k(history, k, 2)?;
    let scorer = options.scorer_for(kind);
    let tau = history.tau();
    let mut chosen: Vec<usize> = match options.random_pair_seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pair = sample(&mut rng, tau, 2).into_vec();
            pair.sort_unstable();
            pair
        }
        None => {
            let pairs: Vec<(usize, usize)> = (0..tau).flat_map(|i| (i + 1..tau).map(move |j| (i, j))).collect();
            let values: Vec<Frac> = pairs
                .par_iter()
                .map(|&(i, j)| solve_on(history, &[i, j], kind, scorer).map(|s| s.value))
                .collect::<Result<_>>()?;
            let (p, _) = argmax(values.into_iter().map(|v| (v, ()))).expect("tau >= 2");
            vec![pairs[p].0, pairs[p].1]
        }
    };
    let mut steps = 0;
    while chosen.len() < k {
        let candidates: Vec<usize> = (0..tau).filter(|t| !chosen.contains(t)).collect();
        let values: Vec<Frac> = candidates
            .par_iter()
            .map(|&t| solve_on(history, &grow(&chosen, t), kind, scorer).map(|s| s.value))
            .collect::<Result<_>>()?;
        let (c, _) = argmax(values.into_iter().map(|v| (v, ()))).expect("k <= tau");
        chosen = grow(&chosen, candidates[c]);
        steps += 1;
    }
    let solved = solve_on(history, &chosen, kind, scorer)?;
    Ok(finish(solved, SnapshotSubset::new(chosen, tau)?, kind, O2Solver::IncDensity, steps))
}

/// `|a ∩ b| / |a ∪ b|` of two sorted node sets; zero when both are empty.
pub fn jaccard(a: &[NodeId], b: &[NodeId]) -> Rational {
    let f = jaccard_frac(a, b);
    Rational::new(f.num, f.den)
}

fn jaccard_frac(a: &[NodeId], b: &[NodeId]) -> Frac {
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        Frac::new((0, 1))
    } else {
        Frac::new((common as i64, union as i64))
    }
}

/// Starts from the two snapshots whose individual BFF solutions overlap most
/// and adds, one at a time, the snapshot whose solution overlaps most with
/// the BFF solution of the snapshots chosen so far.
pub fn o2bff_incremental_overlap<S: Scalar>(
    history: &GraphHistory,
    kind: AggregateKind,
    k: usize,
    options: &O2Options,
) -> Result<O2Solution<S>> {
    check_k(history, k, 2)?;
    let scorer = options.scorer_for(kind);
    let tau = history.tau();
    let sets = per_snapshot_sets(history, kind, scorer)?;
    let pairs: Vec<(usize, usize)> = (0..tau).flat_map(|i| (i + 1..tau).map(move |j| (i, j))).collect();
    let (p, _) = argmax(pairs.iter().map(|&(i, j)| (jaccard_frac(&sets[i], &sets[j]), ()))).expect("tau >= 2");
    let mut chosen = vec![pairs[p].0, pairs[p].1];
    let mut steps = 0;
    while chosen.len() < k {
        let current = solve_on(history, &chosen, kind, scorer)?;
        let current = if current.value.num == 0 { Vec::new() } else { current.nodes };
        let candidates: Vec<usize> = (0..tau).filter(|t| !chosen.contains(t)).collect();
        let (c, _) = argmax(candidates.iter().map(|&t| (jaccard_frac(&sets[t], &current), ()))).expect("k <= tau");
        chosen = grow(&chosen, candidates[c]);
        steps += 1;
    }
    let solved = solve_on(history, &chosen, kind, scorer)?;
    Ok(finish(solved, SnapshotSubset::new(chosen, tau)?, kind, O2Solver::IncOverlap, steps))
}
