use std::collections::VecDeque;

use super::{run_peel, Scorer, Solution};
use crate::density::AggregateKind;
use crate::error::{BffError, Result};
use crate::graph_model::{membership_mask, normalize_node_set, GraphHistory, HistoryView, NodeId, SubHistory};
use crate::scalar::Scalar;

/// Peeling constrained to keep the `query` nodes.
///
/// With [`Scorer::MinDegree`] the peel stops as soon as a query node would be
/// removed, and the best set seen before that point is returned. With
/// [`Scorer::AvgDegree`] query nodes are never chosen; the peel runs until
/// only they remain. Every returned set contains all query nodes.
pub fn find_bff_query<'a, S: Scalar>(
    history: impl Into<HistoryView<'a>>,
    kind: AggregateKind,
    scorer: Scorer,
    query: &[NodeId],
) -> Result<Solution<S>> {
    let view = history.into();
    let query = normalize_node_set(query, view.n())?;
    let in_query = membership_mask(&query, view.n())?;
    let trace = match scorer {
        Scorer::MinDegree => run_peel(&view, kind, scorer, None, None, |u| in_query[u])?,
        Scorer::AvgDegree => {
            let selectable: Vec<bool> = in_query.iter().map(|&q| !q).collect();
            run_peel(&view, kind, scorer, None, Some(&selectable), |_| false)?
        }
        Scorer::Greedy(_) => {
            return Err(BffError::domain("query peeling supports the min and avg scorers only"));
        }
    };
    Ok(trace.into_solution(kind, scorer))
}

/// The sub-history induced by every node reachable from `query` in the union
/// of all snapshots.
pub fn restrict_to_component(history: &GraphHistory, query: &[NodeId]) -> Result<SubHistory> {
    let query = normalize_node_set(query, history.n())?;
    let mut seen = membership_mask(&query, history.n())?;
    let mut queue: VecDeque<NodeId> = query.into_iter().collect();
    while let Some(u) = queue.pop_front() {
        for s in history.snapshots() {
            for &v in s.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let reached: Vec<NodeId> = (0..history.n()).filter(|&u| seen[u]).collect();
    history.induced_subhistory(&reached)
}
