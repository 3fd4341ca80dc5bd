//! Whitespace-separated `t u v` edge lists.
//!
//! `t` is a 0-based snapshot index and `u`, `v` are arbitrary label tokens.
//! Lines starting with `#` and blank lines are ignored. The snapshot count is
//! `max(t) + 1`; snapshots without lines are empty. Node ids are assigned in
//! order of first appearance.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{GraphHistory, NodeId, Snapshot};
use crate::error::{BffError, Result};

pub fn load_history<R: BufRead>(reader: R) -> Result<GraphHistory> {
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<Vec<(NodeId, NodeId)>> = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(BffError::Parse {
                line: lineno,
                message: format!("expected `t u v`, found {} tokens", tokens.len()),
            });
        }
        let t: i64 = tokens[0].parse().map_err(|_| BffError::Parse {
            line: lineno,
            message: format!("snapshot index `{}` is not an integer", tokens[0]),
        })?;
        if t < 0 {
            return Err(BffError::Parse {
                line: lineno,
                message: format!("negative snapshot index {t}"),
            });
        }
        let t = t as usize;
        let mut intern = |label: &str| -> NodeId {
            if let Some(&id) = ids.get(label) {
                return id;
            }
            let id = labels.len();
            labels.push(label.to_owned());
            ids.insert(label.to_owned(), id);
            id
        };
        let u = intern(tokens[1]);
        let v = intern(tokens[2]);
        if edges.len() <= t {
            edges.resize_with(t + 1, Vec::new);
        }
        edges[t].push((u, v));
    }

    if edges.is_empty() {
        return Err(BffError::EmptyHistory);
    }
    let n = labels.len();
    let snapshots = edges
        .into_iter()
        .map(|e| Snapshot::from_edges(n, e))
        .collect::<Result<Vec<_>>>()?;
    GraphHistory::new(n, snapshots)?.with_labels(labels)
}

pub fn parse_history(text: &str) -> Result<GraphHistory> {
    load_history(text.as_bytes())
}

/// Writes `history` in the same format. Nodes with no edge anywhere and a
/// trailing run of empty snapshots are kept alive with self-loop lines,
/// which the reader registers and then drops.
pub fn write_history<W: Write>(history: &GraphHistory, mut out: W) -> Result<()> {
    let n = history.n();
    let mut touched = vec![false; n];
    for (t, snapshot) in history.snapshots().iter().enumerate() {
        for (u, v) in snapshot.edges() {
            touched[u] = true;
            touched[v] = true;
            writeln!(out, "{t} {} {}", history.label(u), history.label(v))?;
        }
    }
    for (u, _) in touched.iter().enumerate().filter(|(_, &seen)| !seen) {
        writeln!(out, "0 {0} {0}", history.label(u))?;
    }
    let last = history.tau() - 1;
    if n > 0 && history.snapshot(last).edge_count() == 0 {
        writeln!(out, "{last} {0} {0}", history.label(0))?;
    }
    Ok(())
}

/// Label-based form of a history: equal for histories that differ only in
/// node numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalHistory {
    pub labels: Vec<String>,
    pub snapshots: Vec<Vec<(String, String)>>,
}

pub fn canonical_form(history: &GraphHistory) -> CanonicalHistory {
    let mut labels: Vec<String> = (0..history.n()).map(|u| history.label(u).into_owned()).collect();
    labels.sort();
    let snapshots = history
        .snapshots()
        .iter()
        .map(|s| {
            let mut edges: Vec<(String, String)> = s
                .edges()
                .map(|(u, v)| {
                    let (a, b) = (history.label(u).into_owned(), history.label(v).into_owned());
                    if a <= b {
                        (a, b)
                    } else {
                        (b, a)
                    }
                })
                .collect();
            edges.sort();
            edges
        })
        .collect();
    CanonicalHistory { labels, snapshots }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_basic_history() {
        let h = parse_history("0 a b\n0 b c\n1 a b\n").unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.tau(), 2);
        assert_eq!(h.snapshot(0).edge_count(), 2);
        assert_eq!(h.snapshot(1).edge_count(), 1);
        assert_eq!(h.labels().unwrap(), &["a", "b", "c"]);
    }

    #[test]
    fn self_loop_registers_node_only() {
        let h = parse_history("0 a a").unwrap();
        assert_eq!((h.n(), h.tau(), h.snapshot(0).edge_count()), (1, 1, 0));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let h = parse_history("0 a b\n0 b a\n").unwrap();
        assert_eq!(h.snapshot(0).edge_count(), 1);
    }

    #[test]
    fn comments_blank_lines_and_gaps() {
        let h = parse_history("# header\n\n2 x y\n").unwrap();
        assert_eq!(h.tau(), 3);
        assert_eq!(h.snapshot(0).edge_count(), 0);
        assert_eq!(h.snapshot(2).edge_count(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_history("0 a b\n0 a\n").unwrap_err();
        assert!(matches!(err, BffError::Parse { line: 2, .. }), "{err}");
        let err = parse_history("x a b").unwrap_err();
        assert!(matches!(err, BffError::Parse { line: 1, .. }));
        let err = parse_history("# c\n-1 a b").unwrap_err();
        assert!(matches!(err, BffError::Parse { line: 2, .. }));
        let err = parse_history("0 a b c").unwrap_err();
        assert!(matches!(err, BffError::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_history(""), Err(BffError::EmptyHistory)));
        assert!(matches!(parse_history("# only\n"), Err(BffError::EmptyHistory)));
    }

    #[test]
    fn writer_keeps_isolated_nodes_and_trailing_empty_snapshots() {
        let h = parse_history("0 a b\n0 c c\n3 a a\n").unwrap();
        assert_eq!((h.n(), h.tau()), (3, 4));
        let mut buf = Vec::new();
        write_history(&h, &mut buf).unwrap();
        let back = parse_history(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(canonical_form(&back), canonical_form(&h));
        assert_eq!(back.tau(), 4);
    }
}
