use std::fmt;
use std::str::FromStr;

use crate::density::AggregateKind;
use crate::error::{BffError, Result};
use crate::graph_model::{GraphHistory, NodeId};

/// Worst-case constructions for the peeling scorers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversarialFamily {
    /// `K_{n-1}` plus a pendant node in the first `tau - 1` snapshots; the
    /// last snapshot holds only the pendant edge. Traps min-degree peeling
    /// under `am`.
    PendantClique { n: usize, tau: usize },
    /// A complete `b × b` bipartite graph plus three hub nodes whose degrees
    /// shift halfway through an even number of snapshots. Traps avg-degree
    /// peeling under `am`.
    BipartiteHubs { b: usize, tau: usize },
    /// `m` snapshots of an `m`-node clique missing a different node in each
    /// snapshot, next to an `m²`-cycle. Traps min-degree peeling under `ma`.
    RotatingClique { m: usize },
    /// `m` snapshots of `K_m` next to `K_{m²}`, where the big clique is empty
    /// in the last snapshot. Traps avg-degree peeling under `ma`.
    FadingClique { m: usize },
}

/// An adversarial history with the node set it is built around.
#[derive(Clone, Debug)]
pub struct AdversarialInstance {
    pub history: GraphHistory,
    /// The dense set the construction plants: the optimum once the size
    /// parameter is large enough.
    pub designated: Vec<NodeId>,
    /// The aggregate density the construction targets.
    pub kind: AggregateKind,
}

fn clique(nodes: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let mut e = Vec::with_capacity(nodes.len() * nodes.len().saturating_sub(1) / 2);
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            e.push((a, b));
        }
    }
    e
}

impl AdversarialFamily {
    pub fn name(&self) -> &'static str {
        match self {
            AdversarialFamily::PendantClique { .. } => "pendant-clique",
            AdversarialFamily::BipartiteHubs { .. } => "bipartite-hubs",
            AdversarialFamily::RotatingClique { .. } => "rotating-clique",
            AdversarialFamily::FadingClique { .. } => "fading-clique",
        }
    }

    pub fn build(&self) -> Result<AdversarialInstance> {
        match *self {
            AdversarialFamily::PendantClique { n, tau } => {
                if n < 3 || tau < 2 {
                    return Err(BffError::InvalidSpec("pendant-clique needs n >= 3 and tau >= 2".into()));
                }
                // u = 0 is the clique node holding the pendant v = n - 1
                let members: Vec<NodeId> = (0..n - 1).collect();
                let mut full = clique(&members);
                full.push((0, n - 1));
                let mut lists = vec![full; tau - 1];
                lists.push(vec![(0, n - 1)]);
                Ok(AdversarialInstance {
                    history: GraphHistory::from_edge_lists(n, lists)?,
                    designated: members,
                    kind: AggregateKind::AM,
                })
            }
            AdversarialFamily::BipartiteHubs { b, tau } => {
                if b < 1 || tau < 2 || tau % 2 != 0 {
                    return Err(BffError::InvalidSpec("bipartite-hubs needs b >= 1 and an even tau >= 2".into()));
                }
                let (u, v, s) = (2 * b, 2 * b + 1, 2 * b + 2);
                let n = 2 * b + 3;
                let side: Vec<NodeId> = (0..2 * b).collect();
                let lists = (0..tau)
                    .map(|t| {
                        let mut e: Vec<(NodeId, NodeId)> =
                            (0..b).flat_map(|l| (b..2 * b).map(move |r| (l, r))).collect();
                        e.push((u, v));
                        if t + 1 < tau {
                            e.extend((0..n).filter(|&w| w != s).map(|w| (w, s)));
                        } else {
                            e.extend([(u, s), (v, s)]);
                        }
                        let hub = if t < tau / 2 { u } else { v };
                        e.extend(side.iter().map(|&w| (w, hub)));
                        e
                    })
                    .collect();
                Ok(AdversarialInstance {
                    history: GraphHistory::from_edge_lists(n, lists)?,
                    designated: side,
                    kind: AggregateKind::AM,
                })
            }
            AdversarialFamily::RotatingClique { m } => {
                if m < 3 {
                    return Err(BffError::InvalidSpec("rotating-clique needs m >= 3".into()));
                }
                let n = m + m * m;
                let a: Vec<NodeId> = (0..m).collect();
                let cycle: Vec<(NodeId, NodeId)> = (0..m * m).map(|i| (m + i, m + (i + 1) % (m * m))).collect();
                let lists = (0..m)
                    .map(|t| {
                        let others: Vec<NodeId> = a.iter().copied().filter(|&x| x != t).collect();
                        let mut e = clique(&others);
                        e.extend_from_slice(&cycle);
                        e
                    })
                    .collect();
                Ok(AdversarialInstance {
                    history: GraphHistory::from_edge_lists(n, lists)?,
                    designated: a,
                    kind: AggregateKind::MA,
                })
            }
            AdversarialFamily::FadingClique { m } => {
                if m < 2 {
                    return Err(BffError::InvalidSpec("fading-clique needs m >= 2".into()));
                }
                let n = m + m * m;
                let a: Vec<NodeId> = (0..m).collect();
                let b: Vec<NodeId> = (m..n).collect();
                let small = clique(&a);
                let mut both = small.clone();
                both.extend(clique(&b));
                let mut lists = vec![both; m - 1];
                lists.push(small);
                Ok(AdversarialInstance {
                    history: GraphHistory::from_edge_lists(n, lists)?,
                    designated: a,
                    kind: AggregateKind::MA,
                })
            }
        }
    }
}

impl fmt::Display for AdversarialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AdversarialFamily::PendantClique { n, tau } => write!(f, "pendant-clique(n={n},tau={tau})"),
            AdversarialFamily::BipartiteHubs { b, tau } => write!(f, "bipartite-hubs(b={b},tau={tau})"),
            AdversarialFamily::RotatingClique { m } => write!(f, "rotating-clique(m={m})"),
            AdversarialFamily::FadingClique { m } => write!(f, "fading-clique(m={m})"),
        }
    }
}

/// Parses `name` or `name:p1,p2`, e.g. `pendant-clique:10,4` or
/// `fading-clique:3`.
impl FromStr for AdversarialFamily {
    type Err = BffError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let values = params
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| BffError::InvalidSpec(format!("bad family parameter in `{s}`: {e}")))?;
        let need = |k: usize| -> Result<()> {
            if values.len() == k {
                Ok(())
            } else {
                Err(BffError::InvalidSpec(format!("`{name}` takes {k} parameter(s)")))
            }
        };
        match name {
            "pendant-clique" => {
                need(2)?;
                Ok(AdversarialFamily::PendantClique { n: values[0], tau: values[1] })
            }
            "bipartite-hubs" => {
                need(2)?;
                Ok(AdversarialFamily::BipartiteHubs { b: values[0], tau: values[1] })
            }
            "rotating-clique" => {
                need(1)?;
                Ok(AdversarialFamily::RotatingClique { m: values[0] })
            }
            "fading-clique" => {
                need(1)?;
                Ok(AdversarialFamily::FadingClique { m: values[0] })
            }
            other => Err(BffError::InvalidSpec(format!("unknown family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::aggregate_density;
    use crate::Rational;

    fn f(inst: &AdversarialInstance) -> Rational {
        aggregate_density(inst.kind, &inst.designated, &inst.history).unwrap()
    }

    #[test]
    fn pendant_clique_value() {
        let inst = AdversarialFamily::PendantClique { n: 10, tau: 4 }.build().unwrap();
        assert_eq!(inst.history.n(), 10);
        assert_eq!(inst.history.snapshot(3).edge_count(), 1);
        assert_eq!(inst.history.snapshot(0).edge_count(), 37);
        // (n-2)(tau-1)/tau
        assert_eq!(f(&inst), Rational::new(8 * 3, 4));
    }

    #[test]
    fn bipartite_hubs_value() {
        let inst = AdversarialFamily::BipartiteHubs { b: 4, tau: 4 }.build().unwrap();
        assert_eq!(inst.history.n(), 11);
        assert_eq!(f(&inst), Rational::from_integer(4));
        assert!(AdversarialFamily::BipartiteHubs { b: 4, tau: 3 }.build().is_err());
    }

    #[test]
    fn rotating_clique_value() {
        let inst = AdversarialFamily::RotatingClique { m: 4 }.build().unwrap();
        assert_eq!(inst.history.n(), 20);
        // (m-1)(m-2)/m
        assert_eq!(f(&inst), Rational::new(3, 2));
        let cycle: Vec<usize> = (4..20).collect();
        let c: Rational = aggregate_density(AggregateKind::MA, &cycle, &inst.history).unwrap();
        assert_eq!(c, Rational::from_integer(2));
    }

    #[test]
    fn fading_clique_value() {
        let inst = AdversarialFamily::FadingClique { m: 3 }.build().unwrap();
        assert_eq!(inst.history.tau(), 3);
        assert_eq!(inst.history.snapshot(2).edge_count(), 3);
        assert_eq!(f(&inst), Rational::from_integer(2));
    }

    #[test]
    fn family_parsing() {
        assert_eq!(
            "pendant-clique:10,4".parse::<AdversarialFamily>().unwrap(),
            AdversarialFamily::PendantClique { n: 10, tau: 4 }
        );
        assert_eq!(
            "fading-clique:3".parse::<AdversarialFamily>().unwrap(),
            AdversarialFamily::FadingClique { m: 3 }
        );
        assert!("fading-clique".parse::<AdversarialFamily>().is_err());
        assert!("nope:1".parse::<AdversarialFamily>().is_err());
    }
}
