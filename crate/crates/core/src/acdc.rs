//! Pattern-based clustering in the style of ACDC: subgraph dominators
//! followed by orphan adoption. Flat decomposition, no cluster-size bound.
//! Every iteration order is lexicographic, so the result does not depend on
//! the order facts were supplied in.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Architecture, DependencyGraph};

pub const ORPHAN_CONTAINER: &str = "orphan.container.ss";
pub const CLUSTER_SUFFIX: &str = ".ss";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominatorCluster {
    pub dominator: String,
    pub members: BTreeSet<String>,
}

impl DominatorCluster {
    pub fn name(&self) -> String {
        format!("{}{CLUSTER_SUFFIX}", self.dominator)
    }
}

/// For each unclaimed node `n` in id order: take the unclaimed nodes
/// reachable from `n`, then discard every node that can be entered from
/// outside the set without passing through `n`. A non-empty remainder forms
/// a cluster with `n`, and its nodes are claimed.
pub fn find_subgraph_dominators(graph: &DependencyGraph) -> Vec<DominatorCluster> {
    let succ = graph.successors();
    let pred = graph.predecessors();
    let mut claimed: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();

    for n in graph.nodes().iter().map(String::as_str) {
        if claimed.contains(n) {
            continue;
        }
        // unclaimed nodes reachable from n
        let mut reach: BTreeSet<&str> = BTreeSet::new();
        let mut queue: VecDeque<&str> = VecDeque::from([n]);
        while let Some(x) = queue.pop_front() {
            for &y in &succ[x] {
                if y != n && !claimed.contains(y) && reach.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        // nodes with a predecessor outside reach ∪ {n} are entry points that
        // bypass n; they and everything reachable from them are dropped
        let mut bad: VecDeque<&str> = reach
            .iter()
            .copied()
            .filter(|&v| pred[v].iter().any(|&p| p != n && !reach.contains(p)))
            .collect();
        let mut dominated = reach.clone();
        for &v in &bad {
            dominated.remove(v);
        }
        while let Some(v) = bad.pop_front() {
            for &w in &succ[v] {
                if dominated.remove(w) {
                    bad.push_back(w);
                }
            }
        }
        if dominated.is_empty() {
            continue;
        }
        claimed.insert(n);
        claimed.extend(dominated.iter().copied());
        let mut members: BTreeSet<String> = dominated.into_iter().map(String::from).collect();
        members.insert(n.to_string());
        out.push(DominatorCluster {
            dominator: n.to_string(),
            members,
        });
    }
    out
}

/// Assigns every node outside `clusters`, in id order, to the cluster it has
/// the most edges with (either direction, counting earlier adoptions); ties
/// go to the smaller cluster name. Nodes with no such edge go to
/// [`ORPHAN_CONTAINER`].
pub fn adopt_orphans(clusters: &[DominatorCluster], graph: &DependencyGraph) -> Result<Architecture> {
    let mut owner: BTreeMap<&str, String> = BTreeMap::new();
    for c in clusters {
        let name = c.name();
        for m in &c.members {
            owner.insert(m.as_str(), name.clone());
        }
    }
    let succ = graph.successors();
    let pred = graph.predecessors();
    for n in graph.nodes().iter().map(String::as_str) {
        if owner.contains_key(n) {
            continue;
        }
        let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
        for &m in succ[n].iter().chain(pred[n].iter()) {
            if let Some(c) = owner.get(m) {
                *votes.entry(c.as_str()).or_default() += 1;
            }
        }
        // votes iterate by name; ties keep the earlier one
        let best = votes
            .iter()
            .fold(None::<(&str, usize)>, |best, (&c, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((c, v)),
            })
            .map(|(c, _)| c.to_string());
        owner.insert(n, best.unwrap_or_else(|| ORPHAN_CONTAINER.to_string()));
    }
    Architecture::from_assignment(owner)
}

/// Dominator patterns, then orphan adoption. `max_entities` rejects
/// oversized graphs up front.
pub fn recover_acdc(graph: &DependencyGraph, max_entities: Option<usize>) -> Result<Architecture> {
    if graph.node_count() == 0 {
        return Err(Error::UndefinedInput("dependency graph is empty".into()));
    }
    if let Some(cap) = max_entities {
        if graph.node_count() > cap {
            return Err(Error::SystemTooLarge {
                entities: graph.node_count(),
                cap,
            });
        }
    }
    let clusters = find_subgraph_dominators(graph);
    adopt_orphans(&clusters, graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)], isolated: &[&str]) -> DependencyGraph {
        let mut g = DependencyGraph::new();
        for (s, t) in edges {
            g.add_edge(*s, *t).unwrap();
        }
        for n in isolated {
            g.add_node(*n).unwrap();
        }
        g
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fan_out_is_dominated() {
        let d = find_subgraph_dominators(&graph(&[("a", "b"), ("a", "c")], &[]));
        assert_eq!(d, vec![DominatorCluster {
            dominator: "a".into(),
            members: set(&["a", "b", "c"]),
        }]);
    }

    #[test]
    fn shared_target_not_dominated() {
        let d = find_subgraph_dominators(&graph(&[("a", "b"), ("c", "b")], &[]));
        assert!(d.iter().all(|c| !c.members.contains("b") || c.dominator == "b"));
        assert!(d.is_empty());
    }

    #[test]
    fn empty_graph_has_no_dominators() {
        assert!(find_subgraph_dominators(&DependencyGraph::new()).is_empty());
    }

    #[test]
    fn cycles_below_dominator_are_included() {
        let d = find_subgraph_dominators(&graph(&[("a", "b"), ("b", "c"), ("c", "b")], &[]));
        assert_eq!(d[0].members, set(&["a", "b", "c"]));
    }

    #[test]
    fn bypassed_subtree_dropped() {
        // x enters c directly, so c and its child e are not dominated by a
        let d = find_subgraph_dominators(&graph(
            &[("a", "b"), ("a", "c"), ("c", "e"), ("x", "c")],
            &[],
        ));
        assert_eq!(d[0].dominator, "a");
        assert_eq!(d[0].members, set(&["a", "b"]));
    }

    #[test]
    fn orphan_joins_cluster_it_depends_on() {
        let clusters = vec![DominatorCluster {
            dominator: "a".into(),
            members: set(&["a", "b"]),
        }];
        let arch = adopt_orphans(&clusters, &graph(&[("a", "b"), ("z", "b")], &[])).unwrap();
        assert_eq!(arch.cluster_of("z"), Some("a.ss"));
    }

    #[test]
    fn isolated_orphan_goes_to_container() {
        let arch = adopt_orphans(&[], &graph(&[], &["w"])).unwrap();
        assert_eq!(arch.cluster_of("w"), Some(ORPHAN_CONTAINER));
    }

    #[test]
    fn adoption_tie_goes_to_smaller_name() {
        let clusters = vec![
            DominatorCluster { dominator: "q".into(), members: set(&["q", "q1"]) },
            DominatorCluster { dominator: "p".into(), members: set(&["p", "p1"]) },
        ];
        let g = graph(&[("q", "q1"), ("p", "p1"), ("o", "q1"), ("o", "p1")], &[]);
        let arch = adopt_orphans(&clusters, &g).unwrap();
        assert_eq!(arch.cluster_of("o"), Some("p.ss"));
    }

    #[test]
    fn full_pipeline() {
        let arch = recover_acdc(&graph(&[("a", "b"), ("a", "c")], &["w"]), None).unwrap();
        let expected = Architecture::from_clusters([
            ("a.ss", vec!["a", "b", "c"]),
            (ORPHAN_CONTAINER, vec!["w"]),
        ])
        .unwrap();
        assert_eq!(arch, expected);
        assert!(arch.clusters().keys().all(|n| n.ends_with(CLUSTER_SUFFIX)));
    }

    #[test]
    fn cap_guard() {
        let g = graph(&[("a", "b"), ("c", "d")], &[]);
        match recover_acdc(&g, Some(3)) {
            Err(Error::SystemTooLarge { entities: 4, cap: 3 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(recover_acdc(&g, Some(4)).is_ok());
    }

    #[test]
    fn isolated_node_only_touches_container() {
        let base = graph(&[("a", "b"), ("a", "c"), ("d", "b"), ("e", "f")], &["w"]);
        let mut grown = base.clone();
        grown.add_node("zz").unwrap();
        let before = recover_acdc(&base, None).unwrap();
        let after = recover_acdc(&grown, None).unwrap();
        let changed: Vec<&String> = after
            .clusters()
            .iter()
            .filter(|(n, m)| before.cluster(n) != Some(*m))
            .map(|(n, _)| n)
            .collect();
        assert_eq!(changed, [ORPHAN_CONTAINER]);
    }
}
