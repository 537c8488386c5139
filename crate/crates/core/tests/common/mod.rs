//! Shared helpers for integration tests: exhaustive-search oracles for the
//! similarity metrics and generators for synthetic systems.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use archrec::corpus::Corpus;
use archrec::text::TokenBag;
use archrec::{Architecture, DependencyGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const UNIVERSE: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Random architecture over a subset of `universe` with at most 4
/// clusters. `all` forces every entity to be present.
pub fn random_arch(rng: &mut ChaCha8Rng, universe: &[&str], all: bool) -> Architecture {
    let present = if all { 1.0 } else { rng.random_range(0.0..1.0) };
    Architecture::from_assignment(universe.iter().filter_map(|e| {
        let keep = all || rng.random_bool(present);
        let slot = rng.random_range(0..4);
        keep.then(|| (e.to_string(), format!("k{slot}")))
    }))
    .unwrap()
}

// ---------- mto by breadth-first search over single operations ----------

const ABSENT: u8 = 0;
const UNPLACED: u8 = 1;

/// Entity states (absent, unplaced, or a block label >= 2) plus the number
/// of empty clusters. Block labels are renumbered by first appearance so
/// states that differ only in cluster naming coincide.
#[derive(Clone, PartialEq, Eq, Hash)]
struct MtoState {
    slot: Vec<u8>,
    empties: u8,
}

impl MtoState {
    fn canonical(mut self) -> Self {
        let mut map = HashMap::new();
        for s in self.slot.iter_mut() {
            if *s >= 2 {
                let next = map.len() as u8 + 2;
                *s = *map.entry(*s).or_insert(next);
            }
        }
        self
    }

    fn blocks(&self) -> u8 {
        self.slot.iter().filter(|&&s| s >= 2).collect::<BTreeSet<_>>().len() as u8
    }
}

fn encode(arch: &Architecture, universe: &[String]) -> MtoState {
    let names: Vec<&String> = arch.clusters().keys().collect();
    let slot = universe
        .iter()
        .map(|e| match arch.cluster_of(e) {
            Some(c) => names.iter().position(|n| *n == c).unwrap() as u8 + 2,
            None => ABSENT,
        })
        .collect();
    MtoState { slot, empties: 0 }.canonical()
}

/// Fewest addC/remC/addE/remE/movE operations from `a1` to `a2`. Added
/// entities start outside every cluster and must be moved in; removed
/// entities must first be moved out. Clusters are anonymous.
pub fn mto_bfs(a1: &Architecture, a2: &Architecture) -> usize {
    let universe: Vec<String> = a1
        .entities()
        .chain(a2.entities())
        .map(String::from)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let start = encode(a1, &universe);
    let goal = encode(a2, &universe);
    let cap = (a1.cluster_count() + a2.cluster_count()) as u8;

    let mut seen: HashMap<MtoState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let d = seen[&s];
        if s == goal {
            return d;
        }
        let blocks = s.blocks();
        let mut next = Vec::new();
        if blocks + s.empties < cap {
            next.push(MtoState { slot: s.slot.clone(), empties: s.empties + 1 });
        }
        if s.empties > 0 {
            next.push(MtoState { slot: s.slot.clone(), empties: s.empties - 1 });
        }
        for i in 0..s.slot.len() {
            let here = s.slot[i];
            let mut with = |v: u8, empties: u8| {
                let mut slot = s.slot.clone();
                slot[i] = v;
                next.push(MtoState { slot, empties });
            };
            match here {
                ABSENT => with(UNPLACED, s.empties),
                UNPLACED => with(ABSENT, s.empties),
                _ => {}
            }
            if here == ABSENT {
                continue;
            }
            // leaving a block that it alone occupied leaves an empty cluster
            let sole = here >= 2 && s.slot.iter().filter(|&&x| x == here).count() == 1;
            let freed = s.empties + u8::from(sole);
            for b in 2..2 + blocks {
                if b != here {
                    with(b, freed);
                }
            }
            if s.empties > 0 || sole {
                // into an empty cluster
                with(2 + blocks, freed - 1);
            }
            if here >= 2 {
                with(UNPLACED, freed);
            }
        }
        for n in next {
            let n = n.canonical();
            if !seen.contains_key(&n) {
                seen.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    unreachable!("goal is always reachable")
}

// ---------- MoJo by search over Move and Join ----------

/// Restricted-growth labelling of a partition of `n` items.
type Partition = Vec<u8>;

fn canonical_partition(p: &[u8]) -> Partition {
    let mut map = HashMap::new();
    p.iter()
        .map(|x| {
            let next = map.len() as u8;
            *map.entry(*x).or_insert(next)
        })
        .collect()
}

fn partition_of(arch: &Architecture, universe: &[String]) -> Partition {
    let names: Vec<&String> = arch.clusters().keys().collect();
    canonical_partition(
        &universe
            .iter()
            .map(|e| names.iter().position(|n| Some(n.as_str()) == arch.cluster_of(e)).unwrap() as u8)
            .collect::<Vec<_>>(),
    )
}

/// Partitions reachable in one Move (to another cluster or a new one).
fn moves(p: &Partition) -> Vec<Partition> {
    let k = p.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = Vec::new();
    for i in 0..p.len() {
        for target in 0..=k {
            if target != p[i] {
                let mut q = p.clone();
                q[i] = target;
                out.push(canonical_partition(&q));
            }
        }
    }
    out
}

fn joins(p: &Partition) -> Vec<Partition> {
    let k = p.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = Vec::new();
    for x in 0..k {
        for y in x + 1..k {
            let q: Vec<u8> = p.iter().map(|&c| if c == y { x } else { c }).collect();
            out.push(canonical_partition(&q));
        }
    }
    out
}

/// Fewest Move and Join operations from `a` to `b` (same entities).
pub fn mno_bfs(a: &Architecture, b: &Architecture) -> usize {
    let universe: Vec<String> = a.entities().map(String::from).collect();
    let start = partition_of(a, &universe);
    let goal = partition_of(b, &universe);
    let mut seen = HashMap::from([(start.clone(), 0usize)]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        let d = seen[&p];
        if p == goal {
            return d;
        }
        for q in moves(&p).into_iter().chain(joins(&p)) {
            if !seen.contains_key(&q) {
                seen.insert(q.clone(), d + 1);
                queue.push_back(q);
            }
        }
    }
    unreachable!()
}

fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Partition| {
                let k = p.iter().copied().max().map_or(0, |m| m + 1);
                (0..=k).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// Largest MoJo distance from any partition of `b`'s entities to `b`, by
/// searching from every partition.
pub fn max_mno_exhaustive(b: &Architecture) -> usize {
    let universe: Vec<String> = b.entities().map(String::from).collect();
    let goal = partition_of(b, &universe);
    // distances to the goal for all partitions at once: search backwards
    // with the inverse operations (Move is self-inverse, Join inverts Split)
    let mut dist: HashMap<Partition, usize> = HashMap::from([(goal.clone(), 0)]);
    let mut queue = VecDeque::from([goal]);
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        for q in moves(&p).into_iter().chain(splits(&p)) {
            if !dist.contains_key(&q) {
                dist.insert(q.clone(), d + 1);
                queue.push_back(q);
            }
        }
    }
    assert_eq!(dist.len(), all_partitions(universe.len()).len());
    dist.values().copied().max().unwrap_or(0)
}

fn splits(p: &Partition) -> Vec<Partition> {
    let k = p.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = Vec::new();
    for c in 0..k {
        let members: Vec<usize> = (0..p.len()).filter(|&i| p[i] == c).collect();
        // non-empty proper subsets not containing the first member
        for mask in 1..(1u32 << (members.len() - 1)) {
            let mut q = p.clone();
            for (bit, &i) in members[1..].iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    q[i] = k;
                }
            }
            out.push(canonical_partition(&q));
        }
    }
    out
}

// ---------- synthetic systems ----------

pub fn words(prefix: &str, n: usize) -> Vec<String> {
    const SYLLABLES: [&str; 12] = ["ka", "lo", "mi", "nu", "pe", "ra", "si", "to", "ve", "zu", "bo", "de"];
    (0..n)
        .map(|i| format!("{prefix}{}{}", SYLLABLES[i % 12], SYLLABLES[(i / 12) % 12]))
        .collect()
}

/// Token bag drawing `len` tokens from `vocab`.
pub fn bag(rng: &mut ChaCha8Rng, vocab: &[String], len: usize) -> TokenBag {
    let mut b = TokenBag::new();
    for _ in 0..len {
        *b.entry(vocab[rng.random_range(0..vocab.len())].clone()).or_insert(0) += 1;
    }
    b
}

/// `n` entities in `packages` packages, each package with its own
/// vocabulary; edges mostly stay inside a package.
pub fn synthetic_facts(n: usize, packages: usize, edges_per_entity: usize, seed: u64) -> (DependencyGraph, Corpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<Vec<String>> = (0..packages).map(|p| words(&format!("w{p}"), 12)).collect();
    let id = |i: usize| format!("pkg{}.E{i}", i % packages);
    let mut graph = DependencyGraph::new();
    let mut corpus = Corpus::new();
    for i in 0..n {
        graph.add_node(id(i)).unwrap();
        corpus.insert(id(i), bag(&mut rng, &vocab[i % packages], 15)).unwrap();
    }
    for i in 0..n {
        let mut added = 0;
        while added < edges_per_entity {
            let j = if rng.random_bool(0.8) {
                (rng.random_range(0..n / packages) * packages + i % packages).min(n - 1)
            } else {
                rng.random_range(0..n)
            };
            if j != i && !graph.edges().contains(&(id(i), id(j))) {
                graph.add_edge(id(i), id(j)).unwrap();
                added += 1;
            }
        }
    }
    (graph, corpus)
}
