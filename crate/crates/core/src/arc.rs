//! Concern-based recovery: topic mixtures plus dependency structure as
//! features, average-linkage agglomerative clustering, and per-cluster
//! concern weights.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lda::{fit_lda, js_divergence, LdaParams, TopicModel};
use crate::model::{Architecture, DependencyGraph};

/// Feature vector of one entity: a weighted topic mixture and a weighted,
/// row-normalised neighbourhood vector over the sorted entity universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub topics: Vec<f64>,
    pub structure: Vec<f64>,
}

impl FeatureVector {
    /// Jensen–Shannon divergence of the topic parts plus Euclidean distance
    /// of the structural parts.
    pub fn distance(&self, other: &FeatureVector) -> f64 {
        let structural: f64 = self
            .structure
            .iter()
            .zip(&other.structure)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        js_divergence(&self.topics, &other.topics) + structural
    }
}

pub type Features = BTreeMap<String, FeatureVector>;

/// Builds features for every graph node and every model document.
///
/// Entities without a document get the uniform mixture. With `lambda == 0`
/// the structural part is empty and the feature is exactly the mixture.
pub fn build_features(model: &TopicModel, graph: &DependencyGraph, lambda: f64) -> Result<Features> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Config(format!("lambda {lambda} is outside [0, 1]")));
    }
    let universe: BTreeSet<&str> = graph
        .nodes()
        .iter()
        .map(String::as_str)
        .chain(model.doc_topic.keys().map(String::as_str))
        .collect();
    let index: BTreeMap<&str, usize> = universe.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut neighbours: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (s, t) in graph.edges() {
        neighbours.entry(s).or_default().insert(index[t.as_str()]);
        neighbours.entry(t).or_default().insert(index[s.as_str()]);
    }

    let mut features = Features::new();
    for &id in &universe {
        let topics: Vec<f64> = model.mixture_of(id).into_iter().map(|p| (1.0 - lambda) * p).collect();
        let structure = if lambda == 0.0 {
            Vec::new()
        } else {
            let mut row = vec![0.0; universe.len()];
            if let Some(ns) = neighbours.get(id) {
                let w = lambda / ns.len() as f64;
                for &n in ns {
                    row[n] = w;
                }
            }
            row
        };
        features.insert(id.to_string(), FeatureVector { topics, structure });
    }
    Ok(features)
}

#[derive(Clone, Copy)]
struct Nearest {
    dist: f64,
    other: usize,
}

/// Average-linkage agglomerative clustering down to `num_clusters` clusters.
///
/// Entities are indexed in id order and a cluster is represented by its
/// smallest member, so among equally distant pairs the one with the
/// lexicographically smallest representatives merges first. Output clusters
/// are named `c0`, `c1`, ... in order of their smallest member.
pub fn cluster_entities(features: &Features, num_clusters: usize) -> Result<Architecture> {
    let n = features.len();
    if num_clusters == 0 || num_clusters > n {
        return Err(Error::Config(format!(
            "cluster count {num_clusters} outside 1..={n}"
        )));
    }
    let ids: Vec<&str> = features.keys().map(String::as_str).collect();
    let vecs: Vec<&FeatureVector> = features.values().collect();

    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = vecs[i].distance(vecs[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();

    // nearest[i]: best (dist, j) over active j > i
    let row_best = |i: usize, active: &[bool], dist: &[f64]| -> Option<Nearest> {
        let mut best: Option<Nearest> = None;
        for j in i + 1..n {
            if active[j] {
                let d = dist[i * n + j];
                if best.is_none_or(|b| d < b.dist) {
                    best = Some(Nearest { dist: d, other: j });
                }
            }
        }
        best
    };
    let mut nearest: Vec<Option<Nearest>> = (0..n).map(|i| row_best(i, &active, &dist)).collect();

    let mut remaining = n;
    while remaining > num_clusters {
        let mut pick: Option<(usize, Nearest)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if let Some(nb) = nearest[i] {
                if pick.is_none_or(|(_, p)| nb.dist < p.dist) {
                    pick = Some((i, nb));
                }
            }
        }
        let (a, Nearest { other: b, .. }) = pick.expect("at least two active clusters");

        // Lance–Williams update for average linkage
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for x in 0..n {
            if active[x] && x != a && x != b {
                let d = (sa * dist[a * n + x] + sb * dist[b * n + x]) / (sa + sb);
                dist[a * n + x] = d;
                dist[x * n + a] = d;
            }
        }
        active[b] = false;
        size[a] += size[b];
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);
        nearest[b] = None;
        remaining -= 1;

        nearest[a] = row_best(a, &active, &dist);
        for k in 0..b {
            if !active[k] || k == a {
                continue;
            }
            match nearest[k] {
                Some(nb) if nb.other == a || nb.other == b => nearest[k] = row_best(k, &active, &dist),
                Some(nb) if k < a => {
                    let d = dist[k * n + a];
                    if d < nb.dist || (d == nb.dist && a < nb.other) {
                        nearest[k] = Some(Nearest { dist: d, other: a });
                    }
                }
                Some(_) => {}
                None => nearest[k] = row_best(k, &active, &dist),
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = (0..n).filter(|&i| active[i]).map(|i| members[i].clone()).collect();
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    Architecture::from_clusters(
        groups
            .into_iter()
            .enumerate()
            .map(|(c, g)| (format!("c{c}"), g.into_iter().map(|i| ids[i].to_string()))),
    )
}

/// Topic weights per cluster and the descriptive words of each topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConcernAssignment {
    /// Topic index → most probable words, descending.
    pub topics: BTreeMap<usize, Vec<String>>,
    /// Cluster name → (topic, weight), weight descending.
    pub clusters: BTreeMap<String, Vec<(usize, f64)>>,
    /// Pairwise topic divergence (K × K). Absent in hand-written files, in
    /// which case it is approximated from the word lists.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topic_divergence: Vec<Vec<f64>>,
}

impl ConcernAssignment {
    pub fn topic_count(&self) -> usize {
        let from_topics = self.topics.keys().next_back().map_or(0, |k| k + 1);
        let from_clusters = self
            .clusters
            .values()
            .flat_map(|ws| ws.iter().map(|(k, _)| k + 1))
            .max()
            .unwrap_or(0);
        from_topics.max(from_clusters).max(self.topic_divergence.len())
    }

    /// Divergence between two topics: the stored matrix when present,
    /// otherwise the divergence of uniform distributions over the two word
    /// lists.
    pub fn divergence(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        if let Some(d) = self.topic_divergence.get(a).and_then(|row| row.get(b)) {
            return *d;
        }
        let empty = Vec::new();
        let wa = self.topics.get(&a).unwrap_or(&empty);
        let wb = self.topics.get(&b).unwrap_or(&empty);
        word_list_divergence(wa, wb)
    }
}

fn word_list_divergence(a: &[String], b: &[String]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let sa: BTreeSet<&str> = a.iter().map(String::as_str).collect();
    let sb: BTreeSet<&str> = b.iter().map(String::as_str).collect();
    let support: Vec<&str> = sa.union(&sb).copied().collect();
    let p: Vec<f64> = support.iter().map(|w| if sa.contains(w) { 1.0 / sa.len() as f64 } else { 0.0 }).collect();
    let q: Vec<f64> = support.iter().map(|w| if sb.contains(w) { 1.0 / sb.len() as f64 } else { 0.0 }).collect();
    js_divergence(&p, &q)
}

/// Cluster weight of topic k = mean mixture weight of k over the members.
pub fn label_clusters(arch: &Architecture, model: &TopicModel, top_words: usize) -> ConcernAssignment {
    let k = model.topic_count();
    let mut clusters = BTreeMap::new();
    for (name, members) in arch.clusters() {
        let mut sum = vec![0.0; k];
        for m in members {
            for (s, p) in sum.iter_mut().zip(model.mixture_of(m)) {
                *s += p;
            }
        }
        let n = members.len() as f64;
        let mut weights: Vec<(usize, f64)> = sum.into_iter().map(|s| s / n).enumerate().collect();
        weights.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        clusters.insert(name.clone(), weights);
    }
    ConcernAssignment {
        topics: (0..k).map(|t| (t, model.top_words(t, top_words))).collect(),
        clusters,
        topic_divergence: model.topic_divergence(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ArcParams {
    pub topics: usize,
    /// Defaults to max(2, round(entities / 10)).
    pub clusters: Option<usize>,
    pub seed: u64,
    /// Defaults to 50 / topics.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub lambda: f64,
    pub top_words: usize,
    pub max_entities: Option<usize>,
}

impl Default for ArcParams {
    fn default() -> Self {
        ArcParams {
            topics: 100,
            clusters: None,
            seed: 1,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            lambda: 0.5,
            top_words: 10,
            max_entities: Some(5000),
        }
    }
}

impl ArcParams {
    pub fn lda(&self) -> LdaParams {
        LdaParams {
            topics: self.topics,
            alpha: self.alpha.unwrap_or(50.0 / self.topics.max(1) as f64),
            beta: self.beta,
            iterations: self.iterations,
            seed: self.seed,
        }
    }

    pub fn cluster_count_for(&self, entities: usize) -> usize {
        self.clusters
            .unwrap_or_else(|| 2.max((entities as f64 / 10.0).round() as usize))
            .min(entities)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArcRecovery {
    pub architecture: Architecture,
    pub concerns: ConcernAssignment,
    pub model: TopicModel,
}

fn universe_size(corpus: &Corpus, graph: &DependencyGraph) -> usize {
    let mut ids: BTreeSet<&str> = graph.nodes().iter().map(String::as_str).collect();
    ids.extend(corpus.documents().keys().map(String::as_str));
    ids.len()
}

/// Clusters with an already fitted model (shared-model studies fit once and
/// recover several versions).
pub fn recover_with_model(model: &TopicModel, graph: &DependencyGraph, params: &ArcParams) -> Result<(Architecture, ConcernAssignment)> {
    let features = build_features(model, graph, params.lambda)?;
    if let Some(cap) = params.max_entities {
        if features.len() > cap {
            return Err(Error::SystemTooLarge {
                entities: features.len(),
                cap,
            });
        }
    }
    let arch = cluster_entities(&features, params.cluster_count_for(features.len()))?;
    let concerns = label_clusters(&arch, model, params.top_words);
    Ok((arch, concerns))
}

/// Topic model → features → clustering → concern labels.
pub fn recover_arc(corpus: &Corpus, graph: &DependencyGraph, params: &ArcParams) -> Result<ArcRecovery> {
    let n = universe_size(corpus, graph);
    if let Some(cap) = params.max_entities {
        if n > cap {
            return Err(Error::SystemTooLarge { entities: n, cap });
        }
    }
    if n == 0 {
        return Err(Error::Config("nothing to recover: empty corpus and graph".into()));
    }
    let model = fit_lda(corpus, params.lda())?;
    let (architecture, concerns) = recover_with_model(&model, graph, params)?;
    Ok(ArcRecovery {
        architecture,
        concerns,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::TokenBag;

    fn model_with(mixtures: &[(&str, Vec<f64>)]) -> TopicModel {
        let k = mixtures[0].1.len();
        TopicModel {
            params: LdaParams::new(k, 1, 1),
            vocabulary: vec!["w".into()],
            doc_topic: mixtures.iter().map(|(id, v)| (id.to_string(), v.clone())).collect(),
            topic_word: vec![vec![1.0]; k],
            warnings: vec![],
        }
    }

    #[test]
    fn topics_only_features() {
        let m = model_with(&[("a", vec![0.3, 0.7]), ("b", vec![0.5, 0.5])]);
        let mut g = DependencyGraph::new();
        g.add_edge("a", "b").unwrap();
        let f = build_features(&m, &g, 0.0).unwrap();
        assert_eq!(f["a"].topics, vec![0.3, 0.7]);
        assert!(f["a"].structure.is_empty());
    }

    #[test]
    fn isolated_entity_has_zero_structure() {
        let m = model_with(&[("a", vec![1.0]), ("b", vec![1.0]), ("c", vec![1.0])]);
        let mut g = DependencyGraph::new();
        g.add_edge("a", "b").unwrap();
        g.add_node("c").unwrap();
        let f = build_features(&m, &g, 0.5).unwrap();
        assert!(f["c"].structure.iter().all(|&x| x == 0.0));
        assert_eq!(f["a"].structure, vec![0.0, 0.5, 0.0]);
        assert_eq!(f["a"].topics, vec![0.5]);
    }

    #[test]
    fn congruent_entities_have_equal_features() {
        let m = model_with(&[("a", vec![0.2, 0.8]), ("b", vec![0.2, 0.8]), ("h", vec![0.5, 0.5])]);
        let mut g = DependencyGraph::new();
        g.add_edge("a", "h").unwrap();
        g.add_edge("b", "h").unwrap();
        let f = build_features(&m, &g, 0.5).unwrap();
        assert_eq!(f["a"], f["b"]);
        assert!(build_features(&m, &g, 1.5).is_err());
    }

    #[test]
    fn graph_only_entity_gets_uniform_mixture() {
        let m = model_with(&[("a", vec![1.0, 0.0])]);
        let mut g = DependencyGraph::new();
        g.add_edge("a", "x").unwrap();
        let f = build_features(&m, &g, 0.0).unwrap();
        assert_eq!(f["x"].topics, vec![0.5, 0.5]);
    }

    fn features(points: &[(&str, Vec<f64>)]) -> Features {
        points
            .iter()
            .map(|(id, t)| {
                (
                    id.to_string(),
                    FeatureVector {
                        topics: t.clone(),
                        structure: vec![],
                    },
                )
            })
            .collect()
    }

    #[test]
    fn cluster_count_extremes() {
        let f = features(&[("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0]), ("c", vec![0.5, 0.5])]);
        assert_eq!(cluster_entities(&f, 3).unwrap().cluster_count(), 3);
        let one = cluster_entities(&f, 1).unwrap();
        assert_eq!(one.cluster_count(), 1);
        assert_eq!(one.cluster("c0").unwrap().len(), 3);
        assert!(cluster_entities(&f, 0).is_err());
        assert!(cluster_entities(&f, 4).is_err());
    }

    #[test]
    fn identical_pairs_merge_first() {
        let f = features(&[
            ("a", vec![0.9, 0.1]),
            ("b", vec![0.1, 0.9]),
            ("c", vec![0.9, 0.1]),
            ("d", vec![0.1, 0.9]),
        ]);
        let arch = cluster_entities(&f, 2).unwrap();
        let expected = Architecture::from_clusters([("c0", vec!["a", "c"]), ("c1", vec!["b", "d"])]).unwrap();
        assert_eq!(arch, expected);
    }

    #[test]
    fn ties_prefer_smallest_member_pair() {
        // all pairwise distances equal
        let f = features(&[("b", vec![1.0, 0.0]), ("a", vec![1.0, 0.0]), ("c", vec![1.0, 0.0])]);
        let arch = cluster_entities(&f, 2).unwrap();
        assert_eq!(arch.cluster("c0").unwrap().iter().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(arch.cluster("c1").unwrap().iter().collect::<Vec<_>>(), ["c"]);
    }

    /// Naive average linkage: recompute every inter-cluster mean distance.
    fn naive_average_linkage(f: &Features, target: usize) -> BTreeSet<BTreeSet<String>> {
        let ids: Vec<&String> = f.keys().collect();
        let mut clusters: Vec<Vec<usize>> = (0..ids.len()).map(|i| vec![i]).collect();
        let d = |x: usize, y: usize| f[ids[x]].distance(&f[ids[y]]);
        while clusters.len() > target {
            let mut best = (f64::INFINITY, 0, 0);
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    let mut s = 0.0;
                    for &x in &clusters[i] {
                        for &y in &clusters[j] {
                            s += d(x, y);
                        }
                    }
                    let avg = s / (clusters[i].len() * clusters[j].len()) as f64;
                    if avg < best.0 - 1e-12 {
                        best = (avg, i, j);
                    }
                }
            }
            let merged = clusters.remove(best.2);
            clusters[best.1].extend(merged);
        }
        clusters
            .into_iter()
            .map(|c| c.into_iter().map(|i| ids[i].clone()).collect())
            .collect()
    }

    #[test]
    fn matches_naive_average_linkage() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.random_range(3..12);
            let f: Features = (0..n)
                .map(|i| {
                    let a: f64 = rng.random();
                    let s: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                    (format!("e{i:02}"), FeatureVector { topics: vec![a, 1.0 - a], structure: s })
                })
                .collect();
            let target = rng.random_range(1..=n);
            let fast = cluster_entities(&f, target).unwrap().canonical_partition();
            assert_eq!(fast, naive_average_linkage(&f, target));
        }
    }

    #[test]
    fn label_averages_member_mixtures() {
        let m = model_with(&[("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0]), ("s", vec![0.3, 0.7])]);
        let arch = Architecture::from_clusters([("X", vec!["a", "b"]), ("S", vec!["s"])]).unwrap();
        let ca = label_clusters(&arch, &m, 5);
        assert_eq!(ca.clusters["X"], vec![(0, 0.5), (1, 0.5)]);
        assert_eq!(ca.clusters["S"], vec![(1, 0.7), (0, 0.3)]);
    }

    #[test]
    fn top_word_lists_have_requested_length() {
        let corpus = Corpus::from_documents([
            ("a", TokenBag::from([("one".into(), 3), ("two".into(), 1), ("three".into(), 2)])),
            ("b", TokenBag::from([("four".into(), 2), ("five".into(), 2), ("six".into(), 1)])),
        ])
        .unwrap();
        let model = fit_lda(&corpus, LdaParams::new(2, 20, 1)).unwrap();
        let arch = Architecture::from_clusters([("X", vec!["a", "b"])]).unwrap();
        let ca = label_clusters(&arch, &model, 5);
        assert!(ca.topics.values().all(|w| w.len() == 5));
    }

    #[test]
    fn default_cluster_count() {
        let p = ArcParams::default();
        assert_eq!(p.cluster_count_for(200), 20);
        assert_eq!(p.cluster_count_for(7), 2);
        assert_eq!(p.cluster_count_for(1), 1);
        assert_eq!(p.lda().alpha, 0.5);
    }

    #[test]
    fn concern_json_round_trip() {
        let m = model_with(&[("a", vec![0.25, 0.75])]);
        let arch = Architecture::from_clusters([("c0", vec!["a"])]).unwrap();
        let ca = label_clusters(&arch, &m, 1);
        let json = serde_json::to_value(&ca).unwrap();
        assert_eq!(json["clusters"]["c0"][0], serde_json::json!([1, 0.75]));
        assert_eq!(json["topics"]["0"], serde_json::json!(["w"]));
        let back: ConcernAssignment = serde_json::from_value(json).unwrap();
        assert_eq!(back, ca);
    }
}
