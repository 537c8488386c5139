//! Concern-based smells and a topic-quality audit.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::arc::ConcernAssignment;
use crate::error::{Error, Result};
use crate::lda::TopicModel;
use crate::model::Architecture;
use crate::text::{LicenseLexicon, StopWordSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SmellThresholds {
    /// Minimum weight for a topic to count as a concern of a cluster.
    pub relevance: f64,
    /// A cluster with more distinct concerns than this is overloaded.
    pub overload: usize,
    /// Minimum number of clusters sharing a concern for it to be scattered.
    pub scatter: usize,
    /// Topics at most this divergent are duplicates of each other.
    pub duplicate: f64,
    /// Topics at least this divergent are orthogonal.
    pub orthogonality: f64,
}

impl Default for SmellThresholds {
    fn default() -> Self {
        SmellThresholds {
            relevance: 0.1,
            overload: 5,
            scatter: 3,
            duplicate: 0.1,
            orthogonality: 0.5,
        }
    }
}

impl SmellThresholds {
    /// Weights and divergences lie in [0, 1], so the fractional thresholds
    /// must too; zero would make every topic relevant or orthogonal.
    pub fn validate(&self) -> Result<()> {
        let fractional = [self.relevance, self.duplicate, self.orthogonality]
            .iter()
            .all(|t| *t > 0.0 && *t <= 1.0);
        if !fractional {
            return Err(Error::Config(
                "relevance, duplicate and orthogonality thresholds must lie in (0, 1]".into(),
            ));
        }
        if self.overload == 0 || self.scatter == 0 {
            return Err(Error::Config("overload and scatter thresholds must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SmellKind {
    ConcernOverload,
    ScatteredParasiticFunctionality,
}

/// One topic of one cluster that supports a finding. For scattered
/// functionality, `divergence` is set on the orthogonal co-resident topics
/// and holds their divergence from the scattered one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub cluster: String,
    pub topic: usize,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SmellFinding {
    pub kind: SmellKind,
    pub subjects: Vec<String>,
    /// Overload: number of distinct concerns after merging duplicates.
    /// Scattered: number of clusters sharing the topic.
    pub count: usize,
    /// The scattered topic, for scattered-functionality findings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<usize>,
    pub evidence: Vec<Evidence>,
}

fn relevant(weights: &[(usize, f64)], th: f64) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = weights.iter().copied().filter(|(_, w)| *w >= th).collect();
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Number of groups left after merging topics whose divergence is at most
/// `dup_th` (transitively).
fn distinct_concerns(ca: &ConcernAssignment, topics: &[usize], dup_th: f64) -> usize {
    let mut parent: Vec<usize> = (0..topics.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..topics.len() {
        for j in i + 1..topics.len() {
            if ca.divergence(topics[i], topics[j]) <= dup_th {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..topics.len()).filter(|&i| find(&mut parent, i) == i).count()
}

/// Clusters whose distinct relevant concerns exceed `th.overload`.
pub fn detect_concern_overload(ca: &ConcernAssignment, th: &SmellThresholds) -> Vec<SmellFinding> {
    let mut out = Vec::new();
    for (cluster, weights) in &ca.clusters {
        let rel = relevant(weights, th.relevance);
        let topics: Vec<usize> = rel.iter().map(|(k, _)| *k).collect();
        let count = distinct_concerns(ca, &topics, th.duplicate);
        if count > th.overload {
            out.push(SmellFinding {
                kind: SmellKind::ConcernOverload,
                subjects: vec![cluster.clone()],
                count,
                topic: None,
                evidence: rel
                    .into_iter()
                    .map(|(topic, weight)| Evidence {
                        cluster: cluster.clone(),
                        topic,
                        weight,
                        divergence: None,
                    })
                    .collect(),
            });
        }
    }
    out
}

/// Topics relevant in at least `th.scatter` clusters where one of those
/// clusters also holds a relevant topic orthogonal to it.
///
/// Clusters not in `arch` are ignored.
pub fn detect_scattered_parasitic(arch: &Architecture, ca: &ConcernAssignment, th: &SmellThresholds) -> Vec<SmellFinding> {
    let relevant_by_cluster: BTreeMap<&str, Vec<(usize, f64)>> = ca
        .clusters
        .iter()
        .filter(|(c, _)| arch.cluster(c).is_some())
        .map(|(c, ws)| (c.as_str(), relevant(ws, th.relevance)))
        .collect();
    let mut holders: BTreeMap<usize, Vec<(&str, f64)>> = BTreeMap::new();
    for (c, rel) in &relevant_by_cluster {
        for (k, w) in rel {
            holders.entry(*k).or_default().push((c, *w));
        }
    }

    let mut out = Vec::new();
    for (t, clusters) in holders {
        if clusters.len() < th.scatter {
            continue;
        }
        let mut orthogonal = Vec::new();
        for (c, _) in &clusters {
            for (u, w) in &relevant_by_cluster[c] {
                if *u == t {
                    continue;
                }
                let d = ca.divergence(t, *u);
                if d >= th.orthogonality {
                    orthogonal.push(Evidence {
                        cluster: c.to_string(),
                        topic: *u,
                        weight: *w,
                        divergence: Some(d),
                    });
                }
            }
        }
        if orthogonal.is_empty() {
            continue;
        }
        let mut evidence: Vec<Evidence> = clusters
            .iter()
            .map(|(c, w)| Evidence {
                cluster: c.to_string(),
                topic: t,
                weight: *w,
                divergence: None,
            })
            .collect();
        evidence.extend(orthogonal);
        out.push(SmellFinding {
            kind: SmellKind::ScatteredParasiticFunctionality,
            subjects: clusters.iter().map(|(c, _)| c.to_string()).collect(),
            count: clusters.len(),
            topic: Some(t),
            evidence,
        });
    }
    out
}

/// Both detectors, overload findings first.
pub fn detect_smells(arch: &Architecture, ca: &ConcernAssignment, th: &SmellThresholds) -> Vec<SmellFinding> {
    let mut out = detect_concern_overload(ca, th);
    out.retain(|f| f.subjects.iter().all(|s| arch.cluster(s).is_some()));
    out.extend(detect_scattered_parasitic(arch, ca, th));
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TopicAuditReport {
    pub license_topics: Vec<usize>,
    pub system_name_topics: Vec<usize>,
    pub duplicate_topic_pairs: Vec<(usize, usize)>,
    pub junk_topics: Vec<usize>,
}

impl TopicAuditReport {
    pub fn is_clean(&self) -> bool {
        self.license_topics.is_empty()
            && self.system_name_topics.is_empty()
            && self.duplicate_topic_pairs.is_empty()
            && self.junk_topics.is_empty()
    }
}

/// Audit over topic word lists (already truncated to the top words) and a
/// pairwise divergence.
pub fn audit_word_lists(
    words: &[Vec<String>],
    divergence: impl Fn(usize, usize) -> f64,
    stops: &StopWordSet,
    lexicon: &LicenseLexicon,
    dup_th: f64,
) -> TopicAuditReport {
    let auto = stops.auto_forms();
    let mut report = TopicAuditReport::default();
    for (k, top) in words.iter().enumerate() {
        if top.is_empty() {
            continue;
        }
        let license_hits = top.iter().filter(|w| lexicon.contains(w)).count();
        if 2 * license_hits >= top.len() {
            report.license_topics.push(k);
        }
        if top.iter().any(|w| auto.contains(w)) {
            report.system_name_topics.push(k);
        }
        let chars: usize = top.iter().map(|w| w.chars().count()).sum();
        if chars <= 2 * top.len() {
            report.junk_topics.push(k);
        }
    }
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if divergence(i, j) <= dup_th {
                report.duplicate_topic_pairs.push((i, j));
            }
        }
    }
    report
}

/// Flags license-derived, system-name, duplicate and junk topics among the
/// top `w` words of each topic.
pub fn topic_quality_audit(
    model: &TopicModel,
    stops: &StopWordSet,
    lexicon: &LicenseLexicon,
    dup_th: f64,
    w: usize,
) -> TopicAuditReport {
    let words: Vec<Vec<String>> = (0..model.topic_count()).map(|k| model.top_words(k, w)).collect();
    let div = model.topic_divergence();
    audit_word_lists(&words, |a, b| div[a][b], stops, lexicon, dup_th)
}

/// The same audit from a concerns file.
pub fn audit_concerns(ca: &ConcernAssignment, stops: &StopWordSet, lexicon: &LicenseLexicon, dup_th: f64) -> TopicAuditReport {
    let k = ca.topic_count();
    let words: Vec<Vec<String>> = (0..k).map(|t| ca.topics.get(&t).cloned().unwrap_or_default()).collect();
    audit_word_lists(&words, |a, b| ca.divergence(a, b), stops, lexicon, dup_th)
}

/// Distinct topics named in findings, for summaries.
pub fn topics_involved(findings: &[SmellFinding]) -> BTreeSet<usize> {
    findings.iter().flat_map(|f| f.evidence.iter().map(|e| e.topic)).collect()
}
