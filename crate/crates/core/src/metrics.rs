//! Structural similarity between architectures.
//!
//! * `mto` / `a2a`: minimum transform operations between two architectures
//!   whose entity universes may differ, and its normalisation against the
//!   cost of building both from nothing.
//! * `c2c` / `simC` / `cvg`: cluster overlap and the share of clusters that
//!   have a similar counterpart.
//! * MoJo / MoJoFM: Move-Join distance between partitions of one entity set
//!   and its normalisation against the worst possible partition.
//!
//! Cluster names never matter; clusters are matched by content.

use std::collections::BTreeSet;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Architecture, TransformOps};

/// Maximum-weight assignment of rows to columns. Returns (row, column)
/// pairs. Works for either orientation of the matrix.
fn max_weight_matching(weights: &[Vec<i64>], rows: usize, cols: usize) -> Vec<(usize, usize)> {
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    if rows <= cols {
        let m = Matrix::from_rows(weights.iter().cloned()).expect("rectangular weights");
        let (_, assign) = kuhn_munkres(&m);
        assign.into_iter().enumerate().collect()
    } else {
        let transposed: Vec<Vec<i64>> = (0..cols)
            .map(|c| (0..rows).map(|r| weights[r][c]).collect())
            .collect();
        let m = Matrix::from_rows(transposed).expect("rectangular weights");
        let (_, assign) = kuhn_munkres(&m);
        assign.into_iter().enumerate().map(|(c, r)| (r, c)).collect()
    }
}

fn overlap_matrix(a: &Architecture, b: &Architecture) -> Vec<Vec<usize>> {
    a.clusters()
        .values()
        .map(|ca| {
            b.clusters()
                .values()
                .map(|cb| ca.intersection(cb).count())
                .collect()
        })
        .collect()
}

/// Minimum number of cluster additions/removals and entity
/// additions/removals/moves turning `a1` into `a2`.
///
/// An added entity costs an addition plus a move into its cluster; a removed
/// one a move out plus a removal. Clusters of `a1` are paired with clusters
/// of `a2` by a maximum-weight matching; a paired cluster survives (possibly
/// after every member changes), so each pair saves one addition and one
/// removal plus one move per shared entity.
pub fn mto(a1: &Architecture, a2: &Architecture) -> TransformOps {
    let e1 = a1.entity_set();
    let e2 = a2.entity_set();
    let common = e1.intersection(&e2).count();
    let add_e = e2.len() - common;
    let rem_e = e1.len() - common;

    let overlap = overlap_matrix(a1, a2);
    let weights: Vec<Vec<i64>> = overlap
        .iter()
        .map(|row| row.iter().map(|&w| w as i64 + 2).collect())
        .collect();
    let matching = max_weight_matching(&weights, a1.cluster_count(), a2.cluster_count());
    let preserved: usize = matching.iter().map(|&(r, c)| overlap[r][c]).sum();
    let matched = matching.len();

    TransformOps {
        add_c: a2.cluster_count() - matched,
        rem_c: a1.cluster_count() - matched,
        add_e,
        rem_e,
        mov_e: (common - preserved) + add_e + rem_e,
    }
}

/// Result of a similarity measure, a percentage in [0, 100].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<Breakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Breakdown {
    #[serde(rename_all = "camelCase")]
    Transform {
        ops: TransformOps,
        total: usize,
        /// mto(A_null, A1) + mto(A_null, A2)
        normalizer: usize,
    },
    #[serde(rename_all = "camelCase")]
    Coverage {
        threshold: f64,
        /// Clusters of the first architecture with a similar cluster in the
        /// second, with that cluster and their overlap.
        matched: Vec<(String, String, f64)>,
        cluster_count: usize,
    },
    #[serde(rename_all = "camelCase")]
    Mojo { mno: usize, max_mno: usize },
}

/// a2a similarity. Two null architectures are identical (100).
pub fn a2a(a1: &Architecture, a2: &Architecture) -> SimilarityResult {
    let ops = mto(a1, a2);
    let null = Architecture::empty();
    let normalizer = mto(&null, a1).total() + mto(&null, a2).total();
    let value = if normalizer == 0 {
        100.0
    } else {
        (1.0 - ops.total() as f64 / normalizer as f64) * 100.0
    };
    SimilarityResult {
        value,
        breakdown: Some(Breakdown::Transform {
            ops,
            total: ops.total(),
            normalizer,
        }),
    }
}

/// Overlap of two entity sets: |c1 ∩ c2| / max(|c1|, |c2|) × 100.
pub fn c2c(c1: &BTreeSet<String>, c2: &BTreeSet<String>) -> f64 {
    let denom = c1.len().max(c2.len());
    if denom == 0 {
        return 0.0;
    }
    c1.intersection(c2).count() as f64 / denom as f64 * 100.0
}

/// Threshold for calling two clusters similar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvgParams {
    pub threshold: f64,
}

impl CvgParams {
    pub fn new(threshold: f64) -> Result<Self> {
        if threshold > 0.0 && threshold < 1.0 {
            Ok(CvgParams { threshold })
        } else {
            Err(Error::Config(format!("cvg threshold {threshold} must lie in (0, 1)")))
        }
    }
}

impl Default for CvgParams {
    fn default() -> Self {
        CvgParams { threshold: 0.5 }
    }
}

fn similar_clusters(a1: &Architecture, a2: &Architecture, params: CvgParams) -> Vec<(String, String, f64)> {
    let mut out = Vec::new();
    for (n1, c1) in a1.clusters() {
        let best = a2
            .clusters()
            .iter()
            .filter_map(|(n2, c2)| {
                let shared = c1.intersection(c2).count();
                // shared / max > th, kept in integer-friendly form
                let similar = shared as f64 > params.threshold * c1.len().max(c2.len()) as f64;
                similar.then(|| (n2, c2c(c1, c2)))
            })
            .fold(None::<(&String, f64)>, |best, (n, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((n, v)),
            });
        if let Some((n2, v)) = best {
            out.push((n1.clone(), n2.clone(), v));
        }
    }
    out
}

/// Clusters of `a1` with at least one cluster of `a2` whose c2c exceeds the
/// threshold.
pub fn sim_c(a1: &Architecture, a2: &Architecture, params: CvgParams) -> BTreeSet<String> {
    similar_clusters(a1, a2, params).into_iter().map(|(n, _, _)| n).collect()
}

/// Cluster coverage of `a1` by `a2`. Not symmetric.
pub fn cvg(a1: &Architecture, a2: &Architecture, params: CvgParams) -> Result<SimilarityResult> {
    if a1.is_empty() {
        return Err(Error::UndefinedInput("cvg is undefined for an architecture without clusters".into()));
    }
    let matched = similar_clusters(a1, a2, params);
    Ok(SimilarityResult {
        value: matched.len() as f64 / a1.cluster_count() as f64 * 100.0,
        breakdown: Some(Breakdown::Coverage {
            threshold: params.threshold,
            matched,
            cluster_count: a1.cluster_count(),
        }),
    })
}

fn require_same_universe(a: &Architecture, b: &Architecture) -> Result<()> {
    let ea = a.entity_set();
    let eb = b.entity_set();
    if ea != eb {
        return Err(Error::UniverseMismatch {
            only_left: ea.difference(&eb).count(),
            only_right: eb.difference(&ea).count(),
        });
    }
    Ok(())
}

/// Minimum number of Move and Join operations turning partition `a` into
/// `b`.
///
/// Each cluster of `a` is tagged with the clusters of `b` it shares the most
/// entities with; a maximum matching over those tags decides how many
/// distinct groups survive. Entities outside their cluster's tag must move,
/// and every additional cluster in a group costs one join.
pub fn mojo_distance(a: &Architecture, b: &Architecture) -> Result<usize> {
    require_same_universe(a, b)?;
    let overlap = overlap_matrix(a, b);
    let mut kept = 0usize;
    let tags: Vec<Vec<i64>> = overlap
        .iter()
        .map(|row| {
            let best = row.iter().copied().max().unwrap_or(0);
            kept += best;
            row.iter().map(|&w| i64::from(w == best && best > 0)).collect()
        })
        .collect();
    let groups: usize = max_weight_matching(&tags, a.cluster_count(), b.cluster_count())
        .into_iter()
        .filter(|&(r, c)| tags[r][c] == 1)
        .count();
    let moves = a.entity_count() - kept;
    let joins = a.cluster_count() - groups;
    Ok(moves + joins)
}

/// Largest MoJo distance from any partition of the same entities to `b`:
/// n − min over k of (k + size of the (k+1)-th largest cluster of `b`).
pub fn max_mojo_distance(b: &Architecture) -> usize {
    let mut sizes: Vec<usize> = b.clusters().values().map(BTreeSet::len).collect();
    sizes.sort_unstable_by(|x, y| y.cmp(x));
    sizes.push(0);
    let best = sizes.iter().enumerate().map(|(k, &m)| k + m).min().unwrap_or(0);
    b.entity_count() - best
}

/// MoJoFM of `a` against reference `b`.
pub fn mojofm(a: &Architecture, b: &Architecture) -> Result<SimilarityResult> {
    let mno = mojo_distance(a, b)?;
    let max_mno = max_mojo_distance(b);
    let value = if max_mno == 0 {
        100.0
    } else {
        (1.0 - mno as f64 / max_mno as f64) * 100.0
    };
    Ok(SimilarityResult {
        value,
        breakdown: Some(Breakdown::Mojo { mno, max_mno }),
    })
}
