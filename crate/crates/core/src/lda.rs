//! Latent Dirichlet Allocation fitted by collapsed Gibbs sampling.
//!
//! Tokens are visited in a fixed order (documents by id, tokens in sorted
//! order with repetition) and all randomness comes from one ChaCha generator
//! seeded by the caller, so a fit is a pure function of its inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LdaParams {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaParams {
    /// Symmetric priors alpha = 50/K, beta = 0.01.
    pub fn new(topics: usize, iterations: usize, seed: u64) -> Self {
        LdaParams {
            topics,
            alpha: 50.0 / topics.max(1) as f64,
            beta: 0.01,
            iterations,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.topics == 0 {
            return Err(Error::Config("topic count must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iteration count must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) || !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::Config("alpha and beta must be positive".into()));
        }
        Ok(())
    }
}

/// Fitted model: per-document topic mixtures and per-topic word
/// distributions over the sorted vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TopicModel {
    pub params: LdaParams,
    pub vocabulary: Vec<String>,
    pub doc_topic: BTreeMap<String, Vec<f64>>,
    pub topic_word: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl TopicModel {
    pub fn topic_count(&self) -> usize {
        self.params.topics
    }

    /// Uniform mixture used for entities without a document.
    pub fn uniform_mixture(&self) -> Vec<f64> {
        vec![1.0 / self.params.topics as f64; self.params.topics]
    }

    pub fn mixture_of(&self, id: &str) -> Vec<f64> {
        self.doc_topic.get(id).cloned().unwrap_or_else(|| self.uniform_mixture())
    }

    /// The `w` most probable words of topic `k`, ties broken by word order.
    pub fn top_words(&self, k: usize, w: usize) -> Vec<String> {
        let dist = &self.topic_word[k];
        let mut idx: Vec<usize> = (0..dist.len()).collect();
        idx.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
        idx.into_iter().take(w).map(|i| self.vocabulary[i].clone()).collect()
    }

    /// Pairwise Jensen–Shannon divergence between topic word distributions.
    #[allow(clippy::needless_range_loop)]
    pub fn topic_divergence(&self) -> Vec<Vec<f64>> {
        let k = self.params.topics;
        let mut m = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let d = js_divergence(&self.topic_word[i], &self.topic_word[j]);
                m[i][j] = d;
                m[j][i] = d;
            }
        }
        m
    }
}

/// Jensen–Shannon divergence in bits.
///
/// For probability vectors the result lies in [0, 1]. The formula is
/// homogeneous: scaling both inputs by `c` scales the result by `c`.
pub fn js_divergence(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut sum = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = a + b;
        if a > 0.0 {
            sum += a * (2.0 * a / m).log2();
        }
        if b > 0.0 {
            sum += b * (2.0 * b / m).log2();
        }
    }
    (0.5 * sum).max(0.0)
}

/// Collapsed Gibbs sampler state. Exposed so callers can observe the chain
/// between sweeps; [`fit_lda`] is the usual entry point.
pub struct GibbsSampler {
    params: LdaParams,
    vocabulary: Vec<String>,
    doc_ids: Vec<String>,
    docs: Vec<Vec<usize>>,
    assignments: Vec<Vec<usize>>,
    doc_topic_counts: Vec<Vec<u32>>,
    // word-major: word * K + topic
    word_topic_counts: Vec<u32>,
    topic_totals: Vec<u32>,
    rng: ChaCha8Rng,
    sweeps: usize,
    weights: Vec<f64>,
    warnings: Vec<String>,
}

impl GibbsSampler {
    /// Builds the sampler and draws the initial topic assignment.
    pub fn new(corpus: &Corpus, params: LdaParams) -> Result<Self> {
        params.validate()?;
        if corpus.is_empty() {
            return Err(Error::Config("cannot fit a topic model to an empty corpus".into()));
        }
        let k = params.topics;
        let vocabulary: Vec<String> = corpus.vocabulary().into_iter().map(String::from).collect();
        let index: BTreeMap<&str, usize> =
            vocabulary.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let mut warnings = Vec::new();
        if k > vocabulary.len() {
            warnings.push(format!(
                "{k} topics requested for a vocabulary of {} words",
                vocabulary.len()
            ));
        }

        let mut doc_ids = Vec::with_capacity(corpus.len());
        let mut docs = Vec::with_capacity(corpus.len());
        for (id, bag) in corpus.documents() {
            doc_ids.push(id.clone());
            let mut tokens = Vec::new();
            for (word, &count) in bag {
                tokens.extend(std::iter::repeat_n(index[word.as_str()], count as usize));
            }
            docs.push(tokens);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut doc_topic_counts = vec![vec![0u32; k]; docs.len()];
        let mut word_topic_counts = vec![0u32; vocabulary.len() * k];
        let mut topic_totals = vec![0u32; k];
        let mut assignments = Vec::with_capacity(docs.len());
        for (d, tokens) in docs.iter().enumerate() {
            let mut z = Vec::with_capacity(tokens.len());
            for &w in tokens {
                let t = rng.random_range(0..k);
                doc_topic_counts[d][t] += 1;
                word_topic_counts[w * k + t] += 1;
                topic_totals[t] += 1;
                z.push(t);
            }
            assignments.push(z);
        }

        Ok(GibbsSampler {
            params,
            vocabulary,
            doc_ids,
            docs,
            assignments,
            doc_topic_counts,
            word_topic_counts,
            topic_totals,
            rng,
            sweeps: 0,
            weights: vec![0.0; k],
            warnings,
        })
    }

    /// One pass over every token, resampling its topic from the collapsed
    /// conditional.
    pub fn sweep(&mut self) {
        let k = self.params.topics;
        let alpha = self.params.alpha;
        let beta = self.params.beta;
        let v_beta = self.vocabulary.len() as f64 * beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i];
                let old = self.assignments[d][i];
                self.doc_topic_counts[d][old] -= 1;
                self.word_topic_counts[w * k + old] -= 1;
                self.topic_totals[old] -= 1;

                let dt = &self.doc_topic_counts[d];
                let wt = &self.word_topic_counts[w * k..(w + 1) * k];
                let mut total = 0.0;
                for t in 0..k {
                    let p = (f64::from(dt[t]) + alpha) * (f64::from(wt[t]) + beta)
                        / (f64::from(self.topic_totals[t]) + v_beta);
                    total += p;
                    self.weights[t] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.assignments[d][i] = new;
                self.doc_topic_counts[d][new] += 1;
                self.word_topic_counts[w * k + new] += 1;
                self.topic_totals[new] += 1;
            }
        }
        self.sweeps += 1;
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweeps
    }

    /// Tokens currently assigned to some topic.
    pub fn assigned_tokens(&self) -> u64 {
        self.topic_totals.iter().map(|&n| u64::from(n)).sum()
    }

    /// Per-topic totals recomputed from the assignment vectors.
    pub fn assignment_histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.params.topics];
        for z in &self.assignments {
            for &t in z {
                h[t] += 1;
            }
        }
        h
    }

    /// Smoothed point estimates from the current counts.
    pub fn estimate(&self) -> TopicModel {
        let k = self.params.topics;
        let (alpha, beta) = (self.params.alpha, self.params.beta);
        let v = self.vocabulary.len();

        let mut doc_topic = BTreeMap::new();
        for (d, id) in self.doc_ids.iter().enumerate() {
            let raw: Vec<f64> = self.doc_topic_counts[d]
                .iter()
                .map(|&n| f64::from(n) + alpha)
                .collect();
            doc_topic.insert(id.clone(), normalized(raw));
        }
        let topic_word = (0..k)
            .map(|t| {
                normalized(
                    (0..v)
                        .map(|w| f64::from(self.word_topic_counts[w * k + t]) + beta)
                        .collect(),
                )
            })
            .collect();
        TopicModel {
            params: self.params,
            vocabulary: self.vocabulary.clone(),
            doc_topic,
            topic_word,
            warnings: self.warnings.clone(),
        }
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        v.iter_mut().for_each(|x| *x /= sum);
    } else if !v.is_empty() {
        let u = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x = u);
    }
    v
}

/// Fits a topic model with `params.iterations` sweeps.
pub fn fit_lda(corpus: &Corpus, params: LdaParams) -> Result<TopicModel> {
    let mut sampler = GibbsSampler::new(corpus, params)?;
    for _ in 0..params.iterations {
        sampler.sweep();
    }
    Ok(sampler.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::TokenBag;

    fn bag(words: &[(&str, u32)]) -> TokenBag {
        words.iter().map(|(w, n)| (w.to_string(), *n)).collect()
    }

    fn small_corpus() -> Corpus {
        Corpus::from_documents([
            ("a", bag(&[("file", 3), ("path", 2)])),
            ("b", bag(&[("file", 1), ("disk", 4)])),
            ("c", bag(&[("socket", 3), ("http", 2)])),
            ("d", bag(&[("socket", 2), ("port", 2), ("http", 1)])),
        ])
        .unwrap()
    }

    #[test]
    fn single_topic_is_degenerate() {
        let m = fit_lda(&small_corpus(), LdaParams::new(1, 5, 1)).unwrap();
        for v in m.doc_topic.values() {
            assert_eq!(v, &vec![1.0]);
        }
    }

    #[test]
    fn identical_documents_get_identical_mixtures() {
        let c = Corpus::from_documents([
            ("x", bag(&[("alpha", 2), ("beta", 1)])),
            ("y", bag(&[("alpha", 2), ("beta", 1)])),
            ("z", bag(&[("gamma", 3)])),
        ])
        .unwrap();
        let m = fit_lda(&c, LdaParams::new(1, 3, 9)).unwrap();
        assert_eq!(m.doc_topic["x"], m.doc_topic["y"]);
    }

    #[test]
    fn fit_is_deterministic() {
        let p = LdaParams::new(3, 30, 42);
        let a = fit_lda(&small_corpus(), p).unwrap();
        let b = fit_lda(&small_corpus(), p).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = fit_lda(&small_corpus(), LdaParams { seed: 43, ..p }).unwrap();
        assert_ne!(a.doc_topic, c.doc_topic);
    }

    #[test]
    fn counts_conserved_and_distributions_normalized() {
        let corpus = small_corpus();
        let mut s = GibbsSampler::new(&corpus, LdaParams::new(4, 10, 7)).unwrap();
        for _ in 0..10 {
            s.sweep();
            assert_eq!(s.assigned_tokens(), corpus.total_tokens());
            assert_eq!(s.assignment_histogram().iter().sum::<u64>(), corpus.total_tokens());
        }
        let m = s.estimate();
        for v in m.doc_topic.values().chain(m.topic_word.iter()) {
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(v.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn empty_document_is_uniform_and_too_many_topics_warns() {
        let c = Corpus::from_documents([("e", TokenBag::new()), ("f", bag(&[("word", 2)]))]).unwrap();
        let m = fit_lda(&c, LdaParams::new(4, 2, 1)).unwrap();
        assert!(m.doc_topic["e"].iter().all(|&x| (x - 0.25).abs() < 1e-12));
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn parameter_validation() {
        assert!(fit_lda(&small_corpus(), LdaParams::new(0, 1, 1)).is_err());
        assert!(fit_lda(&small_corpus(), LdaParams::new(2, 0, 1)).is_err());
        assert!(fit_lda(&Corpus::new(), LdaParams::new(2, 1, 1)).is_err());
    }

    #[test]
    fn js_divergence_bounds() {
        assert_eq!(js_divergence(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!((js_divergence(&[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-12);
        let d = js_divergence(&[0.2, 0.8], &[0.6, 0.4]);
        assert!((js_divergence(&[0.1, 0.4], &[0.3, 0.2]) - 0.5 * d).abs() < 1e-12);
    }

    #[test]
    fn top_words_descend() {
        let m = fit_lda(&small_corpus(), LdaParams::new(2, 50, 3)).unwrap();
        for k in 0..2 {
            let words = m.top_words(k, 5);
            assert_eq!(words.len(), 5);
            let idx: Vec<usize> = words
                .iter()
                .map(|w| m.vocabulary.iter().position(|v| v == w).unwrap())
                .collect();
            for pair in idx.windows(2) {
                assert!(m.topic_word[k][pair[0]] >= m.topic_word[k][pair[1]]);
            }
        }
    }
}
