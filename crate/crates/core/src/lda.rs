//! Latent Dirichlet Allocation trained by collapsed Gibbs sampling.
//!
//! The sampler keeps three count tables consistent with the per-token topic
//! assignments `z`: doc-topic counts, topic-word counts and topic totals.
//! Each token is resampled from
//!
//! ```text
//! p(z = k | rest) ∝ (n_dk + α) · (n_kw + β) / (n_k + V·β)
//! ```
//!
//! with the token's own assignment removed from every count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{BowDoc, Corpus, Vocabulary};
use crate::error::{Error, Result};
use crate::random::{sample_dirichlet, sample_discrete, seeded, SeededRng};

pub const DEFAULT_TOPICS: usize = 20;
pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_SWEEPS: usize = 100;
pub const MODEL_VERSION: u32 = 1;

/// Symmetric Dirichlet priors and topic count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaHyper {
    pub num_topics: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl LdaHyper {
    pub fn new(num_topics: usize, alpha: f64, beta: f64) -> Result<Self> {
        let h = LdaHyper {
            num_topics,
            alpha,
            beta,
        };
        h.validate()?;
        Ok(h)
    }

    /// `α = 50/K`, `β = 0.01`.
    pub fn with_topics(num_topics: usize) -> Result<Self> {
        Self::new(num_topics, 50.0 / num_topics.max(1) as f64, DEFAULT_BETA)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_topics == 0 {
            return Err(Error::param("number of topics must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::param(format!("beta must be positive, got {}", self.beta)));
        }
        Ok(())
    }
}

impl Default for LdaHyper {
    fn default() -> Self {
        Self::with_topics(DEFAULT_TOPICS).expect("valid defaults")
    }
}

/// Sampler state for one training document.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DocState {
    pub(crate) words: Vec<usize>,
    pub(crate) z: Vec<usize>,
    pub(crate) topic_counts: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct LdaModel {
    hyper: LdaHyper,
    num_terms: usize,
    /// Word-major `V × K` topic-word counts.
    word_topic: Vec<u32>,
    topic_totals: Vec<u64>,
    pub(crate) docs: Vec<DocState>,
    seed: u64,
    pub(crate) rng: SeededRng,
}

/// Log-likelihood at initialization and after each sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaTrace {
    pub initial: f64,
    pub sweeps: Vec<f64>,
}

impl LdaModel {
    /// Assigns every token an independent uniform topic.
    pub fn init(corpus: &Corpus, hyper: LdaHyper, seed: u64) -> Result<Self> {
        hyper.validate()?;
        if corpus.num_docs() == 0 {
            return Err(Error::EmptyCorpus);
        }
        let k = hyper.num_topics;
        let v = corpus.num_terms();
        let mut rng = seeded(seed);
        let mut model = LdaModel {
            hyper,
            num_terms: v,
            word_topic: vec![0; v * k],
            topic_totals: vec![0; k],
            docs: Vec::with_capacity(corpus.num_docs()),
            seed,
            rng: seeded(0),
        };
        for (d, doc) in corpus.docs().iter().enumerate() {
            if doc.is_empty() {
                return Err(Error::EmptyDocument(d));
            }
            let words = doc.expand();
            let mut topic_counts = vec![0u32; k];
            let z: Vec<usize> = words
                .iter()
                .map(|&w| {
                    let t = if k == 1 { 0 } else { rng.random_range(0..k) };
                    topic_counts[t] += 1;
                    model.word_topic[w * k + t] += 1;
                    model.topic_totals[t] += 1;
                    t
                })
                .collect();
            model.docs.push(DocState { words, z, topic_counts });
        }
        model.rng = rng;
        Ok(model)
    }

    pub fn hyper(&self) -> &LdaHyper {
        &self.hyper
    }

    pub fn num_topics(&self) -> usize {
        self.hyper.num_topics
    }

    pub fn num_terms(&self) -> usize {
        self.num_terms
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// True when per-document sampler state is present (not a loaded model).
    pub fn has_doc_state(&self) -> bool {
        !self.docs.is_empty()
    }

    pub fn assignments(&self, d: usize) -> &[usize] {
        &self.docs[d].z
    }

    pub fn doc_words(&self, d: usize) -> &[usize] {
        &self.docs[d].words
    }

    pub fn doc_topic_counts(&self, d: usize) -> &[u32] {
        &self.docs[d].topic_counts
    }

    pub fn topic_word_count(&self, k: usize, w: usize) -> u32 {
        self.word_topic[w * self.num_topics() + k]
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.topic_totals
    }

    pub fn total_tokens(&self) -> u64 {
        self.topic_totals.iter().sum()
    }

    pub(crate) fn remove_token(&mut self, d: usize, i: usize) {
        let k = self.num_topics();
        let doc = &mut self.docs[d];
        let (w, t) = (doc.words[i], doc.z[i]);
        doc.topic_counts[t] -= 1;
        self.word_topic[w * k + t] -= 1;
        self.topic_totals[t] -= 1;
    }

    pub(crate) fn assign_token(&mut self, d: usize, i: usize, t: usize) {
        let k = self.num_topics();
        let doc = &mut self.docs[d];
        let w = doc.words[i];
        doc.z[i] = t;
        doc.topic_counts[t] += 1;
        self.word_topic[w * k + t] += 1;
        self.topic_totals[t] += 1;
    }

    /// Unnormalized collapsed weights for token `i` of document `d`, assuming
    /// the token has already been removed from the counts.
    pub(crate) fn collapsed_weights(&self, d: usize, i: usize, out: &mut [f64]) {
        let k = self.num_topics();
        let LdaHyper { alpha, beta, .. } = self.hyper;
        let vbeta = self.num_terms as f64 * beta;
        let doc = &self.docs[d];
        let row = &self.word_topic[doc.words[i] * k..(doc.words[i] + 1) * k];
        for t in 0..k {
            out[t] =
                (doc.topic_counts[t] as f64 + alpha) * (row[t] as f64 + beta) / (self.topic_totals[t] as f64 + vbeta);
        }
    }

    /// Full conditional of token `i` in document `d` given all other
    /// assignments. The model state is left unchanged.
    pub fn conditional(&mut self, d: usize, i: usize) -> Vec<f64> {
        let current = self.docs[d].z[i];
        self.remove_token(d, i);
        let mut p = vec![0.0; self.num_topics()];
        self.collapsed_weights(d, i, &mut p);
        self.assign_token(d, i, current);
        normalize(&mut p);
        p
    }

    /// Resamples every token once, documents and positions in order.
    pub fn sweep(&mut self) {
        let k = self.num_topics();
        if k == 1 {
            return;
        }
        let mut weights = vec![0.0; k];
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].words.len() {
                self.remove_token(d, i);
                self.collapsed_weights(d, i, &mut weights);
                let t = sample_discrete(&weights, &mut self.rng);
                self.assign_token(d, i, t);
            }
        }
    }

    /// Smoothed topic-word distribution of topic `k` over the whole vocabulary.
    pub fn topic_word_dist(&self, k: usize) -> Vec<f64> {
        let beta = self.hyper.beta;
        let denom = self.topic_totals[k] as f64 + self.num_terms as f64 * beta;
        (0..self.num_terms)
            .map(|w| (self.topic_word_count(k, w) as f64 + beta) / denom)
            .collect()
    }

    /// Top-`n` `(token id, probability)` pairs of topic `k`, ties to the
    /// lower id.
    pub fn topic_words(&self, k: usize, n: usize) -> Vec<(usize, f64)> {
        let mut probs: Vec<(usize, f64)> = self.topic_word_dist(k).into_iter().enumerate().collect();
        probs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        probs.truncate(n);
        probs
    }

    /// Top-`n` words of every topic, resolved against `vocab`.
    pub fn topic_report(&self, vocab: &Vocabulary, n: usize) -> Result<TopicReport> {
        let topics = (0..self.num_topics())
            .map(|k| {
                self.topic_words(k, n)
                    .into_iter()
                    .map(|(id, p)| {
                        let token = vocab.token(id).ok_or(Error::UnknownToken(id))?;
                        Ok((token.to_owned(), p))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TopicReport { topics })
    }

    /// Smoothed topic proportions of training document `d`.
    pub fn doc_topics(&self, d: usize) -> Vec<f64> {
        let alpha = self.hyper.alpha;
        let doc = &self.docs[d];
        let denom = doc.words.len() as f64 + self.num_topics() as f64 * alpha;
        doc.topic_counts.iter().map(|&c| (c as f64 + alpha) / denom).collect()
    }

    /// Plug-in log-likelihood `Σ_tokens ln Σ_k θ_dk φ_kw` of the training
    /// documents, using `corpus` for the observed counts.
    pub fn log_likelihood(&self, corpus: &Corpus) -> Result<f64> {
        if corpus.num_docs() != self.docs.len() {
            return Err(Error::LengthMismatch {
                left: corpus.num_docs(),
                right: self.docs.len(),
            });
        }
        let phi: Vec<Vec<f64>> = (0..self.num_topics()).map(|k| self.topic_word_dist(k)).collect();
        let mut ll = 0.0;
        for (d, doc) in corpus.docs().iter().enumerate() {
            let theta = self.doc_topics(d);
            for &(w, c) in &doc.entries {
                if w >= self.num_terms {
                    return Err(Error::UnknownToken(w));
                }
                let p: f64 = theta.iter().zip(&phi).map(|(t, row)| t * row[w]).sum();
                ll += c as f64 * p.ln();
            }
        }
        Ok(ll)
    }

    /// `exp(-LL / T)`.
    pub fn perplexity(&self, corpus: &Corpus) -> Result<f64> {
        let t = corpus.total_tokens();
        if t == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok((-self.log_likelihood(corpus)? / t as f64).exp())
    }

    /// Infers topic proportions of an unseen document with the topic-word
    /// counts held fixed. Returns the empirical topic frequencies averaged
    /// over the final 20% of sweeps.
    pub fn fold_in(&self, doc: &BowDoc, sweeps: usize, seed: u64) -> Result<Vec<f64>> {
        if sweeps == 0 {
            return Err(Error::param("sweeps must be at least 1"));
        }
        let k = self.num_topics();
        let words = doc.expand();
        if words.is_empty() {
            return Err(Error::EmptyDocument(0));
        }
        if let Some(&w) = words.iter().find(|&&w| w >= self.num_terms) {
            return Err(Error::UnknownToken(w));
        }
        if k == 1 {
            return Ok(vec![1.0]);
        }
        let alpha = self.hyper.alpha;
        let vbeta = self.num_terms as f64 * self.hyper.beta;
        let phi: Vec<Vec<f64>> = words
            .iter()
            .map(|&w| {
                (0..k)
                    .map(|t| {
                        (self.topic_word_count(t, w) as f64 + self.hyper.beta) / (self.topic_totals[t] as f64 + vbeta)
                    })
                    .collect()
            })
            .collect();

        let mut rng = seeded(seed);
        let mut counts = vec![0u32; k];
        let mut z: Vec<usize> = words
            .iter()
            .map(|_| {
                let t = rng.random_range(0..k);
                counts[t] += 1;
                t
            })
            .collect();

        let keep = sweeps.div_ceil(5);
        let mut acc = vec![0.0; k];
        let mut weights = vec![0.0; k];
        for s in 0..sweeps {
            for i in 0..words.len() {
                counts[z[i]] -= 1;
                for t in 0..k {
                    weights[t] = (counts[t] as f64 + alpha) * phi[i][t];
                }
                let t = sample_discrete(&weights, &mut rng);
                z[i] = t;
                counts[t] += 1;
            }
            if s >= sweeps - keep {
                for t in 0..k {
                    acc[t] += counts[t] as f64;
                }
            }
        }
        let total = (keep * words.len()) as f64;
        Ok(acc.into_iter().map(|a| a / total).collect())
    }

    pub fn to_file(&self, include_state: bool) -> LdaModelFile {
        let k = self.num_topics();
        let mut n_kw = vec![0u32; k * self.num_terms];
        for w in 0..self.num_terms {
            for t in 0..k {
                n_kw[t * self.num_terms + w] = self.word_topic[w * k + t];
            }
        }
        let (n_dk, z) = if include_state {
            (
                Some(self.docs.iter().flat_map(|d| d.topic_counts.iter().copied()).collect()),
                Some(self.docs.iter().map(|d| d.z.clone()).collect()),
            )
        } else {
            (None, None)
        };
        LdaModelFile {
            version: MODEL_VERSION,
            num_topics: k,
            num_terms: self.num_terms,
            alpha: self.hyper.alpha,
            beta: self.hyper.beta,
            n_kw,
            n_k: self.topic_totals.clone(),
            seed: self.seed,
            n_dk,
            z,
        }
    }

    /// Rebuilds the topic-word side of a model. Per-document sampler state
    /// is not restored.
    pub fn from_file(file: &LdaModelFile) -> Result<Self> {
        if file.version != MODEL_VERSION {
            return Err(Error::Version(file.version));
        }
        let hyper = LdaHyper::new(file.num_topics, file.alpha, file.beta)?;
        let (k, v) = (file.num_topics, file.num_terms);
        if file.n_kw.len() != k * v || file.n_k.len() != k {
            return Err(Error::param("model count tables do not match K and V"));
        }
        let mut word_topic = vec![0u32; k * v];
        for t in 0..k {
            let row = &file.n_kw[t * v..(t + 1) * v];
            if row.iter().map(|&c| c as u64).sum::<u64>() != file.n_k[t] {
                return Err(Error::param(format!("topic {t}: n_kw row does not sum to n_k")));
            }
            for (w, &c) in row.iter().enumerate() {
                word_topic[w * k + t] = c;
            }
        }
        Ok(LdaModel {
            hyper,
            num_terms: v,
            word_topic,
            topic_totals: file.n_k.clone(),
            docs: Vec::new(),
            seed: file.seed,
            rng: seeded(file.seed),
        })
    }

    /// Checks the three count identities against `z`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let k = self.num_topics();
        let mut word_topic = vec![0u32; self.num_terms * k];
        let mut totals = vec![0u64; k];
        for (d, doc) in self.docs.iter().enumerate() {
            let mut counts = vec![0u32; k];
            for (&w, &t) in doc.words.iter().zip(&doc.z) {
                if t >= k {
                    return Err(format!("doc {d}: topic {t} out of range"));
                }
                counts[t] += 1;
                word_topic[w * k + t] += 1;
                totals[t] += 1;
            }
            if counts != doc.topic_counts {
                return Err(format!("doc {d}: doc-topic counts inconsistent"));
            }
        }
        if word_topic != self.word_topic {
            return Err("topic-word counts inconsistent".into());
        }
        if totals != self.topic_totals {
            return Err("topic totals inconsistent".into());
        }
        Ok(())
    }
}

/// Runs `sweeps` Gibbs sweeps from a seeded random initialization.
pub fn lda_train(corpus: &Corpus, hyper: LdaHyper, sweeps: usize, seed: u64) -> Result<(LdaModel, LdaTrace)> {
    if sweeps == 0 {
        return Err(Error::param("sweeps must be at least 1"));
    }
    let mut model = LdaModel::init(corpus, hyper, seed)?;
    let initial = model.log_likelihood(corpus)?;
    let mut trace = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        model.sweep();
        trace.push(model.log_likelihood(corpus)?);
    }
    Ok((model, LdaTrace { initial, sweeps: trace }))
}

pub(crate) fn normalize(p: &mut [f64]) {
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
}

/// Top words per topic with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicReport {
    pub topics: Vec<Vec<(String, f64)>>,
}

impl TopicReport {
    /// `topic<TAB>rank<TAB>token<TAB>prob` lines, no header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, words) in self.topics.iter().enumerate() {
            for (rank, (token, p)) in words.iter().enumerate() {
                out.push_str(&format!("{k}\t{}\t{token}\t{p:.6}\n", rank + 1));
            }
        }
        out
    }
}

/// On-disk model. `n_kw` is row-major `K × V`; `n_dk` is row-major `M × K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModelFile {
    pub version: u32,
    #[serde(rename = "K")]
    pub num_topics: usize,
    #[serde(rename = "V")]
    pub num_terms: usize,
    pub alpha: f64,
    pub beta: f64,
    pub n_kw: Vec<u32>,
    pub n_k: Vec<u64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_dk: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Vec<usize>>>,
}

/// A corpus drawn from the LDA generative process, with its ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// Token ids per document in generation order.
    pub words: Vec<Vec<usize>>,
    pub z: Vec<Vec<usize>>,
    /// `M × K` document-topic proportions.
    pub theta: Vec<Vec<f64>>,
    /// `K × V` topic-word distributions.
    pub phi: Vec<Vec<f64>>,
}

/// Samples `θ_d ~ Dir(α)`, `φ_k ~ Dir(β)`, then for each of the
/// `tokens_per_doc` positions a topic `z ~ θ_d` and a word `w ~ φ_z`.
pub fn generate_corpus(
    hyper: LdaHyper,
    num_terms: usize,
    num_docs: usize,
    tokens_per_doc: usize,
    seed: u64,
) -> Result<SyntheticCorpus> {
    hyper.validate()?;
    if num_terms == 0 || num_docs == 0 || tokens_per_doc == 0 {
        return Err(Error::param("corpus dimensions must be at least 1"));
    }
    let k = hyper.num_topics;
    let mut rng = seeded(seed);
    let phi: Vec<Vec<f64>> = (0..k)
        .map(|_| sample_dirichlet(hyper.beta, num_terms, &mut rng))
        .collect();
    let mut theta = Vec::with_capacity(num_docs);
    let mut words = Vec::with_capacity(num_docs);
    let mut zs = Vec::with_capacity(num_docs);
    for _ in 0..num_docs {
        let th = sample_dirichlet(hyper.alpha, k, &mut rng);
        let mut doc_words = Vec::with_capacity(tokens_per_doc);
        let mut doc_z = Vec::with_capacity(tokens_per_doc);
        for _ in 0..tokens_per_doc {
            let t = sample_discrete(&th, &mut rng);
            doc_words.push(sample_discrete(&phi[t], &mut rng));
            doc_z.push(t);
        }
        theta.push(th);
        words.push(doc_words);
        zs.push(doc_z);
    }
    let corpus = Corpus::new(words.iter().map(|w| BowDoc::from_ids(w)).collect(), num_terms)?;
    Ok(SyntheticCorpus {
        corpus,
        words,
        z: zs,
        theta,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[&[usize]], v: usize) -> Corpus {
        Corpus::new(docs.iter().map(|d| BowDoc::from_ids(d)).collect(), v).unwrap()
    }

    /// Sets assignments directly, rebuilding counts.
    #[allow(clippy::needless_range_loop)]
    fn with_assignments(model: &mut LdaModel, z: &[&[usize]]) {
        for d in 0..model.docs.len() {
            for i in 0..model.docs[d].z.len() {
                model.remove_token(d, i);
                model.assign_token(d, i, z[d][i]);
            }
        }
        model.check_invariants().unwrap();
    }

    #[test]
    fn hyper_validation() {
        assert!(LdaHyper::new(0, 1.0, 1.0).is_err());
        assert!(LdaHyper::new(2, 0.0, 1.0).is_err());
        assert!(LdaHyper::new(2, 1.0, -1.0).is_err());
        let d = LdaHyper::default();
        assert_eq!(d.num_topics, 20);
        assert!((d.alpha - 2.5).abs() < 1e-15);
        assert_eq!(d.beta, 0.01);
    }

    #[test]
    fn init_single_topic() {
        let c = corpus(&[&[0, 1, 1], &[2]], 3);
        let m = LdaModel::init(&c, LdaHyper::new(1, 0.5, 0.5).unwrap(), 9).unwrap();
        assert!(m.docs.iter().all(|d| d.z.iter().all(|&t| t == 0)));
        assert_eq!(m.topic_totals(), &[4]);
    }

    #[test]
    fn init_conserves_counts_and_is_seeded() {
        let c = corpus(&[&[0, 1, 2], &[2, 2, 1]], 3);
        let h = LdaHyper::new(2, 0.5, 0.5).unwrap();
        let a = LdaModel::init(&c, h, 5).unwrap();
        let b = LdaModel::init(&c, h, 5).unwrap();
        assert_eq!(a.docs, b.docs);
        for d in 0..2 {
            assert_eq!(a.doc_topic_counts(d).iter().sum::<u32>(), 3);
        }
        assert_eq!(a.total_tokens(), 6);
        a.check_invariants().unwrap();
    }

    #[test]
    fn init_rejects_empty() {
        let h = LdaHyper::new(2, 0.5, 0.5).unwrap();
        assert!(matches!(LdaModel::init(&corpus(&[], 3), h, 0), Err(Error::EmptyCorpus)));
        assert!(matches!(
            LdaModel::init(&corpus(&[&[0], &[]], 3), h, 0),
            Err(Error::EmptyDocument(1))
        ));
    }

    #[test]
    fn conditional_single_topic_and_symmetry() {
        let c = corpus(&[&[0, 1]], 2);
        let mut m = LdaModel::init(&c, LdaHyper::new(1, 0.5, 0.5).unwrap(), 0).unwrap();
        assert_eq!(m.conditional(0, 0), vec![1.0]);

        // One token alone: every excluded count is zero.
        let c = corpus(&[&[0]], 2);
        let mut m = LdaModel::init(&c, LdaHyper::new(2, 0.3, 0.7).unwrap(), 0).unwrap();
        assert_eq!(m.conditional(0, 0), vec![0.5, 0.5]);
    }

    #[test]
    fn conditional_matches_hand_computation() {
        // Docs "aab" and "bb" over V=2 (a=0, b=1), K=2, α=β=0.5.
        let c = corpus(&[&[0, 0, 1], &[1, 1]], 2);
        let mut m = LdaModel::init(&c, LdaHyper::new(2, 0.5, 0.5).unwrap(), 0).unwrap();
        with_assignments(&mut m, &[&[0, 1, 0], &[1, 1]]);
        // Token (0,0) = word a, excluded. Remaining: doc0 n_dk=(1,1);
        // n_kw: topic0 {b:1}, topic1 {a:1, b:2}; n_k=(1,3).
        // k=0: (1.5)(0.5)/(2)   = 0.375
        // k=1: (1.5)(1.5)/(4)   = 0.5625
        let want = [0.375 / 0.9375, 0.5625 / 0.9375];
        let got = m.conditional(0, 0);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{got:?}");
        }
        // State is untouched.
        assert_eq!(m.assignments(0), &[0, 1, 0]);
        m.check_invariants().unwrap();
    }

    #[test]
    fn sweep_keeps_invariants() {
        let c = corpus(&[&[0, 1, 2, 2], &[3, 3, 1], &[0, 4]], 5);
        let mut m = LdaModel::init(&c, LdaHyper::new(3, 0.1, 0.1).unwrap(), 1).unwrap();
        for _ in 0..20 {
            m.sweep();
            m.check_invariants().unwrap();
        }
        let mut one = LdaModel::init(&c, LdaHyper::new(1, 0.1, 0.1).unwrap(), 1).unwrap();
        let before = one.docs.clone();
        one.sweep();
        assert_eq!(one.docs, before);
    }

    #[test]
    fn train_rejects_zero_sweeps_and_is_deterministic() {
        let c = corpus(&[&[0, 1, 2, 2], &[3, 3, 1]], 4);
        let h = LdaHyper::new(2, 0.1, 0.1).unwrap();
        assert!(lda_train(&c, h, 0, 0).is_err());
        let (a, ta) = lda_train(&c, h, 10, 3).unwrap();
        let (b, tb) = lda_train(&c, h, 10, 3).unwrap();
        assert_eq!(a.to_file(true), b.to_file(true));
        assert_eq!(ta, tb);
        assert_eq!(ta.sweeps.len(), 10);
    }

    #[test]
    fn topic_words_smoothing() {
        let c = corpus(&[&[0, 0, 0, 1]], 2);
        let mut m = LdaModel::init(&c, LdaHyper::new(2, 0.5, 0.5).unwrap(), 0).unwrap();
        with_assignments(&mut m, &[&[0, 0, 0, 0]]);
        let row = m.topic_words(0, 10);
        assert_eq!(row.len(), 2);
        assert_eq!(row[0].0, 0);
        assert!((row[0].1 - 0.7).abs() < 1e-12 && (row[1].1 - 0.3).abs() < 1e-12);
        // Empty topic is uniform; tie goes to the lower id.
        let row = m.topic_words(1, 1);
        assert_eq!(row, vec![(0, 0.5)]);
        let sum: f64 = m.topic_word_dist(1).iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn doc_topics_values() {
        let c = corpus(&[&[0, 0, 0, 1]], 2);
        let mut m = LdaModel::init(&c, LdaHyper::new(2, 0.5, 0.5).unwrap(), 0).unwrap();
        with_assignments(&mut m, &[&[0, 0, 0, 1]]);
        let th = m.doc_topics(0);
        assert!((th[0] - 0.7).abs() < 1e-12 && (th[1] - 0.3).abs() < 1e-12);
        with_assignments(&mut m, &[&[0, 0, 1, 1]]);
        let m2 = LdaModel {
            hyper: LdaHyper::new(2, 1.0, 0.5).unwrap(),
            ..m.clone()
        };
        assert_eq!(m2.doc_topics(0), vec![0.5, 0.5]);
        let mut m3 = LdaModel {
            hyper: LdaHyper::new(2, 1e-12, 0.5).unwrap(),
            ..m
        };
        with_assignments(&mut m3, &[&[0, 0, 0, 0]]);
        let th = m3.doc_topics(0);
        assert!((th[0] - 1.0).abs() < 1e-9 && th[1] < 1e-9);
    }

    #[test]
    fn likelihood_trivial_models() {
        let c = corpus(&[&[0, 0], &[0]], 1);
        let m = LdaModel::init(&c, LdaHyper::new(1, 0.5, 0.5).unwrap(), 0).unwrap();
        assert_eq!(m.log_likelihood(&c).unwrap(), 0.0);
        assert_eq!(m.perplexity(&c).unwrap(), 1.0);

        // Balanced counts over V=2 with K=1 give a uniform model.
        let c = corpus(&[&[0, 1], &[1, 0, 0, 1]], 2);
        let m = LdaModel::init(&c, LdaHyper::new(1, 0.5, 0.5).unwrap(), 0).unwrap();
        let ll = m.log_likelihood(&c).unwrap();
        assert!((ll + 6.0 * 2f64.ln()).abs() < 1e-12);
        assert!((m.perplexity(&c).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_topic_is_smoothed_unigram() {
        let c = corpus(&[&[0, 0, 2], &[1, 0]], 4);
        let m = LdaModel::init(&c, LdaHyper::new(1, 0.5, 0.25).unwrap(), 0).unwrap();
        let phi = m.topic_word_dist(0);
        let counts = [3.0, 1.0, 1.0, 0.0];
        for (p, c) in phi.iter().zip(counts) {
            assert!((p - (c + 0.25) / (5.0 + 4.0 * 0.25)).abs() < 1e-15);
        }
    }

    #[test]
    fn file_roundtrip_keeps_topics() {
        let c = corpus(&[&[0, 1, 2, 2], &[3, 3, 1]], 4);
        let (m, _) = lda_train(&c, LdaHyper::new(2, 0.1, 0.1).unwrap(), 5, 3).unwrap();
        let file = m.to_file(false);
        assert!(file.z.is_none());
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("\"K\":2") && json.contains("\"V\":4"));
        let back = LdaModel::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        for k in 0..2 {
            assert_eq!(back.topic_word_dist(k), m.topic_word_dist(k));
        }
        let with_state = m.to_file(true);
        assert_eq!(with_state.n_dk.as_ref().unwrap().len(), 4);
        assert_eq!(with_state.z.as_ref().unwrap()[1].len(), 3);

        let mut bad = file.clone();
        bad.n_k[0] += 1;
        assert!(LdaModel::from_file(&bad).is_err());
        bad = file;
        bad.version = 2;
        assert!(matches!(LdaModel::from_file(&bad), Err(Error::Version(2))));
    }

    #[test]
    fn fold_in_basics() {
        let c = corpus(&[&[0, 0, 1], &[1, 1]], 2);
        let (m, _) = lda_train(&c, LdaHyper::new(2, 0.5, 0.5).unwrap(), 5, 1).unwrap();
        let doc = BowDoc::from_ids(&[0, 1]);
        let a = m.fold_in(&doc, 50, 4).unwrap();
        assert_eq!(a, m.fold_in(&doc, 50, 4).unwrap());
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m.fold_in(&BowDoc::default(), 10, 0).is_err());
        assert!(m.fold_in(&BowDoc::from_ids(&[7]), 10, 0).is_err());
        assert!(m.fold_in(&doc, 0, 0).is_err());

        let (one, _) = lda_train(&c, LdaHyper::new(1, 0.5, 0.5).unwrap(), 1, 1).unwrap();
        assert_eq!(one.fold_in(&doc, 10, 0).unwrap(), vec![1.0]);
    }

    #[test]
    fn generator_shapes_and_determinism() {
        let h = LdaHyper::new(3, 0.1, 0.05).unwrap();
        let a = generate_corpus(h, 20, 10, 15, 8).unwrap();
        let b = generate_corpus(h, 20, 10, 15, 8).unwrap();
        assert_eq!(a.words, b.words);
        assert_eq!(a.theta.len(), 10);
        assert_eq!(a.phi.len(), 3);
        assert_eq!(a.corpus.total_tokens(), 150);

        let one = generate_corpus(LdaHyper::new(1, 0.1, 0.05).unwrap(), 5, 3, 4, 1).unwrap();
        assert!(one.theta.iter().all(|t| t == &vec![1.0]));
        assert!(one.z.iter().flatten().all(|&z| z == 0));
        assert!(generate_corpus(h, 0, 1, 1, 0).is_err());
    }

    #[test]
    fn report_tsv_shape() {
        let vocab = Vocabulary::build(&[vec!["a", "b", "c"]]);
        let c = corpus(&[&[0, 1, 2, 2]], 3);
        let (m, _) = lda_train(&c, LdaHyper::new(2, 0.1, 0.1).unwrap(), 3, 0).unwrap();
        let tsv = m.topic_report(&vocab, 2).unwrap().to_tsv();
        assert_eq!(tsv.lines().count(), 4);
        assert!(tsv.lines().all(|l| l.split('\t').count() == 4));
    }
}
