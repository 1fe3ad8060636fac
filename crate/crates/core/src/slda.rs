//! Supervised LDA with a Gaussian response, trained by stochastic EM.
//!
//! Each EM iteration is one Gibbs sweep in which every token's conditional
//! is the LDA collapsed factor times the Gaussian likelihood of the
//! document's response under the candidate assignment, followed by a ridge
//! least-squares update of the regression coefficients on the empirical
//! topic frequencies.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::{BowDoc, Corpus, Vocabulary};
use crate::error::{Error, Result};
use crate::lda::{generate_corpus, normalize, LdaHyper, LdaModel, LdaModelFile, SyntheticCorpus};
use crate::random::{sample_discrete, seeded, stream_seed};

pub const DEFAULT_SIGMA2: f64 = 0.01;
pub const RIDGE_LAMBDA: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SldaModel {
    pub base: LdaModel,
    pub eta: Vec<f64>,
    pub sigma2: f64,
}

/// One row of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmRecord {
    pub iter: usize,
    pub mae: f64,
    pub neg_loglik: f64,
}

/// Per-topic empirical frequencies of one document's assignments.
pub fn zbar_of(assignments: &[usize], num_topics: usize) -> Result<Vec<f64>> {
    if assignments.is_empty() {
        return Err(Error::EmptyDocument(0));
    }
    let mut zbar = vec![0.0; num_topics];
    for &t in assignments {
        if t >= num_topics {
            return Err(Error::param(format!("topic {t} out of range for K={num_topics}")));
        }
        zbar[t] += 1.0;
    }
    let n = assignments.len() as f64;
    zbar.iter_mut().for_each(|x| *x /= n);
    Ok(zbar)
}

/// Ridge regression of `ys` on the rows of `zbars` with `λ = 1e-6`.
pub fn update_eta(zbars: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    update_eta_ridge(zbars, ys, RIDGE_LAMBDA)
}

/// Solves `(ZᵀZ + λI) η = Zᵀy` by Cholesky factorization.
pub fn update_eta_ridge(zbars: &[Vec<f64>], ys: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if zbars.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if zbars.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: zbars.len(),
            right: ys.len(),
        });
    }
    let k = zbars[0].len();
    if zbars.iter().any(|r| r.len() != k) {
        return Err(Error::param("ragged topic-frequency matrix"));
    }
    if zbars.iter().flatten().chain(ys).any(|x| !x.is_finite()) {
        return Err(Error::Solver("non-finite input".into()));
    }
    let z = DMatrix::from_fn(zbars.len(), k, |i, j| zbars[i][j]);
    let y = DVector::from_column_slice(ys);
    let mut gram = z.transpose() * &z;
    for j in 0..k {
        gram[(j, j)] += lambda;
    }
    let rhs = z.transpose() * y;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Solver("normal matrix not positive definite".into()))?;
    let eta = chol.solve(&rhs);
    if eta.iter().any(|x| !x.is_finite()) {
        return Err(Error::Solver("non-finite solution".into()));
    }
    Ok(eta.iter().copied().collect())
}

pub fn mae(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::param("mae of an empty set"));
    }
    let total: f64 = predictions.iter().zip(labels).map(|(p, y)| (p - y).abs()).sum();
    Ok(total / predictions.len() as f64)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SldaModel {
    /// LDA initialization with `η = 0`.
    pub fn init(corpus: &Corpus, hyper: LdaHyper, sigma2: f64, seed: u64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::param(format!("sigma2 must be positive, got {sigma2}")));
        }
        let base = LdaModel::init(corpus, hyper, seed)?;
        Ok(SldaModel {
            eta: vec![0.0; hyper.num_topics],
            base,
            sigma2,
        })
    }

    pub fn num_topics(&self) -> usize {
        self.base.num_topics()
    }

    /// Multiplies the collapsed weights of the (removed) token `i` in
    /// document `d` by the Gaussian response factor. Exponents are shifted
    /// by their maximum, so a constant factor leaves the weights untouched.
    fn response_weights(&self, d: usize, y: f64, weights: &mut [f64], logs: &mut [f64]) {
        let counts = self.base.doc_topic_counts(d);
        let n = self.base.doc_words(d).len() as f64;
        let partial: f64 = counts.iter().zip(&self.eta).map(|(&c, e)| c as f64 * e).sum();
        let mut max = f64::NEG_INFINITY;
        for (t, l) in logs.iter_mut().enumerate() {
            let resid = y - (partial + self.eta[t]) / n;
            *l = -resid * resid / (2.0 * self.sigma2);
            max = max.max(*l);
        }
        for (w, l) in weights.iter_mut().zip(logs.iter()) {
            *w *= (l - max).exp();
        }
    }

    /// Full conditional of token `i` of document `d` given response `y`.
    pub fn conditional(&mut self, d: usize, i: usize, y: f64) -> Vec<f64> {
        let k = self.num_topics();
        let current = self.base.assignments(d)[i];
        self.base.remove_token(d, i);
        let mut p = vec![0.0; k];
        let mut logs = vec![0.0; k];
        self.base.collapsed_weights(d, i, &mut p);
        self.response_weights(d, y, &mut p, &mut logs);
        self.base.assign_token(d, i, current);
        normalize(&mut p);
        p
    }

    /// One Gibbs sweep over all training tokens with responses `ys`.
    pub fn sweep(&mut self, ys: &[f64]) {
        let k = self.num_topics();
        if k == 1 {
            return;
        }
        let mut weights = vec![0.0; k];
        let mut logs = vec![0.0; k];
        for (d, &y) in ys.iter().enumerate().take(self.base.num_docs()) {
            for i in 0..self.base.doc_words(d).len() {
                self.base.remove_token(d, i);
                self.base.collapsed_weights(d, i, &mut weights);
                self.response_weights(d, y, &mut weights, &mut logs);
                let t = sample_discrete(&weights, &mut self.base.rng);
                self.base.assign_token(d, i, t);
            }
        }
    }

    /// Empirical topic frequencies of every training document.
    pub fn training_zbars(&self) -> Vec<Vec<f64>> {
        let k = self.num_topics();
        (0..self.base.num_docs())
            .map(|d| {
                let n = self.base.doc_words(d).len() as f64;
                self.base
                    .doc_topic_counts(d)
                    .iter()
                    .map(|&c| c as f64 / n)
                    .take(k)
                    .collect()
            })
            .collect()
    }

    /// Training MAE and negative Gaussian log-likelihood of `ys`.
    pub fn training_fit(&self, ys: &[f64]) -> (f64, f64) {
        let zbars = self.training_zbars();
        let mut abs = 0.0;
        let mut nll = 0.0;
        let norm = 0.5 * (2.0 * std::f64::consts::PI * self.sigma2).ln();
        for (zb, y) in zbars.iter().zip(ys) {
            let r = y - dot(&self.eta, zb);
            abs += r.abs();
            nll += r * r / (2.0 * self.sigma2) + norm;
        }
        (abs / ys.len() as f64, nll)
    }

    /// Fold-in topic frequencies of an unseen document. The response is
    /// unknown, so the plain LDA conditional is used.
    pub fn infer_heldout(&self, doc: &BowDoc, sweeps: usize, seed: u64) -> Result<Vec<f64>> {
        self.base.fold_in(doc, sweeps, seed)
    }

    pub fn predict_zbar(&self, zbar: &[f64]) -> f64 {
        dot(&self.eta, zbar)
    }

    pub fn predict(&self, doc: &BowDoc, sweeps: usize, seed: u64) -> Result<f64> {
        Ok(self.predict_zbar(&self.infer_heldout(doc, sweeps, seed)?))
    }

    /// Predicts every document, seeding document `i` from `(seed, i)`.
    pub fn predict_all(&self, docs: &[BowDoc], sweeps: usize, seed: u64) -> Result<Vec<f64>> {
        docs.iter()
            .enumerate()
            .map(|(i, d)| self.predict(d, sweeps, stream_seed(seed, i as u64)))
            .collect()
    }

    /// Coefficient and top words per topic.
    pub fn eta_report(&self, vocab: &Vocabulary, n: usize) -> Result<EtaReport> {
        let topics = self.base.topic_report(vocab, n)?.topics;
        Ok(EtaReport {
            rows: self
                .eta
                .iter()
                .zip(topics)
                .map(|(&eta, words)| (eta, words.into_iter().map(|(w, _)| w).collect()))
                .collect(),
        })
    }

    pub fn to_file(&self, include_state: bool) -> SldaModelFile {
        SldaModelFile {
            lda: self.base.to_file(include_state),
            eta: self.eta.clone(),
            sigma2: self.sigma2,
        }
    }

    pub fn from_file(file: &SldaModelFile) -> Result<Self> {
        let base = LdaModel::from_file(&file.lda)?;
        if file.eta.len() != base.num_topics() || file.eta.iter().any(|e| !e.is_finite()) {
            return Err(Error::param("eta must hold K finite values"));
        }
        if file.sigma2.is_nan() || file.sigma2 <= 0.0 {
            return Err(Error::param("sigma2 must be positive"));
        }
        Ok(SldaModel {
            base,
            eta: file.eta.clone(),
            sigma2: file.sigma2,
        })
    }
}

/// Stochastic EM: `sweeps` rounds of (response-aware Gibbs sweep, ridge
/// update of η). Returns the model and one log row per iteration.
pub fn slda_train(
    corpus: &Corpus,
    ys: &[f64],
    hyper: LdaHyper,
    sigma2: f64,
    sweeps: usize,
    seed: u64,
) -> Result<(SldaModel, Vec<EmRecord>)> {
    if sweeps == 0 {
        return Err(Error::param("sweeps must be at least 1"));
    }
    if corpus.num_docs() != ys.len() {
        return Err(Error::LengthMismatch {
            left: corpus.num_docs(),
            right: ys.len(),
        });
    }
    let mut model = SldaModel::init(corpus, hyper, sigma2, seed)?;
    let mut log = Vec::with_capacity(sweeps);
    for iter in 1..=sweeps {
        model.sweep(ys);
        model.eta = update_eta(&model.training_zbars(), ys)?;
        let (mae, neg_loglik) = model.training_fit(ys);
        log.push(EmRecord { iter, mae, neg_loglik });
    }
    Ok((model, log))
}

/// `iter,mae,neg_loglik` CSV with header.
pub fn train_log_csv(log: &[EmRecord]) -> String {
    let mut out = String::from("iter,mae,neg_loglik\n");
    for r in log {
        out.push_str(&format!("{},{:.6},{:.6}\n", r.iter, r.mae, r.neg_loglik));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaReport {
    pub rows: Vec<(f64, Vec<String>)>,
}

impl EtaReport {
    /// `topic<TAB>eta<TAB>comma-joined top words`, no header.
    pub fn to_tsv(&self) -> String {
        self.rows
            .iter()
            .enumerate()
            .map(|(k, (eta, words))| format!("{k}\t{eta:.6}\t{}\n", words.join(",")))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SldaModelFile {
    #[serde(flatten)]
    pub lda: LdaModelFile,
    pub eta: Vec<f64>,
    pub sigma2: f64,
}

#[derive(Debug, Clone)]
pub struct LabeledSynthetic {
    pub data: SyntheticCorpus,
    pub ys: Vec<f64>,
    /// Noise-free responses `η·z̄`.
    pub means: Vec<f64>,
}

/// LDA generative draw followed by `y ~ Normal(η·z̄, σ²)` per document.
#[allow(clippy::too_many_arguments)]
pub fn generate_labeled(
    hyper: LdaHyper,
    eta_true: &[f64],
    sigma2: f64,
    num_terms: usize,
    num_docs: usize,
    tokens_per_doc: usize,
    seed: u64,
) -> Result<LabeledSynthetic> {
    if eta_true.len() != hyper.num_topics {
        return Err(Error::LengthMismatch {
            left: eta_true.len(),
            right: hyper.num_topics,
        });
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::param(format!("sigma2 must be non-negative, got {sigma2}")));
    }
    let data = generate_corpus(hyper, num_terms, num_docs, tokens_per_doc, seed)?;
    let mut rng = seeded(stream_seed(seed, u64::MAX));
    let noise = Normal::new(0.0, sigma2.sqrt()).map_err(|e| Error::param(e.to_string()))?;
    let mut means = Vec::with_capacity(num_docs);
    let mut ys = Vec::with_capacity(num_docs);
    for z in &data.z {
        let mean = dot(eta_true, &zbar_of(z, hyper.num_topics)?);
        means.push(mean);
        ys.push(if sigma2 == 0.0 {
            mean
        } else {
            mean + noise.sample(&mut rng)
        });
    }
    Ok(LabeledSynthetic { data, ys, means })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[&[usize]], v: usize) -> Corpus {
        Corpus::new(docs.iter().map(|d| BowDoc::from_ids(d)).collect(), v).unwrap()
    }

    #[test]
    fn zbar_cases() {
        assert_eq!(zbar_of(&[0, 0, 0, 0], 2).unwrap(), vec![1.0, 0.0]);
        assert_eq!(zbar_of(&[0, 1, 0, 1], 2).unwrap(), vec![0.5, 0.5]);
        let z = zbar_of(&[0, 0, 1], 3).unwrap();
        assert!((z[0] - 2.0 / 3.0).abs() < 1e-15 && (z[1] - 1.0 / 3.0).abs() < 1e-15 && z[2] == 0.0);
        assert!(zbar_of(&[], 2).is_err());
        assert!(zbar_of(&[3], 2).is_err());
    }

    #[test]
    fn eta_zero_response() {
        let zb = vec![vec![0.5, 0.5], vec![1.0, 0.0], vec![0.2, 0.8]];
        assert_eq!(update_eta(&zb, &[0.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn eta_orthonormal_design() {
        let zb = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let ys = [3.0, -2.0, 0.5];
        let eta = update_eta(&zb, &ys).unwrap();
        for (e, y) in eta.iter().zip(ys) {
            assert!(((e - y) / y).abs() < 1e-5);
        }
    }

    #[test]
    fn eta_unused_topic_is_solvable() {
        let zb = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        let eta = update_eta(&zb, &[1.0, 1.0]).unwrap();
        assert!((eta[0] - 1.0).abs() < 1e-5);
        assert_eq!(eta[1], 0.0);
    }

    #[test]
    fn eta_errors() {
        assert!(update_eta(&[], &[]).is_err());
        assert!(update_eta(&[vec![1.0]], &[1.0, 2.0]).is_err());
        assert!(matches!(update_eta(&[vec![f64::NAN]], &[1.0]), Err(Error::Solver(_))));
    }

    #[test]
    fn mae_cases() {
        assert_eq!(mae(&[1.0, -1.0], &[1.0, -1.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.5, -0.5], &[1.0, -1.0]).unwrap(), 0.5);
        assert!((mae(&[1.0, 1.0, 1.0], &[-1.0, 1.0, -1.0]).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(mae(&[], &[]).is_err());
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn predict_is_dot_product() {
        let c = corpus(&[&[0, 1, 2]], 3);
        let mut m = SldaModel::init(&c, LdaHyper::new(3, 0.5, 0.5).unwrap(), 1.0, 0).unwrap();
        m.eta = vec![2.0, -1.0, 0.0];
        assert!((m.predict_zbar(&[0.5, 0.25, 0.25]) - 0.75).abs() < 1e-15);
        m.eta = vec![1.0, -1.0, 0.0];
        assert_eq!(m.predict_zbar(&[0.5, 0.5, 0.0]), 0.0);
        m.eta = vec![0.0; 3];
        assert_eq!(m.predict(&BowDoc::from_ids(&[0, 2]), 10, 1).unwrap(), 0.0);
    }

    #[test]
    fn conditional_with_zero_eta_equals_lda() {
        let c = corpus(&[&[0, 1, 1, 2], &[2, 2, 0]], 3);
        let h = LdaHyper::new(3, 0.3, 0.2).unwrap();
        let mut s = SldaModel::init(&c, h, 0.5, 4).unwrap();
        let mut l = LdaModel::init(&c, h, 4).unwrap();
        for (d, n) in [(0, 4), (1, 3)] {
            for i in 0..n {
                let a = s.conditional(d, i, 1.0);
                let b = l.conditional(d, i);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conditional_matches_hand_formula() {
        // One doc (a, b, a) over V=2, K=2, α=β=0.5, η=(1,-1), σ²=0.25, y=1,
        // current z=(0,1,1); resample token 0.
        let c = corpus(&[&[0, 0, 1]], 2);
        let h = LdaHyper::new(2, 0.5, 0.5).unwrap();
        let mut m = SldaModel::init(&c, h, 0.25, 0).unwrap();
        // expanded words are [0, 0, 1]; set z = (0, 1, 1)
        for (i, t) in [0usize, 1, 1].into_iter().enumerate() {
            m.base.remove_token(0, i);
            m.base.assign_token(0, i, t);
        }
        m.eta = vec![1.0, -1.0];
        // Excluding token 0 (word a): n_d=(0,2), n_kw: t0 {}, t1 {a:1,b:1}, n_k=(0,2)
        // lda: k0 = 0.5*0.5/1 = 0.25 ; k1 = 2.5*1.5/3 = 1.25
        // zbar: k0 -> (1/3, 2/3): η·z = -1/3 ; k1 -> (0,1): -1
        // gauss: exp(-(4/3)^2/0.5), exp(-(2)^2/0.5)
        let w0 = 0.25 * (-(4.0f64 / 3.0).powi(2) / 0.5).exp();
        let w1 = 1.25 * (-(2.0f64).powi(2) / 0.5).exp();
        let got = m.conditional(0, 0, 1.0);
        assert!((got[0] - w0 / (w0 + w1)).abs() < 1e-12, "{got:?}");
        assert!((got[1] - w1 / (w0 + w1)).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic_and_logs() {
        let c = corpus(&[&[0, 1, 1, 2], &[2, 2, 0], &[3, 3, 1]], 4);
        let ys = [1.0, -1.0, 1.0];
        let h = LdaHyper::new(2, 0.3, 0.2).unwrap();
        let (a, la) = slda_train(&c, &ys, h, 0.1, 5, 11).unwrap();
        let (b, lb) = slda_train(&c, &ys, h, 0.1, 5, 11).unwrap();
        assert_eq!(la, lb);
        assert_eq!(a.eta, b.eta);
        assert_eq!(la.len(), 5);
        assert_eq!(la[4].iter, 5);
        a.base.check_invariants().unwrap();
        let csv = train_log_csv(&la);
        assert!(csv.starts_with("iter,mae,neg_loglik\n"));
        assert_eq!(csv.lines().count(), 6);
        assert!(slda_train(&c, &ys, h, 0.1, 0, 11).is_err());
        assert!(slda_train(&c, &ys[..2], h, 0.1, 1, 11).is_err());
        assert!(slda_train(&c, &ys, h, 0.0, 1, 11).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let c = corpus(&[&[0, 1, 1, 2], &[2, 2, 0]], 3);
        let (m, _) = slda_train(&c, &[1.0, -1.0], LdaHyper::new(2, 0.3, 0.2).unwrap(), 0.1, 3, 1).unwrap();
        let json = serde_json::to_string(&m.to_file(false)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v.get("eta").is_some() && v.get("sigma2").is_some() && v.get("n_kw").is_some());
        let back = SldaModel::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.eta, m.eta);
        let doc = BowDoc::from_ids(&[0, 2]);
        assert_eq!(back.predict(&doc, 20, 3).unwrap(), m.predict(&doc, 20, 3).unwrap());
    }

    #[test]
    fn eta_report_rows() {
        let vocab = Vocabulary::build(&[vec!["a", "b", "c"]]);
        let c = corpus(&[&[0, 1, 1, 2]], 3);
        let (m, _) = slda_train(&c, &[1.0], LdaHyper::new(2, 0.3, 0.2).unwrap(), 0.1, 2, 1).unwrap();
        let tsv = m.eta_report(&vocab, 2).unwrap().to_tsv();
        assert_eq!(tsv.lines().count(), 2);
        let first: Vec<&str> = tsv.lines().next().unwrap().split('\t').collect();
        assert_eq!(first.len(), 3);
        assert_eq!(first[2].split(',').count(), 2);
    }

    #[test]
    fn labeled_generator() {
        let h = LdaHyper::new(2, 0.5, 0.1).unwrap();
        let a = generate_labeled(h, &[1.0, -1.0], 0.0, 10, 20, 5, 3).unwrap();
        for (z, y) in a.data.z.iter().zip(&a.ys) {
            let zb = zbar_of(z, 2).unwrap();
            assert!((y - (zb[0] - zb[1])).abs() < 1e-15);
        }
        let b = generate_labeled(h, &[1.0, -1.0], 0.3, 10, 20, 5, 3).unwrap();
        let c = generate_labeled(h, &[1.0, -1.0], 0.3, 10, 20, 5, 3).unwrap();
        assert_eq!(b.ys, c.ys);
        assert!(generate_labeled(h, &[1.0], 0.3, 10, 20, 5, 3).is_err());

        // Single topic, noiseless: y = η_0.
        let one = generate_labeled(LdaHyper::new(1, 0.5, 0.1).unwrap(), &[1.0], 0.0, 5, 3, 4, 0).unwrap();
        assert!(one.ys.iter().all(|&y| y == 1.0));
    }
}
