//! Binary sentiment classification over the most frequent training words.
//!
//! Five classifiers vote: Bernoulli and multinomial naive Bayes, logistic
//! regression and a linear SVM (both plain SGD with L2), and an averaged
//! perceptron. The majority label wins and the vote share is reported as a
//! confidence in {0.6, 0.8, 1.0}.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Polarity;
use crate::random::seeded;

pub const DEFAULT_FEATURES: usize = 5000;
pub const ENSEMBLE_SIZE: usize = 5;
pub const ENSEMBLE_VERSION: u32 = 1;

/// The `F` most frequent training terms with dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureMap {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl FeatureMap {
    /// Keeps the `max_features` terms with the highest total count; ties go
    /// to the lexicographically smaller term.
    pub fn fit<S: AsRef<str>>(docs: &[Vec<S>], max_features: usize) -> Result<Self> {
        if max_features == 0 {
            return Err(Error::param("feature count must be at least 1"));
        }
        if docs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut freq: HashMap<&str, usize> = HashMap::new();
        for doc in docs {
            for t in doc {
                *freq.entry(t.as_ref()).or_insert(0) += 1;
            }
        }
        let mut ranked: Vec<(&str, usize)> = freq.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        ranked.truncate(max_features);
        Ok(Self::from_terms(
            ranked.into_iter().map(|(t, _)| t.to_owned()).collect(),
        ))
    }

    pub fn from_terms(terms: Vec<String>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        FeatureMap { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Sorted distinct feature indices with their counts; unknown terms are
    /// dropped.
    pub fn featurize<S: AsRef<str>>(&self, terms: &[S]) -> FeatureVec {
        let mut ids: Vec<usize> = terms.iter().filter_map(|t| self.index_of(t.as_ref())).collect();
        ids.sort_unstable();
        let mut fv = FeatureVec::default();
        for id in ids {
            if fv.indices.last() == Some(&id) {
                *fv.counts.last_mut().expect("parallel") += 1;
            } else {
                fv.indices.push(id);
                fv.counts.push(1);
            }
        }
        fv
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVec {
    pub indices: Vec<usize>,
    pub counts: Vec<u32>,
}

impl FeatureVec {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    BernoulliNb,
    MultinomialNb,
    Logistic,
    LinearSvm,
    Perceptron,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; ENSEMBLE_SIZE] = [
        ClassifierKind::BernoulliNb,
        ClassifierKind::MultinomialNb,
        ClassifierKind::Logistic,
        ClassifierKind::LinearSvm,
        ClassifierKind::Perceptron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::BernoulliNb => "bernoulli_nb",
            ClassifierKind::MultinomialNb => "multinomial_nb",
            ClassifierKind::Logistic => "logistic",
            ClassifierKind::LinearSvm => "linear_svm",
            ClassifierKind::Perceptron => "perceptron",
        }
    }
}

/// Optimizer settings for the SGD-trained kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            epochs: 5,
            learning_rate: 0.1,
            l2: 1e-4,
            seed: 0,
        }
    }
}

pub const LAPLACE: f64 = 1.0;

/// Naive Bayes parameters; index 0 is negative, 1 positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub log_prior: [f64; 2],
    /// `ln P(feature | class)`: presence probability for the Bernoulli
    /// model, token probability for the multinomial one.
    pub log_prob: [Vec<f64>; 2],
    /// Bernoulli only: `ln (1 - P(present | class))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_absent: Option<[Vec<f64>; 2]>,
}

impl NaiveBayes {
    fn scores(&self, fv: &FeatureVec) -> [f64; 2] {
        let mut s = self.log_prior;
        for c in 0..2 {
            match &self.log_absent {
                Some(absent) => {
                    s[c] += absent[c].iter().sum::<f64>();
                    for &i in &fv.indices {
                        s[c] += self.log_prob[c][i] - absent[c][i];
                    }
                }
                None => {
                    for (&i, &n) in fv.indices.iter().zip(&fv.counts) {
                        s[c] += n as f64 * self.log_prob[c][i];
                    }
                }
            }
        }
        s
    }

    /// Posterior probability of the positive class.
    pub fn posterior(&self, fv: &FeatureVec) -> f64 {
        let [neg, pos] = self.scores(fv);
        1.0 / (1.0 + (neg - pos).exp())
    }
}

/// `sign(w·x + b)` over presence features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Linear {
    pub fn decision(&self, fv: &FeatureVec) -> f64 {
        self.bias + fv.indices.iter().map(|&i| self.weights[i]).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Classifier {
    BernoulliNb(NaiveBayes),
    MultinomialNb(NaiveBayes),
    Logistic(Linear),
    LinearSvm(Linear),
    Perceptron(Linear),
}

/// One labeled training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: FeatureVec,
    pub label: Polarity,
}

fn class_index(p: Polarity) -> usize {
    match p {
        Polarity::Negative => 0,
        Polarity::Positive => 1,
    }
}

fn from_positive(positive: bool) -> Polarity {
    if positive {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

impl Classifier {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            Classifier::BernoulliNb(_) => ClassifierKind::BernoulliNb,
            Classifier::MultinomialNb(_) => ClassifierKind::MultinomialNb,
            Classifier::Logistic(_) => ClassifierKind::Logistic,
            Classifier::LinearSvm(_) => ClassifierKind::LinearSvm,
            Classifier::Perceptron(_) => ClassifierKind::Perceptron,
        }
    }

    /// Trains one classifier over `num_features` dimensions.
    pub fn train(kind: ClassifierKind, examples: &[Example], num_features: usize, cfg: &SgdConfig) -> Result<Self> {
        let mut class_counts = [0usize; 2];
        for ex in examples {
            class_counts[class_index(ex.label)] += 1;
            if let Some(&i) = ex.features.indices.iter().find(|&&i| i >= num_features) {
                return Err(Error::UnknownToken(i));
            }
        }
        if class_counts.contains(&0) {
            return Err(Error::SingleClass);
        }
        Ok(match kind {
            ClassifierKind::BernoulliNb => {
                Classifier::BernoulliNb(train_bernoulli(examples, num_features, class_counts))
            }
            ClassifierKind::MultinomialNb => {
                Classifier::MultinomialNb(train_multinomial(examples, num_features, class_counts))
            }
            ClassifierKind::Logistic => Classifier::Logistic(train_sgd(examples, num_features, cfg, Loss::Log)),
            ClassifierKind::LinearSvm => Classifier::LinearSvm(train_sgd(examples, num_features, cfg, Loss::Hinge)),
            ClassifierKind::Perceptron => Classifier::Perceptron(train_perceptron(examples, num_features, cfg)),
        })
    }

    /// Predicted class; exact ties go to negative.
    pub fn classify(&self, fv: &FeatureVec) -> Polarity {
        match self {
            Classifier::BernoulliNb(nb) | Classifier::MultinomialNb(nb) => {
                let [neg, pos] = nb.scores(fv);
                from_positive(pos > neg)
            }
            Classifier::Logistic(l) | Classifier::LinearSvm(l) | Classifier::Perceptron(l) => {
                from_positive(l.decision(fv) > 0.0)
            }
        }
    }

    fn num_features(&self) -> usize {
        match self {
            Classifier::BernoulliNb(nb) | Classifier::MultinomialNb(nb) => nb.log_prob[0].len(),
            Classifier::Logistic(l) | Classifier::LinearSvm(l) | Classifier::Perceptron(l) => l.weights.len(),
        }
    }
}

fn train_bernoulli(examples: &[Example], f: usize, class_counts: [usize; 2]) -> NaiveBayes {
    let mut present = [vec![0.0; f], vec![0.0; f]];
    for ex in examples {
        let c = class_index(ex.label);
        for &i in &ex.features.indices {
            present[c][i] += 1.0;
        }
    }
    let n = examples.len() as f64;
    let mut log_prob = [Vec::new(), Vec::new()];
    let mut log_absent = [Vec::new(), Vec::new()];
    for c in 0..2 {
        let denom = class_counts[c] as f64 + 2.0 * LAPLACE;
        log_prob[c] = present[c].iter().map(|&k| ((k + LAPLACE) / denom).ln()).collect();
        log_absent[c] = present[c].iter().map(|&k| (1.0 - (k + LAPLACE) / denom).ln()).collect();
    }
    NaiveBayes {
        log_prior: [(class_counts[0] as f64 / n).ln(), (class_counts[1] as f64 / n).ln()],
        log_prob,
        log_absent: Some(log_absent),
    }
}

fn train_multinomial(examples: &[Example], f: usize, class_counts: [usize; 2]) -> NaiveBayes {
    let mut counts = [vec![0.0; f], vec![0.0; f]];
    for ex in examples {
        let c = class_index(ex.label);
        for (&i, &k) in ex.features.indices.iter().zip(&ex.features.counts) {
            counts[c][i] += k as f64;
        }
    }
    let n = examples.len() as f64;
    let mut log_prob = [Vec::new(), Vec::new()];
    for c in 0..2 {
        let total: f64 = counts[c].iter().sum();
        let denom = total + LAPLACE * f as f64;
        log_prob[c] = counts[c].iter().map(|&k| ((k + LAPLACE) / denom).ln()).collect();
    }
    NaiveBayes {
        log_prior: [(class_counts[0] as f64 / n).ln(), (class_counts[1] as f64 / n).ln()],
        log_prob,
        log_absent: None,
    }
}

#[derive(Clone, Copy)]
enum Loss {
    Log,
    Hinge,
}

/// SGD with L2 decay applied through a shared scale factor, so each step
/// touches only the example's active features.
fn train_sgd(examples: &[Example], f: usize, cfg: &SgdConfig, loss: Loss) -> Linear {
    let mut v = vec![0.0; f];
    let mut scale = 1.0;
    let mut bias = 0.0;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = seeded(cfg.seed);
    let lr = cfg.learning_rate;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &n in &order {
            let ex = &examples[n];
            let y = ex.label.sign();
            let wx: f64 = scale * ex.features.indices.iter().map(|&i| v[i]).sum::<f64>() + bias;
            let margin = y * wx;
            // d loss / d (w·x)
            let g = match loss {
                Loss::Log => -y / (1.0 + margin.exp()),
                Loss::Hinge if margin < 1.0 => -y,
                Loss::Hinge => 0.0,
            };
            scale *= 1.0 - lr * cfg.l2;
            if g != 0.0 {
                for &i in &ex.features.indices {
                    v[i] -= lr * g / scale;
                }
                bias -= lr * g;
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|x| *x *= scale);
                scale = 1.0;
            }
        }
    }
    Linear {
        weights: v.into_iter().map(|x| x * scale).collect(),
        bias,
    }
}

fn train_perceptron(examples: &[Example], f: usize, cfg: &SgdConfig) -> Linear {
    let mut w = vec![0.0; f];
    let mut b = 0.0;
    // Step-weighted sums of updates for the averaging trick.
    let mut uw = vec![0.0; f];
    let mut ub = 0.0;
    let mut step = 1.0;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = seeded(cfg.seed);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &n in &order {
            let ex = &examples[n];
            let y = ex.label.sign();
            let wx: f64 = b + ex.features.indices.iter().map(|&i| w[i]).sum::<f64>();
            if y * wx <= 0.0 {
                for &i in &ex.features.indices {
                    w[i] += y;
                    uw[i] += step * y;
                }
                b += y;
                ub += step * y;
            }
            step += 1.0;
        }
    }
    Linear {
        weights: w.iter().zip(&uw).map(|(w, u)| w - u / step).collect(),
        bias: b - ub / step,
    }
}

/// A term whose presence most separates the classes.
#[derive(Debug, Clone, PartialEq)]
pub struct InformativeFeature {
    pub term: String,
    pub ratio: f64,
    pub favors: Polarity,
}

/// Top-`n` terms by `max(P(t|pos)/P(t|neg), P(t|neg)/P(t|pos))` under a
/// Bernoulli naive Bayes model. Ties are broken lexicographically.
pub fn most_informative(classifier: &Classifier, map: &FeatureMap, n: usize) -> Result<Vec<InformativeFeature>> {
    let nb = match classifier {
        Classifier::BernoulliNb(nb) => nb,
        other => return Err(Error::NotBernoulliNb(other.kind().name())),
    };
    let mut feats: Vec<InformativeFeature> = map
        .terms()
        .iter()
        .enumerate()
        .map(|(i, term)| {
            let log_ratio = nb.log_prob[1][i] - nb.log_prob[0][i];
            InformativeFeature {
                term: term.clone(),
                ratio: log_ratio.abs().exp(),
                favors: from_positive(log_ratio > 0.0),
            }
        })
        .collect();
    feats.sort_by(|a, b| b.ratio.total_cmp(&a.ratio).then_with(|| a.term.cmp(&b.term)));
    feats.truncate(n);
    Ok(feats)
}

/// Majority label of a vote and its share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentPrediction {
    pub polarity: Polarity,
    pub confidence: f64,
}

/// Combines an odd number of votes: majority label, confidence = share.
pub fn majority_vote(votes: &[Polarity]) -> SentimentPrediction {
    let pos = votes.iter().filter(|&&p| p == Polarity::Positive).count();
    let neg = votes.len() - pos;
    let (polarity, count) = if pos > neg {
        (Polarity::Positive, pos)
    } else {
        (Polarity::Negative, neg)
    };
    SentimentPrediction {
        polarity,
        confidence: count as f64 / votes.len() as f64,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub features: FeatureMap,
    pub classifiers: Vec<Classifier>,
}

impl EnsembleModel {
    /// Fits the feature map and the five classifiers (trained in parallel).
    pub fn train<S: AsRef<str> + Sync>(
        docs: &[Vec<S>],
        labels: &[Polarity],
        max_features: usize,
        cfg: &SgdConfig,
    ) -> Result<Self> {
        if docs.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: docs.len(),
                right: labels.len(),
            });
        }
        let features = FeatureMap::fit(docs, max_features)?;
        let examples: Vec<Example> = docs
            .iter()
            .zip(labels)
            .map(|(d, &label)| Example {
                features: features.featurize(d),
                label,
            })
            .collect();
        let f = features.len();
        let classifiers = std::thread::scope(|s| {
            let handles: Vec<_> = ClassifierKind::ALL
                .iter()
                .map(|&kind| {
                    let examples = &examples;
                    s.spawn(move || Classifier::train(kind, examples, f, cfg))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("classifier training panicked"))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(EnsembleModel { features, classifiers })
    }

    pub fn votes<S: AsRef<str>>(&self, terms: &[S]) -> Vec<Polarity> {
        let fv = self.features.featurize(terms);
        self.classifiers.iter().map(|c| c.classify(&fv)).collect()
    }

    pub fn classify<S: AsRef<str>>(&self, terms: &[S]) -> SentimentPrediction {
        majority_vote(&self.votes(terms))
    }

    pub fn member(&self, kind: ClassifierKind) -> Option<&Classifier> {
        self.classifiers.iter().find(|c| c.kind() == kind)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = EnsembleFile {
            version: ENSEMBLE_VERSION,
            features: self.features.terms().to_vec(),
            classifiers: self.classifiers.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnsembleFile = serde_json::from_str(text)?;
        if file.version != ENSEMBLE_VERSION {
            return Err(Error::Version(file.version));
        }
        if file.classifiers.len() != ENSEMBLE_SIZE {
            return Err(Error::param(format!(
                "ensemble needs {ENSEMBLE_SIZE} classifiers, found {}",
                file.classifiers.len()
            )));
        }
        let features = FeatureMap::from_terms(file.features);
        if file.classifiers.iter().any(|c| c.num_features() != features.len()) {
            return Err(Error::param("classifier dimensions do not match the feature map"));
        }
        Ok(EnsembleModel {
            features,
            classifiers: file.classifiers,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleFile {
    version: u32,
    features: Vec<String>,
    classifiers: Vec<Classifier>,
}

/// Accuracy and micro-averaged F1 over both classes.
pub fn evaluate(preds: &[Polarity], golds: &[Polarity]) -> Result<(f64, f64)> {
    if preds.len() != golds.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: golds.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::param("cannot evaluate an empty prediction set"));
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for class in [Polarity::Negative, Polarity::Positive] {
        for (&p, &g) in preds.iter().zip(golds) {
            match (p == class, g == class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    let correct = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    let accuracy = correct as f64 / preds.len() as f64;
    let f1 = if tp == 0 {
        0.0
    } else {
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / (tp + fn_) as f64;
        2.0 * precision * recall / (precision + recall)
    };
    Ok((accuracy, f1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Polarity::{Negative as N, Positive as P};

    fn docs(xs: &[&[&str]]) -> Vec<Vec<String>> {
        xs.iter().map(|d| d.iter().map(|s| s.to_string()).collect()).collect()
    }

    fn toy() -> (FeatureMap, Vec<Example>) {
        let d = docs(&[&["good"], &["bad"]]);
        let map = FeatureMap::fit(&d, 10).unwrap();
        let ex = d
            .iter()
            .zip([P, N])
            .map(|(t, label)| Example {
                features: map.featurize(t),
                label,
            })
            .collect();
        (map, ex)
    }

    #[test]
    fn feature_selection() {
        let d = docs(&[&["cat", "cat", "dog"], &["cat"]]);
        assert_eq!(FeatureMap::fit(&d, 1).unwrap().terms(), &["cat".to_string()]);
        assert_eq!(FeatureMap::fit(&d, 10).unwrap().len(), 2);
        let tie = docs(&[&["cat", "ant"], &["cat", "ant"]]);
        assert_eq!(FeatureMap::fit(&tie, 1).unwrap().terms(), &["ant".to_string()]);
        assert!(FeatureMap::fit::<String>(&[], 1).is_err());
        assert!(FeatureMap::fit(&d, 0).is_err());
    }

    #[test]
    fn featurize_counts_and_drops_oov() {
        let map = FeatureMap::from_terms(vec!["cat".into(), "dog".into()]);
        let fv = map.featurize(&["cat", "cat"]);
        assert_eq!(fv.indices, vec![0]);
        assert_eq!(fv.counts, vec![2]);
        assert!(map.featurize::<&str>(&[]).is_empty());
        assert!(map.featurize(&["eel", "fox"]).is_empty());
        assert_eq!(map.featurize(&["dog", "cat"]), map.featurize(&["cat", "dog"]));
    }

    #[test]
    fn bernoulli_separates_toy_set() {
        let (map, ex) = toy();
        let c = Classifier::train(ClassifierKind::BernoulliNb, &ex, map.len(), &SgdConfig::default()).unwrap();
        assert_eq!(c.classify(&map.featurize(&["good"])), P);
        assert_eq!(c.classify(&map.featurize(&["bad"])), N);
    }

    #[test]
    fn every_kind_separates_toy_set() {
        let (map, ex) = toy();
        for kind in ClassifierKind::ALL {
            let c = Classifier::train(kind, &ex, map.len(), &SgdConfig::default()).unwrap();
            assert_eq!(c.classify(&map.featurize(&["good"])), P, "{kind:?}");
            assert_eq!(c.classify(&map.featurize(&["bad"])), N, "{kind:?}");
        }
    }

    #[test]
    fn symmetric_nb_ties_to_negative() {
        let (map, ex) = toy();
        for kind in [ClassifierKind::MultinomialNb, ClassifierKind::BernoulliNb] {
            let c = Classifier::train(kind, &ex, map.len(), &SgdConfig::default()).unwrap();
            let empty = FeatureVec::default();
            if let Classifier::MultinomialNb(nb) | Classifier::BernoulliNb(nb) = &c {
                assert!((nb.posterior(&empty) - 0.5).abs() < 1e-12);
            }
            assert_eq!(c.classify(&empty), N);
        }
        let zero = Classifier::Logistic(Linear {
            weights: vec![0.0; 2],
            bias: 0.0,
        });
        assert_eq!(zero.classify(&map.featurize(&["good"])), N);
    }

    #[test]
    fn single_class_rejected() {
        let (map, mut ex) = toy();
        ex.retain(|e| e.label == P);
        assert!(matches!(
            Classifier::train(ClassifierKind::Logistic, &ex, map.len(), &SgdConfig::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn sgd_kinds_deterministic() {
        let d = docs(&[&["a", "b"], &["b", "c"], &["c", "d"], &["a", "d"], &["a"], &["d"]]);
        let labels = [P, N, N, P, P, N];
        let map = FeatureMap::fit(&d, 10).unwrap();
        let ex: Vec<Example> = d
            .iter()
            .zip(labels)
            .map(|(t, label)| Example {
                features: map.featurize(t),
                label,
            })
            .collect();
        let cfg = SgdConfig {
            seed: 9,
            ..Default::default()
        };
        for kind in [
            ClassifierKind::Logistic,
            ClassifierKind::LinearSvm,
            ClassifierKind::Perceptron,
        ] {
            let a = Classifier::train(kind, &ex, map.len(), &cfg).unwrap();
            let b = Classifier::train(kind, &ex, map.len(), &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn votes_and_confidence() {
        assert_eq!(
            majority_vote(&[P, P, P, N, N]),
            SentimentPrediction {
                polarity: P,
                confidence: 0.6
            }
        );
        assert_eq!(majority_vote(&[P; 5]).confidence, 1.0);
        let v = majority_vote(&[N, N, P, N, N]);
        assert_eq!((v.polarity, v.confidence), (N, 0.8));
    }

    #[test]
    fn evaluation_metrics() {
        assert_eq!(evaluate(&[P, N], &[P, N]).unwrap(), (1.0, 1.0));
        assert_eq!(evaluate(&[P, N], &[N, P]).unwrap(), (0.0, 0.0));
        assert_eq!(evaluate(&[P, N, P, P], &[P, N, P, N]).unwrap(), (0.75, 0.75));
        assert!(evaluate(&[P], &[P, N]).is_err());
        assert!(evaluate(&[], &[]).is_err());
    }

    #[test]
    fn informative_features() {
        let d = docs(&[&["good", "day"], &["good", "fun"], &["bad", "day"], &["awful", "fun"]]);
        let labels = [P, P, N, N];
        let e = EnsembleModel::train(&d, &labels, 10, &SgdConfig::default()).unwrap();
        let nb = e.member(ClassifierKind::BernoulliNb).unwrap();
        let top = most_informative(nb, &e.features, 10).unwrap();
        assert_eq!(top[0].term, "good");
        assert_eq!(top[0].favors, P);
        let last = top.last().unwrap();
        assert!((last.ratio - 1.0).abs() < 1e-12);
        assert!(last.term == "day" || last.term == "fun");
        assert!(most_informative(nb, &e.features, 0).unwrap().is_empty());
        let lr = e.member(ClassifierKind::Logistic).unwrap();
        assert!(matches!(
            most_informative(lr, &e.features, 3),
            Err(Error::NotBernoulliNb(_))
        ));
    }

    #[test]
    fn ensemble_json_roundtrip() {
        let d = docs(&[&["good", "day"], &["bad", "day"], &["great"], &["awful"]]);
        let e = EnsembleModel::train(&d, &[P, N, P, N], 10, &SgdConfig::default()).unwrap();
        assert_eq!(e.classifiers.len(), 5);
        let json = e.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["classifiers"][0]["kind"], "bernoulli_nb");
        assert!(v["classifiers"][2]["params"]["weights"].is_array());
        let back = EnsembleModel::from_json(&json).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.classify(&["good"]).polarity, P);
    }
}
