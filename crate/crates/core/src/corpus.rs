//! Vocabulary, bag-of-words encoding and tf-idf weighting.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NO_BELOW: usize = 5;
pub const DEFAULT_NO_ABOVE: f64 = 0.5;
pub const DEFAULT_KEEP_N: usize = 100_000;

/// Term <-> id dictionary with document frequencies.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
    doc_freq: Vec<usize>,
    num_docs: usize,
}

impl Vocabulary {
    /// Builds a vocabulary with ids in first-appearance order.
    pub fn build<S: AsRef<str>>(docs: &[Vec<S>]) -> Self {
        let mut vocab = Vocabulary::default();
        for doc in docs {
            vocab.add_document(doc);
        }
        vocab
    }

    /// Adds one document's terms, updating document frequencies.
    pub fn add_document<S: AsRef<str>>(&mut self, terms: &[S]) {
        let mut seen = HashSet::new();
        for term in terms {
            let term = term.as_ref();
            let id = match self.token_to_id.get(term) {
                Some(&id) => id,
                None => {
                    let id = self.id_to_token.len();
                    self.token_to_id.insert(term.to_owned(), id);
                    self.id_to_token.push(term.to_owned());
                    self.doc_freq.push(0);
                    id
                }
            };
            if seen.insert(id) {
                self.doc_freq[id] += 1;
            }
        }
        self.num_docs += 1;
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(String::as_str)
    }

    pub fn doc_freq(&self, id: usize) -> Option<usize> {
        self.doc_freq.get(id).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    /// Drops rare and overly common terms, then caps the size.
    ///
    /// Terms with `df < no_below` or `df > no_above * num_docs` are removed.
    /// Of the rest, the `keep_n` highest-df terms survive (ties to the lower
    /// id). Survivors get dense ids in their original relative order.
    pub fn filter_extremes(&self, no_below: usize, no_above: f64, keep_n: usize) -> Result<Self> {
        if !(no_above > 0.0 && no_above <= 1.0) {
            return Err(Error::param(format!("no_above must be in (0, 1], got {no_above}")));
        }
        let ceiling = no_above * self.num_docs as f64;
        let mut survivors: Vec<usize> = (0..self.len())
            .filter(|&id| {
                let df = self.doc_freq[id];
                df >= no_below && (df as f64) <= ceiling
            })
            .collect();
        if survivors.len() > keep_n {
            survivors.sort_by(|&a, &b| self.doc_freq[b].cmp(&self.doc_freq[a]).then(a.cmp(&b)));
            survivors.truncate(keep_n);
            survivors.sort_unstable();
        }

        let mut out = Vocabulary {
            num_docs: self.num_docs,
            ..Default::default()
        };
        for old in survivors {
            let token = self.id_to_token[old].clone();
            out.token_to_id.insert(token.clone(), out.id_to_token.len());
            out.id_to_token.push(token);
            out.doc_freq.push(self.doc_freq[old]);
        }
        Ok(out)
    }

    /// Encodes terms as sorted `(id, count)` pairs, dropping unknown terms.
    pub fn doc2bow<S: AsRef<str>>(&self, terms: &[S]) -> BowDoc {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for term in terms {
            if let Some(id) = self.id(term.as_ref()) {
                *counts.entry(id).or_insert(0) += 1;
            }
        }
        BowDoc {
            entries: counts.into_iter().collect(),
        }
    }

    /// Natural-log inverse document frequency, `ln(N / df)`.
    pub fn idf(&self, token_id: usize) -> Result<f64> {
        let df = self.doc_freq(token_id).ok_or(Error::UnknownToken(token_id))?;
        if df == 0 || self.num_docs == 0 {
            return Err(Error::UndefinedIdf {
                token_id,
                df,
                num_docs: self.num_docs,
            });
        }
        Ok((self.num_docs as f64 / df as f64).ln())
    }

    /// Raw-count tf times idf, per entry.
    pub fn tfidf(&self, doc: &BowDoc) -> Result<TfIdfDoc> {
        let entries = doc
            .entries
            .iter()
            .map(|&(id, count)| Ok((id, count as f64 * self.idf(id)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TfIdfDoc { entries })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&VocabFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: VocabFile = serde_json::from_str(text)?;
        Self::try_from(file)
    }
}

#[derive(Serialize, Deserialize)]
struct VocabTerm {
    token: String,
    id: usize,
    df: usize,
}

#[derive(Serialize, Deserialize)]
struct VocabFile {
    num_docs: usize,
    terms: Vec<VocabTerm>,
}

impl From<&Vocabulary> for VocabFile {
    fn from(v: &Vocabulary) -> Self {
        VocabFile {
            num_docs: v.num_docs,
            terms: v
                .id_to_token
                .iter()
                .zip(&v.doc_freq)
                .enumerate()
                .map(|(id, (token, &df))| VocabTerm {
                    token: token.clone(),
                    id,
                    df,
                })
                .collect(),
        }
    }
}

impl TryFrom<VocabFile> for Vocabulary {
    type Error = Error;

    fn try_from(mut file: VocabFile) -> Result<Self> {
        file.terms.sort_by_key(|t| t.id);
        let mut v = Vocabulary {
            num_docs: file.num_docs,
            ..Default::default()
        };
        for (expected, term) in file.terms.into_iter().enumerate() {
            if term.id != expected {
                return Err(Error::param(format!("vocabulary ids not dense at {expected}")));
            }
            if term.df > file.num_docs {
                return Err(Error::param(format!("df of `{}` exceeds num_docs", term.token)));
            }
            if v.token_to_id.insert(term.token.clone(), term.id).is_some() {
                return Err(Error::param(format!("duplicate token `{}`", term.token)));
            }
            v.id_to_token.push(term.token);
            v.doc_freq.push(term.df);
        }
        Ok(v)
    }
}

/// Sparse term counts for one document, sorted by token id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BowDoc {
    pub entries: Vec<(usize, u32)>,
}

impl BowDoc {
    /// Builds from unsorted pairs, merging duplicate ids and dropping zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for (id, c) in pairs {
            if c > 0 {
                *counts.entry(id).or_insert(0) += c;
            }
        }
        BowDoc {
            entries: counts.into_iter().collect(),
        }
    }

    /// Builds from a token-id sequence.
    pub fn from_ids(ids: &[usize]) -> Self {
        Self::from_pairs(ids.iter().map(|&id| (id, 1)))
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|&(_, c)| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Token ids with multiplicity, in id order.
    pub fn expand(&self) -> Vec<usize> {
        self.entries
            .iter()
            .flat_map(|&(id, c)| std::iter::repeat_n(id, c as usize))
            .collect()
    }
}

/// Sparse tf-idf weights for one document, sorted by token id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TfIdfDoc {
    pub entries: Vec<(usize, f64)>,
}

impl TfIdfDoc {
    /// Integer multiplicities for count-based samplers: each weight rounded
    /// to the nearest integer, never below one.
    pub fn to_counts(&self) -> BowDoc {
        BowDoc {
            entries: self
                .entries
                .iter()
                .map(|&(id, w)| (id, (w.round() as u32).max(1)))
                .collect(),
        }
    }
}

/// Documents plus the size of the id space they draw from.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    docs: Vec<BowDoc>,
    num_terms: usize,
}

impl Corpus {
    pub fn new(docs: Vec<BowDoc>, num_terms: usize) -> Result<Self> {
        for doc in &docs {
            for &(id, _) in &doc.entries {
                if id >= num_terms {
                    return Err(Error::UnknownToken(id));
                }
            }
        }
        Ok(Corpus { docs, num_terms })
    }

    /// Encodes term lists against `vocab`; with `tfidf` the counts are
    /// replaced by rounded tf-idf weights.
    pub fn from_terms<S: AsRef<str>>(vocab: &Vocabulary, docs: &[Vec<S>], tfidf: bool) -> Result<Self> {
        let docs = docs
            .iter()
            .map(|terms| {
                let bow = vocab.doc2bow(terms);
                if tfidf {
                    Ok(vocab.tfidf(&bow)?.to_counts())
                } else {
                    Ok(bow)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus {
            docs,
            num_terms: vocab.len(),
        })
    }

    pub fn docs(&self) -> &[BowDoc] {
        &self.docs
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_terms(&self) -> usize {
        self.num_terms
    }

    pub fn total_tokens(&self) -> usize {
        self.docs.iter().map(BowDoc::total).sum()
    }
}
