//! End-to-end glue: raw rows to labeled term lists to a modeling corpus.

use rayon::prelude::*;

use crate::corpus::{Corpus, Vocabulary};
use crate::error::Result;
use crate::ingest::{filter_records, label_of, slice_by_year, Diagnostics, LabeledDoc, TrollRecord};
use crate::textprep::preprocess;

/// Preprocesses texts in parallel, keeping input order.
pub fn preprocess_all<S: AsRef<str> + Sync>(texts: &[S]) -> Vec<Vec<String>> {
    texts.par_iter().map(|t| preprocess(t.as_ref())).collect()
}

/// Filters to English left/right troll rows, optionally one year, then
/// preprocesses and labels them. Documents left empty are dropped and
/// tallied.
pub fn troll_documents(
    records: Vec<TrollRecord>,
    year: Option<i32>,
    diag: &mut Diagnostics,
) -> Result<Vec<LabeledDoc>> {
    let mut records = filter_records(records);
    if let Some(year) = year {
        records = slice_by_year(&records, year, diag);
    }
    let texts: Vec<&str> = records.iter().map(|r| r.content.as_str()).collect();
    let terms = preprocess_all(&texts);
    let mut docs = Vec::with_capacity(records.len());
    for (r, terms) in records.iter().zip(terms) {
        let y = label_of(&r.account_category)?;
        if terms.is_empty() {
            diag.skip("empty after preprocessing");
            continue;
        }
        docs.push(LabeledDoc { terms, y });
    }
    Ok(docs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VocabOptions {
    pub no_below: usize,
    pub no_above: f64,
    pub keep_n: usize,
    pub tfidf: bool,
}

impl Default for VocabOptions {
    fn default() -> Self {
        VocabOptions {
            no_below: crate::corpus::DEFAULT_NO_BELOW,
            no_above: crate::corpus::DEFAULT_NO_ABOVE,
            keep_n: crate::corpus::DEFAULT_KEEP_N,
            tfidf: false,
        }
    }
}

/// A corpus built from labeled documents. `kept[i]` is the index of the
/// input document behind `corpus.docs()[i]`.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub vocab: Vocabulary,
    pub corpus: Corpus,
    pub ys: Vec<f64>,
    pub kept: Vec<usize>,
}

/// Builds and filters the vocabulary, then encodes every document.
/// Documents with no surviving terms are dropped and tallied.
pub fn build_corpus(docs: &[LabeledDoc], opts: &VocabOptions, diag: &mut Diagnostics) -> Result<PreparedCorpus> {
    let terms: Vec<&[String]> = docs.iter().map(|d| d.terms.as_slice()).collect();
    let mut vocab = Vocabulary::default();
    for t in &terms {
        vocab.add_document(t);
    }
    let vocab = vocab.filter_extremes(opts.no_below, opts.no_above, opts.keep_n)?;
    let (kept, ys): (Vec<usize>, Vec<f64>) = docs
        .iter()
        .enumerate()
        .filter(|(_, d)| !vocab.doc2bow(&d.terms).is_empty())
        .map(|(i, d)| (i, d.y))
        .unzip();
    for _ in kept.len()..docs.len() {
        diag.skip("no terms left after vocabulary filtering");
    }
    let kept_terms: Vec<Vec<String>> = kept.iter().map(|&i| docs[i].terms.clone()).collect();
    let corpus = Corpus::from_terms(&vocab, &kept_terms, opts.tfidf)?;
    Ok(PreparedCorpus {
        vocab,
        corpus,
        ys,
        kept,
    })
}

/// Encodes documents against an existing vocabulary; used for held-out
/// data. Returns the encoded documents with their input indices.
pub fn encode_with(
    vocab: &Vocabulary,
    docs: &[LabeledDoc],
    tfidf: bool,
) -> Result<(Vec<crate::corpus::BowDoc>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut kept = Vec::new();
    for (i, d) in docs.iter().enumerate() {
        let bow = vocab.doc2bow(&d.terms);
        if bow.is_empty() {
            continue;
        }
        out.push(if tfidf { vocab.tfidf(&bow)?.to_counts() } else { bow });
        kept.push(i);
    }
    Ok((out, kept))
}
