//! Tweet text normalization.
//!
//! The pipeline is fixed: tokenize, drop non-alphabetic tokens, lowercase,
//! drop stopwords, drop tokens outside the 2..=14 character window, then
//! lemmatize and stem. Every stage is a pure function over token lists.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use regex::Regex;
use rust_stemmers::{Algorithm, Stemmer};

const STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");
const LEMMAS_EN: &str = include_str!("../data/lemmas_en.tsv");

pub const MIN_TERM_LEN: usize = 2;
pub const MAX_TERM_LEN: usize = 14;

fn token_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\w+|[^\w\s]+").expect("static regex"))
}

fn letters_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{L}+$").expect("static regex"))
}

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| parse_stopwords(STOPWORDS_EN))
}

fn lemmas() -> &'static HashMap<&'static str, &'static str> {
    static MAP: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    MAP.get_or_init(|| parse_lemma_table(LEMMAS_EN))
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Parses a stopword file: one token per line, blank lines ignored.
pub fn parse_stopwords(text: &str) -> HashSet<&str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

/// Parses a `surface<TAB>lemma` table. Lines without a tab are skipped.
pub fn parse_lemma_table(text: &str) -> HashMap<&str, &str> {
    text.lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(s, l)| (s.trim(), l.trim()))
        .filter(|(s, l)| !s.is_empty() && !l.is_empty())
        .collect()
}

/// The bundled English stopword list.
pub fn stopword_list() -> Vec<&'static str> {
    STOPWORDS_EN.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

pub fn is_stopword(token: &str) -> bool {
    stopwords().contains(token)
}

/// True when every character is a Unicode letter and the token is non-empty.
pub fn is_alphabetic(token: &str) -> bool {
    letters_regex().is_match(token)
}

/// Splits text into maximal runs of word characters and maximal runs of
/// other non-whitespace characters.
pub fn tokenize(text: &str) -> Vec<String> {
    token_regex().find_iter(text).map(|m| m.as_str().to_owned()).collect()
}

pub fn strip_nonalpha(tokens: Vec<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| is_alphabetic(t)).collect()
}

/// Simple (one-to-one) lowercase mapping of a single character.
fn lower_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        // Multi-char full mappings (e.g. U+0130) keep only the base letter.
        (Some(l), Some(_)) => l,
        _ => c,
    }
}

pub fn lowercase_token(token: &str) -> String {
    token.chars().map(lower_char).collect()
}

pub fn lowercase(tokens: Vec<String>) -> Vec<String> {
    tokens.iter().map(|t| lowercase_token(t)).collect()
}

pub fn remove_stopwords(tokens: Vec<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| !is_stopword(t)).collect()
}

pub fn has_valid_length(token: &str) -> bool {
    let n = token.chars().count();
    (MIN_TERM_LEN..=MAX_TERM_LEN).contains(&n)
}

pub fn filter_length(tokens: Vec<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| has_valid_length(t)).collect()
}

fn lemma_then_stem(token: &str) -> String {
    let base = lemmas().get(token).copied().unwrap_or(token);
    stemmer().stem(base).into_owned()
}

/// Maps a token to its lemma (irregular forms table) and then its stem.
///
/// The lemma-then-stem step is iterated to a fixed point, so the result is
/// stable under a second application. Cycles, which the bundled table does
/// not produce, resolve to their lexicographically smallest member.
pub fn lemma_stem(token: &str) -> String {
    let mut seen: Vec<String> = vec![token.to_owned()];
    loop {
        let current = seen.last().expect("non-empty");
        let next = lemma_then_stem(current);
        if &next == current {
            return next;
        }
        if let Some(pos) = seen.iter().position(|s| *s == next) {
            return seen[pos..].iter().min().cloned().expect("non-empty cycle");
        }
        seen.push(next);
    }
}

/// True when a term satisfies every output invariant of [`preprocess`].
pub fn is_valid_term(term: &str) -> bool {
    is_alphabetic(term) && has_valid_length(term) && !is_stopword(term) && term.chars().all(|c| lower_char(c) == c)
}

/// Full normalization pipeline for one document.
///
/// Stemming can occasionally map a valid token onto a stopword (`wills` ->
/// `will`); such outputs are dropped so that every returned term is valid.
pub fn preprocess(text: &str) -> Vec<String> {
    let tokens = filter_length(remove_stopwords(lowercase(strip_nonalpha(tokenize(text)))));
    tokens
        .iter()
        .map(|t| lemma_stem(t))
        .filter(|t| is_valid_term(t))
        .collect()
}
