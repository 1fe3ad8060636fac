//! Dataset loading: troll-tweet CSV, sentiment CSV, row filters, year
//! slicing and seeded train/test splits.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LEFT_TROLL: &str = "LeftTroll";
pub const RIGHT_TROLL: &str = "RightTroll";
pub const ENGLISH: &str = "English";
pub const DEFAULT_TRAIN_FRAC: f64 = 0.7;

const TROLL_COLUMNS: [&str; 4] = ["content", "language", "account_category", "publish_date"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrollRecord {
    pub content: String,
    pub language: String,
    pub account_category: String,
    /// Raw timestamp text; parsed on demand by [`parse_publish_date`].
    pub publish_date: String,
}

/// A preprocessed document with a real-valued response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDoc {
    pub terms: Vec<String>,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Negative => "negative",
            Polarity::Positive => "positive",
        }
    }

    /// `-1.0` for negative, `+1.0` for positive.
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Negative => -1.0,
            Polarity::Positive => 1.0,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentRecord {
    pub polarity: Polarity,
    pub text: String,
}

/// Tally of skipped rows, grouped by reason in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    tallies: Vec<(String, usize)>,
}

impl Diagnostics {
    pub fn skip(&mut self, reason: &str) {
        match self.tallies.iter_mut().find(|(r, _)| r == reason) {
            Some((_, n)) => *n += 1,
            None => self.tallies.push((reason.to_owned(), 1)),
        }
    }

    pub fn count(&self, reason: &str) -> usize {
        self.tallies.iter().find(|(r, _)| r == reason).map_or(0, |(_, n)| *n)
    }

    pub fn total(&self) -> usize {
        self.tallies.iter().map(|(_, n)| n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tallies.is_empty()
    }

    pub fn merge(&mut self, other: Diagnostics) {
        for (reason, n) in other.tallies {
            match self.tallies.iter_mut().find(|(r, _)| *r == reason) {
                Some((_, m)) => *m += n,
                None => self.tallies.push((reason, n)),
            }
        }
    }

    /// One `skipped=<n> reason=<text>` line per reason.
    pub fn lines(&self) -> Vec<String> {
        self.tallies
            .iter()
            .map(|(r, n)| format!("skipped={n} reason={r}"))
            .collect()
    }

    pub fn emit(&self) {
        for line in self.lines() {
            eprintln!("{line}");
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn load_troll_csv(path: impl AsRef<Path>) -> Result<Vec<TrollRecord>> {
    read_troll_csv(open(path.as_ref())?)
}

/// Reads a headered troll CSV. Extra columns are ignored.
pub fn read_troll_csv<R: Read>(reader: R) -> Result<Vec<TrollRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(TROLL_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))?;
    }
    let needed = idx.iter().max().copied().unwrap_or(0) + 1;

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < needed {
            return Err(Error::ShortRow {
                row: i + 1,
                expected: needed,
                found: rec.len(),
            });
        }
        out.push(TrollRecord {
            content: rec[idx[0]].to_owned(),
            language: rec[idx[1]].to_owned(),
            account_category: rec[idx[2]].to_owned(),
            publish_date: rec[idx[3]].to_owned(),
        });
    }
    Ok(out)
}

/// Keeps English rows from the left and right troll categories.
pub fn filter_records(records: Vec<TrollRecord>) -> Vec<TrollRecord> {
    records
        .into_iter()
        .filter(|r| r.language == ENGLISH && (r.account_category == LEFT_TROLL || r.account_category == RIGHT_TROLL))
        .collect()
}

pub fn label_of(category: &str) -> Result<f64> {
    match category {
        LEFT_TROLL => Ok(-1.0),
        RIGHT_TROLL => Ok(1.0),
        other => Err(Error::UnknownCategory(other.to_owned())),
    }
}

/// Parses `M/D/YYYY H:MM` (optionally with seconds) or ISO-8601.
pub fn parse_publish_date(text: &str) -> Option<NaiveDateTime> {
    let text = text.trim();
    const FORMATS: [&str; 5] = [
        "%m/%d/%Y %H:%M",
        "%m/%d/%Y %H:%M:%S",
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%d %H:%M",
    ];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
        .or_else(|| DateTime::parse_from_rfc3339(text).ok().map(|d| d.naive_utc()))
        .or_else(|| {
            NaiveDate::parse_from_str(text, "%Y-%m-%d")
                .ok()
                .and_then(|d| d.and_hms_opt(0, 0, 0))
        })
}

/// Keeps rows published in `year`; unparseable dates are tallied in `diag`.
pub fn slice_by_year(records: &[TrollRecord], year: i32, diag: &mut Diagnostics) -> Vec<TrollRecord> {
    records
        .iter()
        .filter(|r| match parse_publish_date(&r.publish_date) {
            Some(dt) => dt.year() == year,
            None => {
                diag.skip("unparseable publish_date");
                false
            }
        })
        .cloned()
        .collect()
}

/// Seeded shuffle, then the first `round(train_frac * n)` items train.
pub fn split_train_test<T>(mut docs: Vec<T>, train_frac: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::param(format!("train_frac must be in (0, 1), got {train_frac}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    docs.shuffle(&mut rng);
    let cut = (train_frac * docs.len() as f64).round() as usize;
    let test = docs.split_off(cut.min(docs.len()));
    Ok((docs, test))
}

pub fn load_sentiment_csv(
    path: impl AsRef<Path>,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<SentimentRecord>, Diagnostics)> {
    read_sentiment_csv(open(path.as_ref())?, fraction, seed)
}

/// Reads the headerless six-column polarity corpus
/// (`polarity,id,date,query,user,text`, polarity 0 or 4) and draws a
/// class-stratified sample of `round(fraction * n_class)` rows per class.
/// Sampled rows keep their file order. Non-UTF-8 bytes are replaced.
pub fn read_sentiment_csv<R: Read>(reader: R, fraction: f64, seed: u64) -> Result<(Vec<SentimentRecord>, Diagnostics)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::param(format!(
            "sentiment fraction must be in (0, 1], got {fraction}"
        )));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut diag = Diagnostics::default();
    let mut rows = Vec::new();
    for rec in rdr.byte_records() {
        let rec = rec?;
        if rec.len() < 6 {
            diag.skip("short row");
            continue;
        }
        let polarity = match rec[0].trim_ascii() {
            b"0" => Polarity::Negative,
            b"4" => Polarity::Positive,
            _ => {
                diag.skip("polarity not in {0,4}");
                continue;
            }
        };
        rows.push(SentimentRecord {
            polarity,
            text: String::from_utf8_lossy(&rec[5]).into_owned(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![false; rows.len()];
    for class in [Polarity::Negative, Polarity::Positive] {
        let members: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].polarity == class).collect();
        let take = (fraction * members.len() as f64).round() as usize;
        for &i in members.choose_multiple(&mut rng, take) {
            keep[i] = true;
        }
    }
    let sample = rows.into_iter().zip(keep).filter_map(|(r, k)| k.then_some(r)).collect();
    Ok((sample, diag))
}
