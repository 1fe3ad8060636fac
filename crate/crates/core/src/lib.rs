//! Topic modeling toolkit: tweet preprocessing, bag-of-words corpora, LDA and
//! supervised LDA trained by collapsed Gibbs sampling, and a five-member
//! sentiment ensemble.

pub mod corpus;
pub mod error;
pub mod ingest;
pub mod lda;
pub mod pipeline;
pub mod random;
pub mod sentiment;
pub mod slda;
pub mod textprep;

pub use error::{Error, Result};
