//! Synthetic Arabic-English code-switched text generation under the
//! Equivalence Constraint, with the supporting alignment, projection,
//! sampling and n-gram language-model evaluation stages.

pub mod aligner;
pub mod corpus_io;
pub mod error;
pub mod generator;
pub mod ngram_lm;
pub mod par;
pub mod pipeline;
pub mod projector;
pub mod sampler;
pub mod segmenter;
pub mod synth;

pub use error::{Error, Result};
