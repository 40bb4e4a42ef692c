//! Unsupervised morphological segmentation with embedding-built tries, a
//! Dirichlet-process morpheme lexicon and a trie/embedding/presence boundary
//! prior, trained by Gibbs sampling.
//!
//! The pipeline is: [`builder`] turns seed words and word vectors into tries,
//! [`sampler`] learns a [`model::Lexicon`] over the trie words, [`segmenter`]
//! decodes words under the learned lexicon, and [`eval`] scores the output
//! against a gold standard.

pub mod builder;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod manifest;
pub mod model;
pub mod sampler;
pub mod segmenter;
pub mod trie;
pub mod wordlist;

pub use builder::{BuilderParams, TrieMethod, TrieSet};
pub use embedding::{EmbeddingStore, Neighbor};
pub use error::{Error, ErrorKind, Result};
pub use eval::{evaluate, Analyses, EvalReport};
pub use model::{Lexicon, LexiconFile, ModelParams};
pub use sampler::{CorpusState, Sampler, SamplerConfig, TrainedModel};
pub use segmenter::{DecodeConfig, Segmentation, Segmenter, Strategy};
pub use trie::Trie;
pub use wordlist::WordList;
