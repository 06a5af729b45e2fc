//! Domain-adapted word embeddings: fuse generic pre-trained vectors with
//! small-corpus domain-specific vectors via linear CCA or Gaussian-kernel
//! KCCA, and evaluate the result on sentence-level sentiment classification.

pub mod adapt;
pub mod cca;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod kcca;
pub mod linalg;
pub mod lsa;
pub mod par;
pub mod pipeline;

pub use error::{Error, Result};
