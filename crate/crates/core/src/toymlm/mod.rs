//! A minimal masked-word predictor with tied input/output embeddings and
//! analytic gradients, trained on generated example streams, plus a
//! translation-pair alignment probe.

mod checkpoint;
mod model;
mod probe;
mod synthetic;
mod train;
mod vocab;

use thiserror::Error;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use model::{forward, loss_and_grad, loss_and_grad_encoded, mean_loss, EncodedExample, ToyMlm};
pub use probe::{alignment_score, cosine, AlignmentProbeSpec, AlignmentScore};
pub use synthetic::{make_synthetic_bilingual_corpus, SYNTHETIC_SRC_LANG, SYNTHETIC_TGT_LANG};
pub use train::{train, LossCurve, TrainConfig};
pub use vocab::{build_vocab, Vocabulary, MASK_ID, UNK_ID};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("input is empty")]
    EmptyInput,
    #[error("no context tokens remain after masking")]
    DegenerateContext,
    #[error("every example in the batch is degenerate")]
    AllDegenerate,
    #[error("loss became non-finite at epoch {epoch}; try a smaller learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("probe word {0:?} is not in the vocabulary")]
    UnknownProbeWord(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl ToyError {
    pub fn code(&self) -> &'static str {
        match self {
            ToyError::EmptyInput => "EmptyInput",
            ToyError::DegenerateContext => "DegenerateContext",
            ToyError::AllDegenerate => "AllDegenerate",
            ToyError::NonFiniteLoss { .. } => "NonFiniteLoss",
            ToyError::UnknownProbeWord(_) => "UnknownProbeWord",
            ToyError::InvalidConfig(_) => "InvalidConfig",
            ToyError::Checkpoint(_) => "CheckpointError",
        }
    }
}
