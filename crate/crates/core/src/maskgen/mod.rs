//! Masked-prediction example construction for the intermediate tasks:
//! TAPT, MonoDM, TLM, XDM, RM and the utterance-level MonoDM/TLM variants.
//!
//! Every generator is a pull-based, index-addressable stream. Example `i` is
//! built from its own random stream derived from `(seed, i)`, so any shard
//! `[a, b)` can be produced independently and shards concatenate to the
//! single-stream output.

mod generate;
mod masking;
mod tokenize;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusError, Language, DEFAULT_K_MAX, DEFAULT_K_MIN};

pub use generate::{
    chat_example, gen_monodm, gen_rm, gen_sentence_variant, gen_tapt, gen_tlm, gen_xdm,
    monodm_example, tapt_example, tlm_example, ExampleBuilder,
    ExampleGenerator,
};
pub use masking::{apply_masks, mask_count, select_mask_positions, MaskingScheme};
pub use tokenize::{detokenize, is_cjk, normalize, segment, tokenize};
pub use validate::{validate_example, validate_example_with, ValidationOptions, Verdict, Violation};

/// The mask sentinel.
pub const MASK: &str = "[MASK]";
/// Reserved for out-of-vocabulary tokens downstream.
pub const UNK: &str = "[UNK]";

/// Default number of examples per task.
pub const DEFAULT_N_EXAMPLES: usize = 100_000;
/// Default fraction of eligible words masked.
pub const DEFAULT_MASK_RATE: f64 = 0.15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaskgenError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("every position is protected; nothing to mask")]
    NoEligiblePositions,
    #[error("no document is long enough to hold a context of {k_min} lines plus a reply")]
    NoReplyAvailable { k_min: usize },
    #[error("input is empty")]
    EmptyInput,
    #[error("no usable window found after {attempts} attempts (blank lines?)")]
    NoUsableWindow { attempts: usize },
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
}

impl MaskgenError {
    pub fn code(&self) -> &'static str {
        match self {
            MaskgenError::Corpus(e) => e.code(),
            MaskgenError::NoEligiblePositions => "NoEligiblePositions",
            MaskgenError::NoReplyAvailable { .. } => "NoReplyAvailable",
            MaskgenError::EmptyInput => "EmptyInput",
            MaskgenError::NoUsableWindow { .. } => "NoUsableWindow",
            MaskgenError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "TAPT")]
    Tapt,
    #[serde(rename = "MONODM")]
    MonoDm,
    #[serde(rename = "TLM")]
    Tlm,
    #[serde(rename = "XDM")]
    Xdm,
    #[serde(rename = "RM")]
    Rm,
    #[serde(rename = "MONODM_SENT")]
    MonoDmSent,
    #[serde(rename = "TLM_SENT")]
    TlmSent,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Tapt,
        Task::MonoDm,
        Task::Tlm,
        Task::Xdm,
        Task::Rm,
        Task::MonoDmSent,
        Task::TlmSent,
    ];

    /// Tag used in example records.
    pub fn tag(self) -> &'static str {
        match self {
            Task::Tapt => "TAPT",
            Task::MonoDm => "MONODM",
            Task::Tlm => "TLM",
            Task::Xdm => "XDM",
            Task::Rm => "RM",
            Task::MonoDmSent => "MONODM_SENT",
            Task::TlmSent => "TLM_SENT",
        }
    }

    /// Name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Task::Tapt => "tapt",
            Task::MonoDm => "monodm",
            Task::Tlm => "tlm",
            Task::Xdm => "xdm",
            Task::Rm => "rm",
            Task::MonoDmSent => "monodm-sent",
            Task::TlmSent => "tlm-sent",
        }
    }

    /// Number of language spans every example of this task carries.
    pub fn span_count(self) -> usize {
        match self {
            Task::Tapt | Task::MonoDm | Task::MonoDmSent => 1,
            Task::Tlm | Task::Xdm | Task::Rm | Task::TlmSent => 2,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.cli_name() == s || t.tag() == s)
            .ok_or_else(|| format!("unknown task {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub utterance_ordinal: usize,
    pub language: Language,
}

/// Half-open token range `[start, end)` in one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSpan {
    pub start: usize,
    pub end: usize,
    pub language: Language,
}

/// Which side(s) of the corpus an example was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "src")]
    Src,
    #[serde(rename = "tgt")]
    Tgt,
    /// Both sides of the same window, source first.
    #[serde(rename = "src+tgt")]
    Parallel,
    /// Source-language context, target-language reply.
    #[serde(rename = "src>tgt")]
    SrcToTgt,
    /// Target-language context, source-language reply.
    #[serde(rename = "tgt>src")]
    TgtToSrc,
    /// Task-dataset utterance, no parallel corpus involved.
    #[serde(rename = "task")]
    Task,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub doc_id: String,
    pub start: usize,
    pub k: usize,
    pub direction: Direction,
}

/// One training instance for a masked-prediction intermediate task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedExample {
    pub task: Task,
    pub tokens: Vec<Token>,
    pub mask_positions: Vec<usize>,
    pub targets: Vec<String>,
    pub language_spans: Vec<LanguageSpan>,
    pub utterance_boundaries: Vec<usize>,
    pub provenance: Provenance,
}

impl MaskedExample {
    /// Token surfaces with the targets put back.
    pub fn demasked_surfaces(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.tokens.iter().map(|t| t.surface.as_str()).collect();
        for (&p, t) in self.mask_positions.iter().zip(&self.targets) {
            if let Some(slot) = out.get_mut(p) {
                *slot = t;
            }
        }
        out
    }

    /// Token range of utterance `ordinal`.
    pub fn utterance_range(&self, ordinal: usize) -> Option<std::ops::Range<usize>> {
        let start = *self.utterance_boundaries.get(ordinal)?;
        let end = self
            .utterance_boundaries
            .get(ordinal + 1)
            .copied()
            .unwrap_or(self.tokens.len());
        Some(start..end)
    }

    /// De-masked text of each utterance, in order.
    pub fn demasked_utterances(&self) -> Vec<String> {
        let surfaces = self.demasked_surfaces();
        (0..self.utterance_boundaries.len())
            .filter_map(|o| self.utterance_range(o))
            .map(|r| detokenize(&surfaces[r]))
            .collect()
    }
}

/// Context/reply direction for XDM and RM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectionPolicy {
    #[default]
    Alternate,
    FixedSrcContext,
    FixedTgtContext,
}

impl DirectionPolicy {
    pub fn name(self) -> &'static str {
        match self {
            DirectionPolicy::Alternate => "alternate",
            DirectionPolicy::FixedSrcContext => "fixed-src-context",
            DirectionPolicy::FixedTgtContext => "fixed-tgt-context",
        }
    }
}

impl FromStr for DirectionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alternate" => Ok(DirectionPolicy::Alternate),
            "fixed-src-context" => Ok(DirectionPolicy::FixedSrcContext),
            "fixed-tgt-context" => Ok(DirectionPolicy::FixedTgtContext),
            _ => Err(format!("unknown direction policy {s:?}")),
        }
    }
}

/// Which corpus side(s) monolingual tasks draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SidePolicy {
    /// Alternate source and target per example.
    #[default]
    Both,
    Src,
    Tgt,
}

impl SidePolicy {
    pub fn name(self) -> &'static str {
        match self {
            SidePolicy::Both => "both",
            SidePolicy::Src => "src",
            SidePolicy::Tgt => "tgt",
        }
    }
}

impl FromStr for SidePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(SidePolicy::Both),
            "src" => Ok(SidePolicy::Src),
            "tgt" => Ok(SidePolicy::Tgt),
            _ => Err(format!("unknown side {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig {
    pub n_examples: usize,
    pub mask_rate: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub seed: u64,
    pub direction_policy: DirectionPolicy,
    pub side_policy: SidePolicy,
    /// Scales `n_examples`; 0.5, 1, 2 and 4 are the usual data-amount settings.
    pub budget_multiplier: f64,
    pub scheme: MaskingScheme,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            n_examples: DEFAULT_N_EXAMPLES,
            mask_rate: DEFAULT_MASK_RATE,
            k_min: DEFAULT_K_MIN,
            k_max: DEFAULT_K_MAX,
            seed: 0,
            direction_policy: DirectionPolicy::default(),
            side_policy: SidePolicy::default(),
            budget_multiplier: 1.0,
            scheme: MaskingScheme::default(),
        }
    }
}

impl GenerationConfig {
    pub fn with_examples(mut self, n: usize) -> Self {
        self.n_examples = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Number of examples actually emitted: `round(n_examples × budget_multiplier)`.
    pub fn effective_examples(&self) -> usize {
        (self.n_examples as f64 * self.budget_multiplier).round() as usize
    }

    pub fn validate(&self) -> Result<(), MaskgenError> {
        if !(self.mask_rate > 0.0 && self.mask_rate < 1.0) {
            return Err(MaskgenError::InvalidConfig(format!(
                "mask_rate must be in (0, 1), got {}",
                self.mask_rate
            )));
        }
        if self.n_examples == 0 {
            return Err(MaskgenError::InvalidConfig("n_examples must be ≥ 1".into()));
        }
        if !(self.budget_multiplier.is_finite() && self.budget_multiplier > 0.0)
            || self.effective_examples() == 0
        {
            return Err(MaskgenError::InvalidConfig(format!(
                "budget_multiplier {} leaves no examples",
                self.budget_multiplier
            )));
        }
        if self.k_min == 0 || self.k_max < self.k_min {
            return Err(MaskgenError::InvalidConfig(format!(
                "need 1 ≤ k_min ≤ k_max, got {}..{}",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }
}
