//! Line-aligned parallel corpora: loading, ordered extraction, and dialogue
//! window sampling.
//!
//! A corpus is two plain-text files with one utterance per line (line `i` of
//! the source file translates line `i` of the target file) plus an optional
//! boundaries file listing the 0-based line index where each document (film)
//! starts. Nothing in this module ever reorders lines within a document.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default lower bound on the number of consecutive utterances in a window.
pub const DEFAULT_K_MIN: usize = 2;
/// Default upper bound on the number of consecutive utterances in a window.
pub const DEFAULT_K_MAX: usize = 15;
/// Default ordered extraction budget, in aligned line pairs.
pub const DEFAULT_EXTRACT_LINES: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("source has {src} lines but target has {tgt}")]
    LineCountMismatch { src: usize, tgt: usize },
    #[error("malformed boundaries: {0}")]
    MalformedBoundaries(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no document has at least {k_min} lines")]
    CorpusTooShort { k_min: usize },
    #[error("invalid window bounds k_min={k_min} k_max={k_max}")]
    InvalidBounds { k_min: usize, k_max: usize },
    #[error("source and target share the language tag {0:?}")]
    SameLanguage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CorpusError {
    /// Stable machine-readable code used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            CorpusError::LineCountMismatch { .. } => "LineCountMismatch",
            CorpusError::MalformedBoundaries(_) => "MalformedBoundaries",
            CorpusError::EmptyCorpus => "EmptyCorpus",
            CorpusError::CorpusTooShort { .. } => "CorpusTooShort",
            CorpusError::InvalidBounds { .. } => "InvalidBounds",
            CorpusError::SameLanguage(_) => "SameLanguage",
            CorpusError::Io { .. } => "IoError",
        }
    }
}

/// A language tag such as `en` or `zh`. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Language(Arc<str>);

impl Language {
    pub fn new(tag: &str) -> Self {
        Language(Arc::from(tag))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Language {
    fn from(s: &str) -> Self {
        Language::new(s)
    }
}

impl Serialize for Language {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Language {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Language::new(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub text: String,
    /// Position within the owning document.
    pub index: usize,
    pub language: Language,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelDocument {
    pub doc_id: String,
    pub src_lines: Vec<Utterance>,
    pub tgt_lines: Vec<Utterance>,
}

impl ParallelDocument {
    pub fn len(&self) -> usize {
        self.src_lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src_lines.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub documents: Vec<ParallelDocument>,
    pub src_lang: Language,
    pub tgt_lang: Language,
    pub total_lines: usize,
}

/// Which side of a parallel corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Src,
    Tgt,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Src => Side::Tgt,
            Side::Tgt => Side::Src,
        }
    }
}

impl ParallelCorpus {
    /// Builds a corpus from already-split line pairs. `boundaries` follows
    /// the same rules as the boundaries file.
    pub fn from_lines(
        src: Vec<String>,
        tgt: Vec<String>,
        boundaries: Option<&[usize]>,
        src_lang: Language,
        tgt_lang: Language,
    ) -> Result<Self, CorpusError> {
        if src.len() != tgt.len() {
            return Err(CorpusError::LineCountMismatch {
                src: src.len(),
                tgt: tgt.len(),
            });
        }
        if src.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        if src_lang == tgt_lang {
            return Err(CorpusError::SameLanguage(src_lang.to_string()));
        }
        let total = src.len();
        let starts: Vec<usize> = match boundaries {
            Some(b) => {
                check_boundaries(b, total)?;
                b.to_vec()
            }
            None => vec![0],
        };

        let mut documents = Vec::with_capacity(starts.len());
        let mut src_iter = src.into_iter();
        let mut tgt_iter = tgt.into_iter();
        for (d, &start) in starts.iter().enumerate() {
            let end = starts.get(d + 1).copied().unwrap_or(total);
            let n = end - start;
            let src_lines = (&mut src_iter)
                .take(n)
                .enumerate()
                .map(|(index, text)| Utterance {
                    text,
                    index,
                    language: src_lang.clone(),
                })
                .collect();
            let tgt_lines = (&mut tgt_iter)
                .take(n)
                .enumerate()
                .map(|(index, text)| Utterance {
                    text,
                    index,
                    language: tgt_lang.clone(),
                })
                .collect();
            documents.push(ParallelDocument {
                doc_id: format!("doc{d}"),
                src_lines,
                tgt_lines,
            });
        }
        Ok(ParallelCorpus {
            documents,
            src_lang,
            tgt_lang,
            total_lines: total,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.total_lines == 0
    }

    pub fn lines<'d>(&self, doc: &'d ParallelDocument, side: Side) -> &'d [Utterance] {
        match side {
            Side::Src => &doc.src_lines,
            Side::Tgt => &doc.tgt_lines,
        }
    }

    pub fn language(&self, side: Side) -> &Language {
        match side {
            Side::Src => &self.src_lang,
            Side::Tgt => &self.tgt_lang,
        }
    }

    /// 0-based global line indices where each document starts.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.documents.len());
        let mut at = 0;
        for doc in &self.documents {
            out.push(at);
            at += doc.len();
        }
        out
    }

    /// Returns a copy with whole documents permuted by `rng`. Lines within a
    /// document keep their order.
    pub fn shuffle_documents<R: Rng + ?Sized>(&self, rng: &mut R) -> ParallelCorpus {
        let mut out = self.clone();
        out.documents.shuffle(rng);
        out
    }
}

fn check_boundaries(b: &[usize], total: usize) -> Result<(), CorpusError> {
    match b.first() {
        None => return Err(CorpusError::MalformedBoundaries("empty boundary list".into())),
        Some(&first) if first != 0 => {
            return Err(CorpusError::MalformedBoundaries(format!(
                "first boundary must be 0, got {first}"
            )))
        }
        _ => {}
    }
    for w in b.windows(2) {
        if w[1] <= w[0] {
            return Err(CorpusError::MalformedBoundaries(format!(
                "boundaries not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&last) = b.last() {
        if last >= total {
            return Err(CorpusError::MalformedBoundaries(format!(
                "boundary {last} out of range for {total} lines"
            )));
        }
    }
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>, CorpusError> {
    let raw = fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(raw
        .lines()
        .map(|l| l.trim_end_matches('\r').to_string())
        .collect())
}

/// Parses a boundaries file: one integer per line, blank lines ignored.
pub fn parse_boundaries(text: &str) -> Result<Vec<usize>, CorpusError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<usize>()
                .map_err(|_| CorpusError::MalformedBoundaries(format!("not an index: {l:?}")))
        })
        .collect()
}

/// Loads a line-aligned corpus from disk.
pub fn load_parallel_corpus(
    src_path: &Path,
    tgt_path: &Path,
    boundaries_path: Option<&Path>,
    src_lang: Language,
    tgt_lang: Language,
) -> Result<ParallelCorpus, CorpusError> {
    let src = read_lines(src_path)?;
    let tgt = read_lines(tgt_path)?;
    let boundaries = match boundaries_path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CorpusError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            Some(parse_boundaries(&text)?)
        }
        None => None,
    };
    ParallelCorpus::from_lines(src, tgt, boundaries.as_deref(), src_lang, tgt_lang)
}

/// Returns the first `n_lines` aligned pairs in corpus order. The final
/// document is truncated if it straddles the cut.
pub fn extract_ordered_prefix(
    corpus: &ParallelCorpus,
    n_lines: usize,
) -> Result<ParallelCorpus, CorpusError> {
    if corpus.is_empty() || n_lines == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    if n_lines >= corpus.total_lines {
        return Ok(corpus.clone());
    }
    let mut remaining = n_lines;
    let mut documents = Vec::new();
    for doc in &corpus.documents {
        if remaining == 0 {
            break;
        }
        let take = doc.len().min(remaining);
        documents.push(ParallelDocument {
            doc_id: doc.doc_id.clone(),
            src_lines: doc.src_lines[..take].to_vec(),
            tgt_lines: doc.tgt_lines[..take].to_vec(),
        });
        remaining -= take;
    }
    Ok(ParallelCorpus {
        documents,
        src_lang: corpus.src_lang.clone(),
        tgt_lang: corpus.tgt_lang.clone(),
        total_lines: n_lines,
    })
}

/// K consecutive aligned utterances from one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogueWindow<'a> {
    pub doc_id: &'a str,
    pub doc_index: usize,
    pub start: usize,
    pub k: usize,
    pub src_utterances: &'a [Utterance],
    pub tgt_utterances: &'a [Utterance],
}

impl<'a> DialogueWindow<'a> {
    /// The window of `k` lines starting at `start` in document `doc_index`.
    pub fn at(corpus: &'a ParallelCorpus, doc_index: usize, start: usize, k: usize) -> Option<Self> {
        let doc = corpus.documents.get(doc_index)?;
        if k == 0 || start + k > doc.len() {
            return None;
        }
        Some(DialogueWindow {
            doc_id: &doc.doc_id,
            doc_index,
            start,
            k,
            src_utterances: &doc.src_lines[start..start + k],
            tgt_utterances: &doc.tgt_lines[start..start + k],
        })
    }

    pub fn side(&self, side: Side) -> &'a [Utterance] {
        match side {
            Side::Src => self.src_utterances,
            Side::Tgt => self.tgt_utterances,
        }
    }
}

/// Window sampler with cached per-length start tables.
///
/// For a span length `k`, each document contributes `len - k + 1` valid
/// starts; a start is drawn uniformly over the union, which picks documents
/// proportionally to their valid-start counts.
#[derive(Debug, Clone)]
pub struct WindowSampler<'a> {
    corpus: &'a ParallelCorpus,
    doc_lens: Vec<usize>,
    max_len: usize,
    // cumulative valid-start counts, indexed by span length
    cumulative: BTreeMap<usize, Vec<usize>>,
}

impl<'a> WindowSampler<'a> {
    pub fn new(corpus: &'a ParallelCorpus) -> Self {
        let doc_lens: Vec<usize> = corpus.documents.iter().map(|d| d.len()).collect();
        let max_len = doc_lens.iter().copied().max().unwrap_or(0);
        WindowSampler {
            corpus,
            doc_lens,
            max_len,
            cumulative: BTreeMap::new(),
        }
    }

    pub fn corpus(&self) -> &'a ParallelCorpus {
        self.corpus
    }

    pub fn max_doc_len(&self) -> usize {
        self.max_len
    }

    /// Precomputes start tables for every span length in `lo..=hi`, so that
    /// later sampling can go through a shared reference.
    pub fn prepare(&mut self, lo: usize, hi: usize) {
        for span in lo.max(1)..=hi.min(self.max_len) {
            self.table(span);
        }
    }

    fn table(&mut self, span: usize) -> &[usize] {
        let doc_lens = &self.doc_lens;
        self.cumulative.entry(span).or_insert_with(|| {
            let mut acc = 0;
            doc_lens
                .iter()
                .map(|&len| {
                    acc += (len + 1).saturating_sub(span);
                    acc
                })
                .collect()
        })
    }

    /// Draws a window of `k ∈ [k_min, k_max]` utterances followed by `reserve`
    /// extra lines that must also fit inside the same document.
    pub fn sample_span<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        k_min: usize,
        k_max: usize,
        reserve: usize,
    ) -> Result<DialogueWindow<'a>, CorpusError> {
        let (k, span) = self.draw_k(rng, k_min, k_max, reserve)?;
        self.table(span);
        Ok(self.locate(rng, k, span))
    }

    /// Like [`sample_span`](Self::sample_span) but only uses tables built by
    /// [`prepare`](Self::prepare); panics if a needed table is missing.
    pub fn sample_prepared<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        k_min: usize,
        k_max: usize,
        reserve: usize,
    ) -> Result<DialogueWindow<'a>, CorpusError> {
        let (k, span) = self.draw_k(rng, k_min, k_max, reserve)?;
        Ok(self.locate(rng, k, span))
    }

    fn draw_k<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        k_min: usize,
        k_max: usize,
        reserve: usize,
    ) -> Result<(usize, usize), CorpusError> {
        if k_min == 0 || k_max < k_min {
            return Err(CorpusError::InvalidBounds { k_min, k_max });
        }
        if self.corpus.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let longest_k = self.max_len.saturating_sub(reserve);
        if longest_k < k_min {
            return Err(CorpusError::CorpusTooShort {
                k_min: k_min + reserve,
            });
        }
        let mut k = rng.gen_range(k_min..=k_max);
        if k > longest_k {
            k = rng.gen_range(k_min..=longest_k);
        }
        Ok((k, k + reserve))
    }

    fn locate<R: Rng + ?Sized>(&self, rng: &mut R, k: usize, span: usize) -> DialogueWindow<'a> {
        let table = self
            .cumulative
            .get(&span)
            .expect("start table prepared for span");
        let total = *table.last().expect("non-empty corpus");
        let r = rng.gen_range(0..total);
        let doc_index = table.partition_point(|&c| c <= r);
        let before = if doc_index == 0 { 0 } else { table[doc_index - 1] };
        let start = r - before;
        let doc = &self.corpus.documents[doc_index];
        DialogueWindow {
            doc_id: &doc.doc_id,
            doc_index,
            start,
            k,
            src_utterances: &doc.src_lines[start..start + k],
            tgt_utterances: &doc.tgt_lines[start..start + k],
        }
    }
}

/// Samples one window with `k_min ≤ k ≤ k_max`, uniformly over valid starts.
pub fn sample_window<'a, R: Rng + ?Sized>(
    corpus: &'a ParallelCorpus,
    rng: &mut R,
    k_min: usize,
    k_max: usize,
) -> Result<DialogueWindow<'a>, CorpusError> {
    WindowSampler::new(corpus).sample_span(rng, k_min, k_max, 0)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SideStats {
    pub tokens: usize,
    pub blank_lines: usize,
}

/// Read-only summary of a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub documents: usize,
    pub lines: usize,
    pub src: SideStats,
    pub tgt: SideStats,
    /// Lines whose (src, tgt) pair already appeared earlier in the corpus.
    pub duplicate_pairs: usize,
    /// Document length → number of documents with that length.
    pub doc_length_histogram: BTreeMap<usize, usize>,
}

impl CorpusStats {
    /// `key: value` lines, one per scalar, histogram last.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("documents: {}\n", self.documents));
        s.push_str(&format!("lines: {}\n", self.lines));
        s.push_str(&format!("src_tokens: {}\n", self.src.tokens));
        s.push_str(&format!("tgt_tokens: {}\n", self.tgt.tokens));
        s.push_str(&format!("src_blank_lines: {}\n", self.src.blank_lines));
        s.push_str(&format!("tgt_blank_lines: {}\n", self.tgt.blank_lines));
        s.push_str(&format!("duplicate_pairs: {}\n", self.duplicate_pairs));
        for (len, count) in &self.doc_length_histogram {
            s.push_str(&format!("doc_length[{len}]: {count}\n"));
        }
        s
    }
}

pub fn corpus_stats(corpus: &ParallelCorpus) -> CorpusStats {
    use crate::maskgen::tokenize;
    use std::collections::HashSet;

    let mut stats = CorpusStats {
        documents: corpus.documents.len(),
        lines: corpus.total_lines,
        ..Default::default()
    };
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    for doc in &corpus.documents {
        *stats.doc_length_histogram.entry(doc.len()).or_insert(0) += 1;
        for (s, t) in doc.src_lines.iter().zip(&doc.tgt_lines) {
            let ns = tokenize(&s.text, &s.language).len();
            let nt = tokenize(&t.text, &t.language).len();
            stats.src.tokens += ns;
            stats.tgt.tokens += nt;
            stats.src.blank_lines += usize::from(ns == 0);
            stats.tgt.blank_lines += usize::from(nt == 0);
            if !seen.insert((&s.text, &t.text)) {
                stats.duplicate_pairs += 1;
            }
        }
    }
    stats
}
