use std::ops::Range;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    CorpusError, DialogueWindow, Language, ParallelCorpus, ParallelDocument, Side, Utterance,
    WindowSampler,
};

use super::masking::{apply_masks, select_mask_positions, MaskingScheme};
use super::tokenize::segment;
use super::{
    Direction, DirectionPolicy, GenerationConfig, LanguageSpan, MaskedExample, MaskgenError,
    Provenance, SidePolicy, Task, Token,
};

/// Retries per example when a window contains a blank line.
const MAX_ATTEMPTS: usize = 1000;

/// Accumulates utterances into one example.
#[derive(Debug, Clone)]
pub struct ExampleBuilder {
    task: Task,
    tokens: Vec<Token>,
    spans: Vec<LanguageSpan>,
    boundaries: Vec<usize>,
}

impl ExampleBuilder {
    pub fn new(task: Task) -> Self {
        ExampleBuilder {
            task,
            tokens: Vec::new(),
            spans: Vec::new(),
            boundaries: Vec::new(),
        }
    }

    /// Appends one utterance and returns its token range, or `None` if it has
    /// no tokens (nothing is appended in that case).
    pub fn push_utterance(&mut self, text: &str, language: &Language) -> Option<Range<usize>> {
        let words = segment(text);
        if words.is_empty() {
            return None;
        }
        let start = self.tokens.len();
        let ordinal = self.boundaries.len();
        self.boundaries.push(start);
        self.tokens.extend(words.into_iter().map(|w| Token {
            surface: w.to_string(),
            utterance_ordinal: ordinal,
            language: language.clone(),
        }));
        let end = self.tokens.len();
        match self.spans.last_mut() {
            Some(span) if span.language == *language => span.end = end,
            _ => self.spans.push(LanguageSpan {
                start,
                end,
                language: language.clone(),
            }),
        }
        Some(start..end)
    }

    /// Appends every utterance; `None` if any of them is blank.
    pub fn push_all(&mut self, utterances: &[Utterance]) -> Option<Range<usize>> {
        let start = self.tokens.len();
        for u in utterances {
            self.push_utterance(&u.text, &u.language)?;
        }
        Some(start..self.tokens.len())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Masks `positions` (sorted, in range) and seals the example.
    pub fn finish<R: Rng + ?Sized>(
        self,
        positions: Vec<usize>,
        scheme: MaskingScheme,
        rng: &mut R,
        provenance: Provenance,
    ) -> MaskedExample {
        let ExampleBuilder {
            task,
            mut tokens,
            spans,
            boundaries,
        } = self;
        let mut surfaces: Vec<String> = tokens
            .iter_mut()
            .map(|t| std::mem::take(&mut t.surface))
            .collect();
        let targets = apply_masks(&mut surfaces, &positions, scheme, rng);
        for (t, s) in tokens.iter_mut().zip(surfaces) {
            t.surface = s;
        }
        MaskedExample {
            task,
            tokens,
            mask_positions: positions,
            targets,
            language_spans: spans,
            utterance_boundaries: boundaries,
            provenance,
        }
    }

    /// Masks at `cfg.mask_rate` over every position.
    fn finish_random<R: Rng + ?Sized>(
        self,
        cfg: &GenerationConfig,
        rng: &mut R,
        provenance: Provenance,
    ) -> Option<MaskedExample> {
        let positions = select_mask_positions(self.len(), cfg.mask_rate, rng, &[]).ok()?;
        Some(self.finish(positions, cfg.scheme, rng, provenance))
    }
}

/// MonoDM (or MONODM_SENT when `window.k == 1`) example from one side of a window.
pub fn monodm_example<R: Rng + ?Sized>(
    window: &DialogueWindow<'_>,
    side: Side,
    task: Task,
    cfg: &GenerationConfig,
    rng: &mut R,
) -> Option<MaskedExample> {
    let mut b = ExampleBuilder::new(task);
    b.push_all(window.side(side))?;
    let provenance = Provenance {
        doc_id: window.doc_id.to_string(),
        start: window.start,
        k: window.k,
        direction: match side {
            Side::Src => Direction::Src,
            Side::Tgt => Direction::Tgt,
        },
    };
    b.finish_random(cfg, rng, provenance)
}

/// TLM (or TLM_SENT) example: source side of the window, then target side.
pub fn tlm_example<R: Rng + ?Sized>(
    window: &DialogueWindow<'_>,
    task: Task,
    cfg: &GenerationConfig,
    rng: &mut R,
) -> Option<MaskedExample> {
    let mut b = ExampleBuilder::new(task);
    b.push_all(window.src_utterances)?;
    b.push_all(window.tgt_utterances)?;
    let provenance = Provenance {
        doc_id: window.doc_id.to_string(),
        start: window.start,
        k: window.k,
        direction: Direction::Parallel,
    };
    b.finish_random(cfg, rng, provenance)
}

/// XDM or RM example: `k` context lines from `context` side starting at
/// `start`, then the line at `start + k` from the other side as the reply.
pub fn chat_example<R: Rng + ?Sized>(
    doc: &ParallelDocument,
    start: usize,
    k: usize,
    context: Side,
    task: Task,
    cfg: &GenerationConfig,
    rng: &mut R,
) -> Option<MaskedExample> {
    debug_assert!(matches!(task, Task::Xdm | Task::Rm));
    if k == 0 || start + k >= doc.len() {
        return None;
    }
    let (ctx_lines, reply_lines) = match context {
        Side::Src => (&doc.src_lines, &doc.tgt_lines),
        Side::Tgt => (&doc.tgt_lines, &doc.src_lines),
    };
    let mut b = ExampleBuilder::new(task);
    b.push_all(&ctx_lines[start..start + k])?;
    let reply = &reply_lines[start + k];
    let reply_range = b.push_utterance(&reply.text, &reply.language)?;
    let provenance = Provenance {
        doc_id: doc.doc_id.clone(),
        start,
        k,
        direction: match context {
            Side::Src => Direction::SrcToTgt,
            Side::Tgt => Direction::TgtToSrc,
        },
    };
    match task {
        Task::Rm => {
            let positions: Vec<usize> = reply_range.collect();
            Some(b.finish(positions, MaskingScheme::Sentinel, rng, provenance))
        }
        _ => b.finish_random(cfg, rng, provenance),
    }
}

/// TAPT example from one task-dataset utterance.
pub fn tapt_example<R: Rng + ?Sized>(
    utterance: &Utterance,
    cfg: &GenerationConfig,
    rng: &mut R,
) -> Option<MaskedExample> {
    let mut b = ExampleBuilder::new(Task::Tapt);
    b.push_utterance(&utterance.text, &utterance.language)?;
    let provenance = Provenance {
        doc_id: "task".to_string(),
        start: utterance.index,
        k: 1,
        direction: Direction::Task,
    };
    b.finish_random(cfg, rng, provenance)
}

#[derive(Debug, Clone)]
enum Source<'a> {
    Windows {
        corpus: &'a ParallelCorpus,
        sampler: WindowSampler<'a>,
        reserve: usize,
    },
    Lines {
        corpus: &'a ParallelCorpus,
        doc_starts: Vec<usize>,
    },
    Utterances(Vec<&'a Utterance>),
}

/// Index-addressable example stream for one task.
#[derive(Debug, Clone)]
pub struct ExampleGenerator<'a> {
    task: Task,
    cfg: GenerationConfig,
    source: Source<'a>,
}

impl<'a> ExampleGenerator<'a> {
    /// Generator for any corpus-backed task (everything but TAPT).
    pub fn for_corpus(
        task: Task,
        corpus: &'a ParallelCorpus,
        cfg: GenerationConfig,
    ) -> Result<Self, MaskgenError> {
        cfg.validate()?;
        if corpus.is_empty() {
            return Err(CorpusError::EmptyCorpus.into());
        }
        let source = match task {
            Task::Tapt => {
                return Err(MaskgenError::InvalidConfig(
                    "TAPT draws from task utterances, not a parallel corpus".into(),
                ))
            }
            Task::MonoDm | Task::Tlm | Task::Xdm | Task::Rm => {
                let reserve = usize::from(matches!(task, Task::Xdm | Task::Rm));
                let mut sampler = WindowSampler::new(corpus);
                let longest = sampler.max_doc_len();
                if longest < cfg.k_min {
                    return Err(CorpusError::CorpusTooShort { k_min: cfg.k_min }.into());
                }
                if longest < cfg.k_min + reserve {
                    return Err(MaskgenError::NoReplyAvailable { k_min: cfg.k_min });
                }
                sampler.prepare(cfg.k_min + reserve, cfg.k_max + reserve);
                Source::Windows {
                    corpus,
                    sampler,
                    reserve,
                }
            }
            Task::MonoDmSent | Task::TlmSent => Source::Lines {
                corpus,
                doc_starts: corpus.boundaries(),
            },
        };
        Ok(ExampleGenerator { task, cfg, source })
    }

    /// TAPT generator over task-dataset utterances. Blank utterances are
    /// skipped; the rest are reused round-robin.
    pub fn for_utterances(
        utterances: &'a [Utterance],
        cfg: GenerationConfig,
    ) -> Result<Self, MaskgenError> {
        cfg.validate()?;
        let usable: Vec<&Utterance> = utterances
            .iter()
            .filter(|u| !segment(&u.text).is_empty())
            .collect();
        if usable.is_empty() {
            return Err(MaskgenError::EmptyInput);
        }
        Ok(ExampleGenerator {
            task: Task::Tapt,
            cfg,
            source: Source::Utterances(usable),
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn config(&self) -> &GenerationConfig {
        &self.cfg
    }

    /// Number of examples in the stream.
    pub fn len(&self) -> usize {
        self.cfg.effective_examples()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn rng_for(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(index as u64);
        rng
    }

    fn side_for(&self, index: usize) -> Side {
        match self.cfg.side_policy {
            SidePolicy::Both if index % 2 == 0 => Side::Src,
            SidePolicy::Both => Side::Tgt,
            SidePolicy::Src => Side::Src,
            SidePolicy::Tgt => Side::Tgt,
        }
    }

    fn context_side_for(&self, index: usize) -> Side {
        match self.cfg.direction_policy {
            DirectionPolicy::Alternate if index % 2 == 0 => Side::Src,
            DirectionPolicy::Alternate => Side::Tgt,
            DirectionPolicy::FixedSrcContext => Side::Src,
            DirectionPolicy::FixedTgtContext => Side::Tgt,
        }
    }

    /// Builds example `index` of the stream. Pure in `(seed, index)`.
    pub fn example_at(&self, index: usize) -> Result<MaskedExample, MaskgenError> {
        let mut rng = self.rng_for(index);
        let cfg = &self.cfg;
        match &self.source {
            Source::Utterances(utts) => {
                let u = utts[index % utts.len()];
                tapt_example(u, cfg, &mut rng).ok_or(MaskgenError::EmptyInput)
            }
            Source::Windows {
                corpus,
                sampler,
                reserve,
            } => {
                for _ in 0..MAX_ATTEMPTS {
                    let w = sampler.sample_prepared(&mut rng, cfg.k_min, cfg.k_max, *reserve)?;
                    let ex = match self.task {
                        Task::MonoDm => {
                            monodm_example(&w, self.side_for(index), self.task, cfg, &mut rng)
                        }
                        Task::Tlm => tlm_example(&w, self.task, cfg, &mut rng),
                        _ => chat_example(
                            &corpus.documents[w.doc_index],
                            w.start,
                            w.k,
                            self.context_side_for(index),
                            self.task,
                            cfg,
                            &mut rng,
                        ),
                    };
                    if let Some(ex) = ex {
                        return Ok(ex);
                    }
                }
                Err(MaskgenError::NoUsableWindow {
                    attempts: MAX_ATTEMPTS,
                })
            }
            Source::Lines { corpus, doc_starts } => {
                for _ in 0..MAX_ATTEMPTS {
                    let line = rng.gen_range(0..corpus.total_lines);
                    let doc_index = doc_starts.partition_point(|&s| s <= line) - 1;
                    let start = line - doc_starts[doc_index];
                    let w = DialogueWindow::at(corpus, doc_index, start, 1)
                        .expect("line index inside its document");
                    let ex = match self.task {
                        Task::MonoDmSent => {
                            monodm_example(&w, self.side_for(index), self.task, cfg, &mut rng)
                        }
                        _ => tlm_example(&w, self.task, cfg, &mut rng),
                    };
                    if let Some(ex) = ex {
                        return Ok(ex);
                    }
                }
                Err(MaskgenError::NoUsableWindow {
                    attempts: MAX_ATTEMPTS,
                })
            }
        }
    }

    /// Examples `range.start..range.end` in order.
    pub fn range(
        &self,
        range: Range<usize>,
    ) -> impl Iterator<Item = Result<MaskedExample, MaskgenError>> + '_ {
        range.map(move |i| self.example_at(i))
    }

    /// The whole stream.
    pub fn iter(&self) -> impl Iterator<Item = Result<MaskedExample, MaskgenError>> + '_ {
        self.range(0..self.len())
    }

    /// Contiguous index range owned by `shard` out of `n_shards`.
    pub fn shard_range(&self, shard: usize, n_shards: usize) -> Range<usize> {
        let n = self.len();
        let n_shards = n_shards.max(1);
        let lo = n * shard / n_shards;
        let hi = n * (shard + 1) / n_shards;
        lo..hi
    }

    /// Generates the stream on `n_shards` threads and concatenates the
    /// shards in order.
    pub fn generate_sharded(&self, n_shards: usize) -> Result<Vec<MaskedExample>, MaskgenError> {
        let n_shards = n_shards.max(1);
        let shards: Vec<Result<Vec<MaskedExample>, MaskgenError>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..n_shards)
                .map(|s| {
                    let range = self.shard_range(s, n_shards);
                    scope.spawn(move || self.range(range).collect())
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("shard thread panicked"))
                .collect()
        });
        let mut out = Vec::with_capacity(self.len());
        for shard in shards {
            out.extend(shard?);
        }
        Ok(out)
    }
}

pub fn gen_monodm<'a>(
    corpus: &'a ParallelCorpus,
    side: SidePolicy,
    mut cfg: GenerationConfig,
) -> Result<ExampleGenerator<'a>, MaskgenError> {
    cfg.side_policy = side;
    ExampleGenerator::for_corpus(Task::MonoDm, corpus, cfg)
}

pub fn gen_tlm(
    corpus: &ParallelCorpus,
    cfg: GenerationConfig,
) -> Result<ExampleGenerator<'_>, MaskgenError> {
    ExampleGenerator::for_corpus(Task::Tlm, corpus, cfg)
}

pub fn gen_xdm(
    corpus: &ParallelCorpus,
    cfg: GenerationConfig,
) -> Result<ExampleGenerator<'_>, MaskgenError> {
    ExampleGenerator::for_corpus(Task::Xdm, corpus, cfg)
}

pub fn gen_rm(
    corpus: &ParallelCorpus,
    cfg: GenerationConfig,
) -> Result<ExampleGenerator<'_>, MaskgenError> {
    ExampleGenerator::for_corpus(Task::Rm, corpus, cfg)
}

pub fn gen_tapt(
    utterances: &[Utterance],
    cfg: GenerationConfig,
) -> Result<ExampleGenerator<'_>, MaskgenError> {
    ExampleGenerator::for_utterances(utterances, cfg)
}

/// MONODM_SENT or TLM_SENT stream.
pub fn gen_sentence_variant(
    task: Task,
    corpus: &ParallelCorpus,
    cfg: GenerationConfig,
) -> Result<ExampleGenerator<'_>, MaskgenError> {
    if !matches!(task, Task::MonoDmSent | Task::TlmSent) {
        return Err(MaskgenError::InvalidConfig(format!(
            "{task} is not an utterance-level task"
        )));
    }
    ExampleGenerator::for_corpus(task, corpus, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maskgen::{mask_count, validate_example, MASK};

    fn toy_corpus() -> ParallelCorpus {
        let n = 40;
        let src: Vec<String> = (0..n).map(|i| format!("s{i} a b c")).collect();
        let tgt: Vec<String> = (0..n).map(|i| format!("t{i} x y z w")).collect();
        ParallelCorpus::from_lines(src, tgt, Some(&[0, 18]), "en".into(), "de".into()).unwrap()
    }

    fn cfg(n: usize) -> GenerationConfig {
        GenerationConfig::default().with_examples(n).with_seed(9)
    }

    #[test]
    fn monodm_window_of_forty_tokens_masks_six() {
        let src: Vec<String> = (0..10).map(|i| format!("w{i} a b c")).collect();
        let tgt = src.clone();
        let c = ParallelCorpus::from_lines(src, tgt, None, "en".into(), "zh".into()).unwrap();
        let w = DialogueWindow::at(&c, 0, 0, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ex = monodm_example(&w, Side::Src, Task::MonoDm, &cfg(1), &mut rng).unwrap();
        assert_eq!(ex.tokens.len(), 40);
        assert_eq!(ex.mask_positions.len(), 6);
        assert_eq!(ex.language_spans.len(), 1);
        assert_eq!(ex.utterance_boundaries.len(), 10);
    }

    #[test]
    fn monodm_both_sides_balanced() {
        let c = toy_corpus();
        let g = gen_monodm(&c, SidePolicy::Both, cfg(10)).unwrap();
        let exs: Vec<_> = g.iter().collect::<Result<_, _>>().unwrap();
        let src = exs.iter().filter(|e| e.provenance.direction == Direction::Src).count();
        assert_eq!(src, 5);
        assert!(exs.iter().all(|e| validate_example(e).is_valid()));
    }

    #[test]
    fn tlm_masks_over_both_spans() {
        let c = toy_corpus();
        let g = gen_tlm(&c, cfg(200)).unwrap();
        let mut hits = [false; 2];
        for ex in g.iter() {
            let ex = ex.unwrap();
            assert_eq!(ex.language_spans.len(), 2);
            assert_eq!(ex.mask_positions.len(), mask_count(ex.tokens.len(), 0.15));
            for &p in &ex.mask_positions {
                hits[usize::from(p >= ex.language_spans[1].start)] = true;
            }
        }
        assert_eq!(hits, [true, true]);
    }

    #[test]
    fn xdm_mask_count_on_small_chat() {
        // k=2 context of 8 tokens + reply of 5 tokens
        let c = toy_corpus();
        let doc = &c.documents[0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ex = chat_example(doc, 0, 2, Side::Src, Task::Xdm, &cfg(1), &mut rng).unwrap();
        assert_eq!(ex.tokens.len(), 13);
        assert_eq!(ex.mask_positions.len(), 1);
        assert_eq!(ex.provenance.direction, Direction::SrcToTgt);
    }

    #[test]
    fn xdm_alternates_direction() {
        let c = toy_corpus();
        let g = gen_xdm(&c, cfg(10)).unwrap();
        let fwd = g
            .iter()
            .filter(|e| e.as_ref().unwrap().provenance.direction == Direction::SrcToTgt)
            .count();
        assert_eq!(fwd, 5);
    }

    #[test]
    fn rm_masks_exactly_the_reply() {
        let c = toy_corpus();
        let g = gen_rm(&c, cfg(100)).unwrap();
        for ex in g.iter() {
            let ex = ex.unwrap();
            let last = ex.utterance_range(ex.utterance_boundaries.len() - 1).unwrap();
            assert_eq!(ex.mask_positions, last.clone().collect::<Vec<_>>());
            assert!(ex.tokens[..last.start].iter().all(|t| t.surface != MASK));
            assert!(validate_example(&ex).is_valid());
        }
    }

    #[test]
    fn reply_needs_room() {
        let c = ParallelCorpus::from_lines(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            None,
            "en".into(),
            "de".into(),
        )
        .unwrap();
        assert_eq!(
            gen_xdm(&c, cfg(1)).unwrap_err(),
            MaskgenError::NoReplyAvailable { k_min: 2 }
        );
        // with k=2 the window always ends at the document end
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(chat_example(&c.documents[0], 0, 2, Side::Src, Task::Rm, &cfg(1), &mut rng).is_none());
    }

    #[test]
    fn sentence_variants() {
        let c = toy_corpus();
        let g = gen_sentence_variant(Task::MonoDmSent, &c, cfg(100)).unwrap();
        let exs: Vec<_> = g.iter().collect::<Result<_, _>>().unwrap();
        assert!(exs.iter().all(|e| e.provenance.k == 1 && e.utterance_boundaries.len() == 1));
        let src = exs.iter().filter(|e| e.provenance.direction == Direction::Src).count();
        assert_eq!(src, 50);
        let g = gen_sentence_variant(Task::TlmSent, &c, cfg(20)).unwrap();
        for ex in g.iter() {
            let ex = ex.unwrap();
            assert_eq!(ex.utterance_boundaries.len(), 2);
            assert_eq!(ex.language_spans.len(), 2);
        }
        assert!(gen_sentence_variant(Task::Tlm, &c, cfg(1)).is_err());
    }

    #[test]
    fn tapt_round_robin_and_errors() {
        let utts: Vec<Utterance> = ["I would like an indian restaurant in the centre, please", "", "yes"]
            .iter()
            .enumerate()
            .map(|(i, t)| Utterance {
                text: t.to_string(),
                index: i,
                language: "en".into(),
            })
            .collect();
        let g = gen_tapt(&utts, cfg(5)).unwrap();
        let exs: Vec<_> = g.iter().collect::<Result<_, _>>().unwrap();
        let starts: Vec<_> = exs.iter().map(|e| e.provenance.start).collect();
        assert_eq!(starts, vec![0, 2, 0, 2, 0]);
        assert_eq!(exs[0].tokens.len(), 10);
        assert_eq!(exs[0].mask_positions.len(), 1);
        assert_eq!(gen_tapt(&[], cfg(1)).unwrap_err(), MaskgenError::EmptyInput);
    }

    #[test]
    fn blank_lines_are_skipped_by_resampling() {
        let src: Vec<String> = (0..30)
            .map(|i| if i % 3 == 0 { String::new() } else { format!("s{i} a") })
            .collect();
        let tgt: Vec<String> = (0..30).map(|i| format!("t{i} b")).collect();
        let c = ParallelCorpus::from_lines(src, tgt, None, "en".into(), "de".into()).unwrap();
        let mut cfg = cfg(50);
        cfg.k_max = 2;
        let g = gen_tlm(&c, cfg).unwrap();
        for ex in g.iter() {
            let ex = ex.unwrap();
            assert_eq!(ex.utterance_boundaries.len(), 4);
        }
    }

    #[test]
    fn shards_concatenate_to_single_stream() {
        let c = toy_corpus();
        let g = gen_xdm(&c, cfg(101)).unwrap();
        let single: Vec<_> = g.iter().collect::<Result<_, _>>().unwrap();
        for n in [1, 2, 3, 7] {
            assert_eq!(g.generate_sharded(n).unwrap(), single);
        }
    }

    #[test]
    fn budget_multiplier_scales_length() {
        let c = toy_corpus();
        let mut cfg = cfg(100_000);
        for (m, n) in [(0.5, 50_000), (1.0, 100_000), (2.0, 200_000), (4.0, 400_000)] {
            cfg.budget_multiplier = m;
            assert_eq!(gen_tlm(&c, cfg.clone()).unwrap().len(), n);
        }
    }
}
