//! Helpers shared by the integration tests and the acceptance suite:
//! fixture loading, independent oracles, and the pinned alignment run.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xlift::corpus::{load_parallel_corpus, Language, ParallelCorpus, Side};
use xlift::dstmetrics::{DialogueState, Ontology, TurnRecord};
use xlift::maskgen::{normalize, Direction, ExampleGenerator, GenerationConfig, MaskedExample, Task};
use xlift::toymlm::{
    alignment_score, build_vocab, loss_and_grad, make_synthetic_bilingual_corpus, train,
    AlignmentScore, ToyMlm, TrainConfig, Vocabulary,
};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn mini_corpus() -> ParallelCorpus {
    load_parallel_corpus(
        &fixture("mini-bilingual/src.txt"),
        &fixture("mini-bilingual/tgt.txt"),
        Some(&fixture("mini-bilingual/boundaries.txt")),
        Language::new("en"),
        Language::new("de"),
    )
    .expect("mini fixture loads")
}

pub fn bat_scene_corpus() -> ParallelCorpus {
    load_parallel_corpus(
        &fixture("bat-scene/en.txt"),
        &fixture("bat-scene/de.txt"),
        Some(&fixture("bat-scene/boundaries.txt")),
        Language::new("en"),
        Language::new("de"),
    )
    .expect("bat scene fixture loads")
}

/// The utterances an example must de-mask to, read straight from the corpus
/// by provenance.
pub fn source_utterances(corpus: &ParallelCorpus, ex: &MaskedExample) -> Option<Vec<String>> {
    let p = &ex.provenance;
    let doc = corpus.documents.iter().find(|d| d.doc_id == p.doc_id)?;
    let side = |s: Side| match s {
        Side::Src => &doc.src_lines,
        Side::Tgt => &doc.tgt_lines,
    };
    let lines = |s: Side, from: usize, to: usize| -> Option<Vec<String>> {
        side(s).get(from..to).map(|u| u.iter().map(|u| normalize(&u.text)).collect())
    };
    let (start, k) = (p.start, p.k);
    match p.direction {
        Direction::Src => lines(Side::Src, start, start + k),
        Direction::Tgt => lines(Side::Tgt, start, start + k),
        Direction::Parallel => {
            let mut v = lines(Side::Src, start, start + k)?;
            v.extend(lines(Side::Tgt, start, start + k)?);
            Some(v)
        }
        Direction::SrcToTgt => {
            let mut v = lines(Side::Src, start, start + k)?;
            v.extend(lines(Side::Tgt, start + k, start + k + 1)?);
            Some(v)
        }
        Direction::TgtToSrc => {
            let mut v = lines(Side::Tgt, start, start + k)?;
            v.extend(lines(Side::Src, start + k, start + k + 1)?);
            Some(v)
        }
        Direction::Task => None,
    }
}

/// Lines of the document an example's window (reply included) touches, or
/// `None` when it would run past the document end.
pub fn window_inside_document(corpus: &ParallelCorpus, ex: &MaskedExample) -> bool {
    let p = &ex.provenance;
    let reply = usize::from(matches!(p.direction, Direction::SrcToTgt | Direction::TgtToSrc));
    corpus
        .documents
        .iter()
        .find(|d| d.doc_id == p.doc_id)
        .is_some_and(|d| p.start + p.k + reply <= d.len())
}

pub fn generate(task: Task, corpus: &ParallelCorpus, cfg: GenerationConfig) -> Vec<MaskedExample> {
    ExampleGenerator::for_corpus(task, corpus, cfg)
        .expect("generator builds")
        .iter()
        .collect::<Result<_, _>>()
        .expect("generation succeeds")
}

// ---------------------------------------------------------------------------
// Metric oracle: plain vectors and linear scans, no maps or sets.

pub struct OracleTurn {
    pub pred: Vec<(String, String)>,
    pub gold: Vec<(String, String)>,
    pub pred_req: Vec<String>,
    pub gold_req: Vec<String>,
}

pub struct OracleOntology {
    pub informable: Vec<String>,
    pub requestable: Vec<String>,
    pub universe: usize,
}

fn value_of<'a>(pairs: &'a [(String, String)], slot: &str) -> Option<&'a str> {
    pairs.iter().find(|(s, _)| s == slot).map(|(_, v)| v.as_str())
}

fn same_state(a: &[(String, String)], b: &[(String, String)]) -> bool {
    a.len() == b.len() && a.iter().all(|(s, v)| value_of(b, s) == Some(v))
}

pub fn oracle_jga(turns: &[OracleTurn]) -> f64 {
    let mut hits = 0usize;
    for t in turns {
        if same_state(&t.pred, &t.gold) {
            hits += 1;
        }
    }
    hits as f64 / turns.len() as f64
}

pub fn oracle_slot_f1(turns: &[OracleTurn]) -> f64 {
    let mut total = 0.0;
    for t in turns {
        let f = if t.pred.is_empty() && t.gold.is_empty() {
            1.0
        } else if t.pred.is_empty() || t.gold.is_empty() {
            0.0
        } else {
            let mut common = 0usize;
            for (s, v) in &t.pred {
                if value_of(&t.gold, s) == Some(v.as_str()) {
                    common += 1;
                }
            }
            let p = common as f64 / t.pred.len() as f64;
            let r = common as f64 / t.gold.len() as f64;
            if p + r == 0.0 {
                0.0
            } else {
                2.0 * p * r / (p + r)
            }
        };
        total += f;
    }
    total / turns.len() as f64
}

/// Walks every slot of the scope explicitly: ontology informables, then
/// requestables and unnamed padding slots when `full`.
pub fn oracle_slot_accuracy(turns: &[OracleTurn], onto: &OracleOntology, full: bool) -> f64 {
    let mut size = onto.informable.len();
    if full {
        size = onto.universe.max(onto.informable.len() + onto.requestable.len());
    }
    let mut correct_total = 0usize;
    for t in turns {
        let mut decisions: Vec<bool> = Vec::new();
        for slot in &onto.informable {
            decisions.push(value_of(&t.pred, slot) == value_of(&t.gold, slot));
        }
        let mut penalties = 0usize;
        let mut outside: Vec<&str> = Vec::new();
        for (s, _) in t.pred.iter().chain(&t.gold) {
            if !onto.informable.contains(s) && !outside.contains(&s.as_str()) {
                outside.push(s);
            }
        }
        for s in outside {
            if value_of(&t.pred, s) != value_of(&t.gold, s) {
                penalties += 1;
            }
        }
        if full {
            for r in &onto.requestable {
                decisions.push(t.pred_req.contains(r) == t.gold_req.contains(r));
            }
            while decisions.len() < size {
                decisions.push(true);
            }
            for r in t.pred_req.iter().chain(&t.gold_req) {
                let in_one = t.pred_req.contains(r) != t.gold_req.contains(r);
                if in_one && !onto.requestable.contains(r) {
                    penalties += 1;
                }
            }
        }
        let correct = decisions.iter().filter(|&&d| d).count();
        correct_total += correct.saturating_sub(penalties);
    }
    correct_total as f64 / (turns.len() * size) as f64
}

pub fn oracle_request_accuracy(turns: &[OracleTurn]) -> f64 {
    let mut hits = 0usize;
    for t in turns {
        let same = t.pred_req.iter().all(|r| t.gold_req.contains(r))
            && t.gold_req.iter().all(|r| t.pred_req.contains(r));
        if same {
            hits += 1;
        }
    }
    hits as f64 / turns.len() as f64
}

pub struct RandomCase {
    pub ontology: Ontology,
    pub turns: Vec<TurnRecord>,
    pub oracle_ontology: OracleOntology,
    pub oracle_turns: Vec<OracleTurn>,
}

fn random_state(
    rng: &mut ChaCha8Rng,
    n_inf: usize,
    n_req: usize,
) -> (Vec<(String, String)>, Vec<String>) {
    let mut pairs = Vec::new();
    for s in 0..n_inf {
        if rng.gen_bool(0.5) {
            pairs.push((format!("s{s}"), format!("v{}", rng.gen_range(0..3))));
        }
    }
    if rng.gen_bool(0.1) {
        pairs.push(("x0".to_string(), format!("v{}", rng.gen_range(0..2))));
    }
    let mut req = Vec::new();
    for r in 0..n_req {
        if rng.gen_bool(0.4) {
            req.push(format!("r{r}"));
        }
    }
    if rng.gen_bool(0.1) {
        req.push("rx".to_string());
    }
    (pairs, req)
}

/// Up to 10 slots in total and up to 20 turns over a few dialogues, with an
/// occasional slot or request outside the ontology.
pub fn random_case(seed: u64) -> RandomCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_inf = rng.gen_range(1..=7);
    let n_req = rng.gen_range(0..=10 - n_inf);
    let universe = if rng.gen_bool(0.5) {
        n_inf + n_req + rng.gen_range(0..130)
    } else {
        n_inf
    };
    let inf_names: Vec<String> = (0..n_inf).map(|s| format!("s{s}")).collect();
    let req_names: Vec<String> = (0..n_req).map(|r| format!("r{r}")).collect();
    let ontology = Ontology::new(
        inf_names
            .iter()
            .map(|s| (s.clone(), (0..3).map(|v| format!("v{v}")).collect::<Vec<_>>())),
        req_names.clone(),
        Some(universe),
    )
    .unwrap();
    let n_turns = rng.gen_range(1..=20);
    let mut turns = Vec::new();
    let mut oracle_turns = Vec::new();
    for i in 0..n_turns {
        let (pred, pred_req) = random_state(&mut rng, n_inf, n_req);
        let (gold, gold_req) = if rng.gen_bool(0.3) {
            (pred.clone(), pred_req.clone())
        } else {
            random_state(&mut rng, n_inf, n_req)
        };
        turns.push(TurnRecord {
            dialogue_id: format!("d{}", i % 3),
            turn_index: i / 3,
            predicted: DialogueState::new(pred.clone(), pred_req.clone()).unwrap(),
            gold: DialogueState::new(gold.clone(), gold_req.clone()).unwrap(),
        });
        oracle_turns.push(OracleTurn {
            pred,
            gold,
            pred_req,
            gold_req,
        });
    }
    RandomCase {
        ontology,
        turns,
        oracle_ontology: OracleOntology {
            informable: inf_names,
            requestable: req_names,
            universe,
        },
        oracle_turns,
    }
}

// ---------------------------------------------------------------------------
// Gradient check.

pub const FD_STEP: f64 = 1e-5;
/// Relative errors are taken against `max(|analytic|, |numeric|, FD_FLOOR)`.
pub const FD_FLOOR: f64 = 1e-8;

fn random_examples(rng: &mut ChaCha8Rng, words: &[String]) -> Vec<MaskedExample> {
    use xlift::maskgen::{LanguageSpan, Provenance, Token, MASK};
    (0..rng.gen_range(1..=4))
        .map(|_| {
            let n = rng.gen_range(2..=8);
            let surfaces: Vec<String> =
                (0..n).map(|_| words[rng.gen_range(0..words.len())].clone()).collect();
            let n_mask = rng.gen_range(1..n);
            let positions = rand::seq::index::sample(rng, n, n_mask).into_vec();
            let mut positions = positions;
            positions.sort_unstable();
            let mut tokens: Vec<Token> = surfaces
                .iter()
                .map(|s| Token {
                    surface: s.clone(),
                    utterance_ordinal: 0,
                    language: Language::new("en"),
                })
                .collect();
            let targets = positions
                .iter()
                .map(|&p| std::mem::replace(&mut tokens[p].surface, MASK.to_string()))
                .collect();
            MaskedExample {
                task: Task::Tlm,
                tokens,
                mask_positions: positions,
                targets,
                language_spans: vec![LanguageSpan {
                    start: 0,
                    end: n,
                    language: Language::new("en"),
                }],
                utterance_boundaries: vec![0],
                provenance: Provenance {
                    doc_id: "g".into(),
                    start: 0,
                    k: 1,
                    direction: Direction::Src,
                },
            }
        })
        .collect()
}

/// Max relative error between the analytic gradient and central differences
/// for one random model with `V ≤ 20`, `d ≤ 8`.
pub fn gradient_check(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.gen_range(4..=20);
    let d = rng.gen_range(1..=8);
    let words: Vec<String> = (0..v - 2).map(|i| format!("w{i}")).collect();
    let vocab = Vocabulary::from_surfaces(words.iter().map(String::as_str));
    assert_eq!(vocab.len(), v);
    let mut batch = random_examples(&mut rng, &words);
    // at least one example must keep a context word
    while loss_and_grad(&ToyMlm::zeros(v, d), &batch, &vocab).is_err() {
        batch = random_examples(&mut rng, &words);
    }
    let mut model = ToyMlm::new(v, d, seed, 1.0);
    let (_, analytic) = loss_and_grad(&model, &batch, &vocab).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..model.embeddings.len() {
        let orig = model.embeddings[i];
        model.embeddings[i] = orig + FD_STEP;
        let (plus, _) = loss_and_grad(&model, &batch, &vocab).unwrap();
        model.embeddings[i] = orig - FD_STEP;
        let (minus, _) = loss_and_grad(&model, &batch, &vocab).unwrap();
        model.embeddings[i] = orig;
        let numeric = (plus - minus) / (2.0 * FD_STEP);
        let denom = analytic[i].abs().max(numeric.abs()).max(FD_FLOOR);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    worst
}

// ---------------------------------------------------------------------------
// Alignment run with the pinned configuration.

pub const ALIGN_EXAMPLES: usize = 2000;
pub const ALIGN_SEEDS: [u64; 3] = [1, 2, 3];

pub fn alignment_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        learning_rate: 2.0,
        epochs: 40,
        batch_size: 32,
        seed,
        init_scale: 0.01,
        dim: 16,
    }
}

pub fn alignment_run(task: Task, seed: u64) -> AlignmentScore {
    let (corpus, probe) = make_synthetic_bilingual_corpus(20, 60, 50, 7).unwrap();
    let cfg = GenerationConfig::default()
        .with_examples(ALIGN_EXAMPLES)
        .with_seed(seed);
    let examples = generate(task, &corpus, cfg);
    let vocab = build_vocab(&examples, 1).unwrap();
    let tcfg = alignment_train_config(seed);
    let (model, _) = train(tcfg.init_model(&vocab), &examples, &tcfg, &vocab).unwrap();
    alignment_score(&model, &probe, &vocab).unwrap()
}
