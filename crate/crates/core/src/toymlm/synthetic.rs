use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Language, ParallelCorpus};

use super::probe::AlignmentProbeSpec;
use super::ToyError;

/// Successors per word in the generating Markov chain (repeats allowed).
const SUCCESSORS: usize = 3;
const MIN_LINE_TOKENS: usize = 3;
const MAX_LINE_TOKENS: usize = 6;

pub const SYNTHETIC_SRC_LANG: &str = "syn-a";
pub const SYNTHETIC_TGT_LANG: &str = "syn-b";

/// A mirrored bilingual corpus: source lines come from a seeded first-order
/// Markov chain over `a0..a{V-1}`, and each target line is the same sequence
/// with every `a{i}` replaced by `b{i}`. Probe pairs are `(a{i}, b{i})` for
/// every word that occurs.
pub fn make_synthetic_bilingual_corpus(
    n_docs: usize,
    doc_len: usize,
    vocab_size: usize,
    seed: u64,
) -> Result<(ParallelCorpus, AlignmentProbeSpec), ToyError> {
    if vocab_size < 10 || n_docs == 0 || doc_len == 0 {
        return Err(ToyError::InvalidConfig(format!(
            "need vocab_size ≥ 10 and non-empty documents, got V={vocab_size} docs={n_docs} len={doc_len}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // word i always may step to i+1, so every word is reachable
    let chain: Vec<(Vec<usize>, WeightedIndex<f64>)> = (0..vocab_size)
        .map(|i| {
            let mut next = vec![(i + 1) % vocab_size];
            next.extend(index::sample(&mut rng, vocab_size, SUCCESSORS - 1).into_iter());
            let weights: Vec<f64> = (0..SUCCESSORS).map(|_| rng.gen_range(0.1..1.0)).collect();
            (next, WeightedIndex::new(weights).expect("positive weights"))
        })
        .collect();

    let mut src = Vec::with_capacity(n_docs * doc_len);
    let mut tgt = Vec::with_capacity(n_docs * doc_len);
    let mut boundaries = Vec::with_capacity(n_docs);
    let mut seen = vec![false; vocab_size];
    for _ in 0..n_docs {
        boundaries.push(src.len());
        let mut word = rng.gen_range(0..vocab_size);
        for _ in 0..doc_len {
            let len = rng.gen_range(MIN_LINE_TOKENS..=MAX_LINE_TOKENS);
            let mut ids = Vec::with_capacity(len);
            for _ in 0..len {
                seen[word] = true;
                ids.push(word);
                let (next, dist) = &chain[word];
                word = next[dist.sample(&mut rng)];
            }
            src.push(ids.iter().map(|i| format!("a{i}")).collect::<Vec<_>>().join(" "));
            tgt.push(ids.iter().map(|i| format!("b{i}")).collect::<Vec<_>>().join(" "));
        }
    }
    let corpus = ParallelCorpus::from_lines(
        src,
        tgt,
        Some(&boundaries),
        Language::new(SYNTHETIC_SRC_LANG),
        Language::new(SYNTHETIC_TGT_LANG),
    )
    .expect("synthetic corpus is well formed");
    let probe = AlignmentProbeSpec::from_pairs(
        (0..vocab_size)
            .filter(|&i| seen[i])
            .map(|i| (format!("a{i}"), format!("b{i}")))
            .collect(),
    );
    Ok((corpus, probe))
}
