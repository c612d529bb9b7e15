mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{source_utterances, window_inside_document};
use xlift::corpus::ParallelCorpus;
use xlift::maskgen::{
    mask_count, normalize, select_mask_positions, tokenize, validate_example_with, ExampleGenerator,
    GenerationConfig, Task, ValidationOptions,
};
use xlift::records::{example_from_line, example_to_line};

const WORDS: [&str; 12] = [
    "hello", "world", "Fledermaus", "bat", "你好", "朋友们", "ok,", "no!", "Martin?", "ja", "x", "über",
];

fn line_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS.to_vec()), 1..8).prop_map(|w| w.join(" "))
}

fn corpus_strategy() -> impl Strategy<Value = ParallelCorpus> {
    prop::collection::vec(
        prop::collection::vec((line_strategy(), line_strategy()), 3..25),
        1..4,
    )
    .prop_map(|docs| {
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut starts = Vec::new();
        for d in docs {
            starts.push(src.len());
            for (s, t) in d {
                src.push(s);
                tgt.push(t);
            }
        }
        ParallelCorpus::from_lines(src, tgt, Some(&starts), "en".into(), "zh".into()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_task_obeys_the_laws(corpus in corpus_strategy(), seed in any::<u64>(), rate in 0.05f64..0.6) {
        let opts = ValidationOptions { mask_rate: Some(rate), allow_corruption: false };
        for task in Task::ALL.into_iter().filter(|t| *t != Task::Tapt) {
            let cfg = GenerationConfig { mask_rate: rate, k_min: 2, k_max: 6, ..GenerationConfig::default() }
                .with_examples(30)
                .with_seed(seed);
            let g = ExampleGenerator::for_corpus(task, &corpus, cfg).unwrap();
            for ex in g.iter() {
                let ex = ex.unwrap();
                prop_assert!(validate_example_with(&ex, opts).is_valid(), "{:?}", ex);
                prop_assert!(window_inside_document(&corpus, &ex));
                prop_assert_eq!(Some(ex.demasked_utterances()), source_utterances(&corpus, &ex));
                let line = example_to_line(&ex);
                let back = example_from_line(&line, true).unwrap();
                prop_assert_eq!(example_to_line(&back), line);
                prop_assert_eq!(back, ex);
            }
        }
    }

    #[test]
    fn selected_positions_are_distinct_and_sized(n in 1usize..500, rate in 0.01f64..0.99, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = select_mask_positions(n, rate, &mut rng, &[]).unwrap();
        prop_assert_eq!(p.len(), mask_count(n, rate));
        prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(p.iter().all(|&i| i < n));
    }

    #[test]
    fn normalize_is_idempotent(text in "[a-zA-Z你好 ,.!?\t]{0,40}") {
        let once = normalize(&text);
        prop_assert_eq!(normalize(&once), once.clone());
        let toks = tokenize(&text, &"en".into());
        prop_assert!(toks.iter().all(|t| !t.surface.is_empty() && !t.surface.contains(char::is_whitespace)));
    }
}

#[test]
fn fifteen_percent_law_is_exact() {
    for n in 1..5000 {
        assert_eq!(mask_count(n, 0.15), (15 * n / 100).max(1), "n = {n}");
    }
}

#[test]
fn mask_rate_flag_changes_counts() {
    let corpus = common::mini_corpus();
    let cfg = GenerationConfig { mask_rate: 0.4, ..GenerationConfig::default() }.with_examples(200);
    for ex in common::generate(Task::MonoDm, &corpus, cfg) {
        assert_eq!(ex.mask_positions.len(), ((0.4 * ex.tokens.len() as f64 + 1e-9) as usize).max(1));
    }
}
