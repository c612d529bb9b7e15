//! Trains the toy tied-embedding model on MonoDM and on TLM examples built
//! from the same synthetic mirrored corpus, then probes how well `a{i}` and
//! its translation `b{i}` line up in embedding space.
//!
//! ```text
//! cargo run --release --example toy_alignment -- [n_examples] [epochs] [learning_rate]
//! ```

use xlift::maskgen::{ExampleGenerator, GenerationConfig, MaskedExample, Task};
use xlift::toymlm::{alignment_score, build_vocab, make_synthetic_bilingual_corpus, train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(2000), |s| s.parse())?;
    let epochs: usize = args.get(1).map_or(Ok(40), |s| s.parse())?;
    let lr: f64 = args.get(2).map_or(Ok(2.0), |s| s.parse())?;

    let (corpus, probe) = make_synthetic_bilingual_corpus(20, 60, 50, 7)?;
    println!("corpus: {} lines, {} probe pairs", corpus.total_lines, probe.word_pairs.len());

    for seed in [1u64, 2, 3] {
        let mut row = Vec::new();
        for task in [Task::MonoDm, Task::Tlm, Task::Xdm] {
            let cfg = GenerationConfig::default().with_examples(n).with_seed(seed);
            let examples: Vec<MaskedExample> =
                ExampleGenerator::for_corpus(task, &corpus, cfg)?.iter().collect::<Result<_, _>>()?;
            let vocab = build_vocab(&examples, 1)?;
            let tcfg = TrainConfig { learning_rate: lr, epochs, seed, ..TrainConfig::default() };
            let (model, curve) = train(tcfg.init_model(&vocab), &examples, &tcfg, &vocab)?;
            let score = alignment_score(&model, &probe, &vocab)?;
            row.push(format!(
                "{task}: loss {:.3}->{:.3} cos {:.3} p@1 {:.2}",
                curve.initial(),
                curve.last(),
                score.mean_cosine,
                score.precision_at_1
            ));
        }
        println!("seed {seed}: {}", row.join(" | "));
    }
    Ok(())
}
