//! Compares the toy model's analytic gradient with central finite
//! differences on a handful of random models.
//!
//! ```text
//! cargo run --example gradient_check -- [models]
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xlift::maskgen::{GenerationConfig, MaskedExample, Task};
use xlift::toymlm::{build_vocab, loss_and_grad, make_synthetic_bilingual_corpus, ToyMlm};

const STEP: f64 = 1e-5;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let models: u64 = std::env::args().nth(1).map_or(Ok(5), |s| s.parse())?;
    let (corpus, _) = make_synthetic_bilingual_corpus(2, 40, 10, 3)?;
    let generator = xlift::maskgen::gen_tlm(&corpus, GenerationConfig::default().with_examples(8))?;
    let batch: Vec<MaskedExample> = generator.iter().collect::<Result<_, _>>()?;
    let vocab = build_vocab(&batch, 1)?;
    println!("vocab {} words, batch of {} {} examples", vocab.len(), batch.len(), Task::Tlm);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for m in 0..models {
        let dim = rng.gen_range(1..=8);
        let mut model = ToyMlm::new(vocab.len(), dim, m, 1.0);
        let (loss, grad) = loss_and_grad(&model, &batch, &vocab)?;
        let mut worst: f64 = 0.0;
        for i in 0..model.embeddings.len() {
            let w = model.embeddings[i];
            model.embeddings[i] = w + STEP;
            let plus = loss_and_grad(&model, &batch, &vocab)?.0;
            model.embeddings[i] = w - STEP;
            let minus = loss_and_grad(&model, &batch, &vocab)?.0;
            model.embeddings[i] = w;
            let numeric = (plus - minus) / (2.0 * STEP);
            let rel = (grad[i] - numeric).abs() / grad[i].abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        }
        println!("model {m}: d={dim} loss {loss:.4} max relative error {worst:.2e}");
    }
    Ok(())
}
