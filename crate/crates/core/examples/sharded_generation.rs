//! Generates a TLM stream single-threaded and with several worker threads,
//! checks both are identical, and reports throughput.
//!
//! ```text
//! cargo run --release --example sharded_generation -- [n_examples] [shards]
//! ```

use std::time::Instant;

use xlift::maskgen::{ExampleGenerator, GenerationConfig, MaskedExample, Task};
use xlift::records::example_to_line;
use xlift::toymlm::make_synthetic_bilingual_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(100_000), |s| s.parse())?;
    let shards: usize = args.get(1).map_or(Ok(4), |s| s.parse())?;

    let (corpus, _) = make_synthetic_bilingual_corpus(200, 1000, 50, 1)?;
    let cfg = GenerationConfig::default().with_examples(n).with_seed(42);
    let generator = ExampleGenerator::for_corpus(Task::Tlm, &corpus, cfg)?;

    let t = Instant::now();
    let single: Vec<MaskedExample> = generator.iter().collect::<Result<_, _>>()?;
    let single_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let parallel = generator.generate_sharded(shards)?;
    let parallel_s = t.elapsed().as_secs_f64();

    let bytes: usize = single.iter().map(|e| example_to_line(e).len() + 1).sum();
    println!("corpus: {} lines in {} documents", corpus.total_lines, corpus.documents.len());
    println!("1 thread:  {n} examples in {single_s:.2}s");
    println!("{shards} threads: {n} examples in {parallel_s:.2}s");
    println!("identical: {}", single == parallel);
    println!("serialized size: {:.1} MiB", bytes as f64 / (1 << 20) as f64);
    for s in 0..shards {
        let r = generator.shard_range(s, shards);
        println!("  shard {s}: examples {}..{}", r.start, r.end);
    }
    Ok(())
}
