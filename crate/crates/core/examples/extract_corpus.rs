//! Loads the bundled En/De fixture, takes an order-preserving prefix and
//! prints corpus statistics for both.
//!
//! ```text
//! cargo run --example extract_corpus -- [budget]
//! ```

use std::path::PathBuf;

use xlift::corpus::{corpus_stats, extract_ordered_prefix, load_parallel_corpus, Language};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: usize = std::env::args().nth(1).map_or(Ok(200), |s| s.parse())?;
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini-bilingual");
    let corpus = load_parallel_corpus(
        &dir.join("src.txt"),
        &dir.join("tgt.txt"),
        Some(&dir.join("boundaries.txt")),
        Language::new("en"),
        Language::new("de"),
    )?;
    println!("== full corpus\n{}", corpus_stats(&corpus).to_text());

    let prefix = extract_ordered_prefix(&corpus, budget)?;
    println!("== first {budget} lines\n{}", corpus_stats(&prefix).to_text());
    let last = prefix.documents.last().unwrap();
    let line = last.src_lines.last().unwrap();
    println!("last kept line: {} #{}: {:?}", last.doc_id, line.index, line.text);
    Ok(())
}
