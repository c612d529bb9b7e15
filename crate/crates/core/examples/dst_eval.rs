//! Scores the bundled dialogue-state fixtures: the 133/135 slot-accuracy
//! case under both scopes, then the cascading-error breakdown.
//!
//! ```text
//! cargo run --example dst_eval
//! ```

use std::fs;
use std::path::PathBuf;

use xlift::dstmetrics::{evaluate, EvalOptions, Scope};
use xlift::records::{read_ontology, read_turns};

fn run(dir: &str, pred: &str, scope: Scope) -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/dst").join(dir);
    let read = |f: &str| fs::read_to_string(dir.join(f));
    let turns = read_turns(&read(pred)?, pred, &read("gold.jsonl")?, "gold.jsonl")?;
    let ontology = read_ontology(&read("ontology.json")?, "ontology.json")?;
    let report = evaluate(&turns, &ontology, EvalOptions { scope, strict: true })?;
    println!("== {} / {pred} ({scope:?})", dir.file_name().unwrap().to_string_lossy());
    print!("{}", report.summary_text());
    print!("{}", report.breakdown_text());
    println!();
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run("slot-accuracy", "pred.jsonl", Scope::FullUniverse)?;
    run("slot-accuracy", "pred.jsonl", Scope::InformableOnly)?;
    run("cascade", "pred-baseline.jsonl", Scope::InformableOnly)?;
    run("cascade", "pred-tlm.jsonl", Scope::InformableOnly)?;
    Ok(())
}
