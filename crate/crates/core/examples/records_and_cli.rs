//! Writes a small example file through the command-line entry point, reads
//! it back, and shows the header and first record.
//!
//! ```text
//! cargo run --example records_and_cli -- [task]
//! ```

use xlift::records::{example_to_line, read_example_file};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = std::env::args().nth(1).unwrap_or_else(|| "xdm".into());
    let corpus = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mini-bilingual");
    let out = std::env::temp_dir().join(format!("xlift-{task}.jsonl"));
    let args = [
        "xlift", "generate", "--task", &task, "--n", "5", "--seed", "1", "--corpus", corpus,
        "--src-lang", "en", "--tgt-lang", "de", "--out", out.to_str().unwrap(),
    ];
    let code = xlift::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    if code != 0 {
        std::process::exit(code);
    }

    let text = std::fs::read_to_string(&out)?;
    let (header, examples) = read_example_file(&text, &out.display().to_string(), true)?;
    println!("header: task {} seed {}", header.task, header.seed);
    for (k, v) in &header.config {
        println!("  {k} = {v}");
    }
    let first = &examples[0];
    println!("first record:\n{}", example_to_line(first));
    println!("de-masked utterances:");
    for u in first.demasked_utterances() {
        println!("  {u}");
    }
    println!("wrote {}", out.display());
    Ok(())
}
