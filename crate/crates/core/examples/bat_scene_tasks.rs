//! Builds one example of every corpus task from the six-line En/De film
//! excerpt and prints it with its mask targets.
//!
//! ```text
//! cargo run --example bat_scene_tasks -- [seed]
//! ```

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xlift::corpus::{load_parallel_corpus, DialogueWindow, Language, Side};
use xlift::maskgen::{chat_example, monodm_example, tlm_example, GenerationConfig, MaskedExample, Task};

fn show(ex: &MaskedExample) {
    let text: Vec<&str> = ex.tokens.iter().map(|t| t.surface.as_str()).collect();
    println!("{:<6} {}", ex.task.tag(), text.join(" "));
    println!("       targets {:?}", ex.targets);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/bat-scene");
    let corpus = load_parallel_corpus(
        &dir.join("en.txt"),
        &dir.join("de.txt"),
        None,
        Language::new("en"),
        Language::new("de"),
    )?;
    let cfg = GenerationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doc = &corpus.documents[0];
    let window = DialogueWindow::at(&corpus, 0, 0, 6).unwrap();
    let context = DialogueWindow::at(&corpus, 0, 0, 5).unwrap();

    show(&monodm_example(&window, Side::Src, Task::MonoDm, &cfg, &mut rng).unwrap());
    show(&tlm_example(&window, Task::Tlm, &cfg, &mut rng).unwrap());
    show(&chat_example(doc, 0, context.k, Side::Src, Task::Xdm, &cfg, &mut rng).unwrap());
    show(&chat_example(doc, 0, context.k, Side::Src, Task::Rm, &cfg, &mut rng).unwrap());
    Ok(())
}
