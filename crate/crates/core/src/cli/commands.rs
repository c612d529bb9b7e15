use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{self, ConfigError};
use crate::corpus::{
    corpus_stats, extract_ordered_prefix, load_parallel_corpus, Language, ParallelCorpus,
    Utterance, DEFAULT_K_MAX, DEFAULT_K_MIN,
};
use crate::dstmetrics::{evaluate, EvalOptions, Scope};
use crate::maskgen::{
    DirectionPolicy, ExampleGenerator, GenerationConfig, MaskingScheme, SidePolicy, Task,
    DEFAULT_MASK_RATE, DEFAULT_N_EXAMPLES,
};
use crate::records::{self, example_to_line, GenerationHeader};
use crate::toymlm::{
    alignment_score, build_vocab, load_checkpoint, make_synthetic_bilingual_corpus,
    save_checkpoint, train, AlignmentProbeSpec, TrainConfig, Vocabulary,
};

use super::{
    CliError, EvalArgs, ExtractArgs, GenerateArgs, MakeSyntheticArgs, ProbeArgs, StatsArgs,
    TrainToyArgs,
};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn write_corpus(corpus: &ParallelCorpus, dir: &Path) -> Result<(), CliError> {
    let mut src = String::new();
    let mut tgt = String::new();
    for doc in &corpus.documents {
        for (s, t) in doc.src_lines.iter().zip(&doc.tgt_lines) {
            src.push_str(&s.text);
            src.push('\n');
            tgt.push_str(&t.text);
            tgt.push('\n');
        }
    }
    let boundaries: String = corpus
        .boundaries()
        .iter()
        .map(|b| format!("{b}\n"))
        .collect();
    write(&dir.join("src.txt"), &src)?;
    write(&dir.join("tgt.txt"), &tgt)?;
    write(&dir.join("boundaries.txt"), &boundaries)
}

fn load(args: &super::CorpusArgs) -> Result<ParallelCorpus, CliError> {
    Ok(load_parallel_corpus(
        &args.src,
        &args.tgt,
        args.boundaries.as_deref(),
        Language::new(&args.src_lang),
        Language::new(&args.tgt_lang),
    )?)
}

pub(super) fn extract(a: &ExtractArgs, err: &mut dyn Write) -> Result<(), CliError> {
    let mut corpus = load(&a.corpus)?;
    if let Some(seed) = a.shuffle_documents {
        corpus = corpus.shuffle_documents(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    if a.budget > corpus.total_lines {
        let _ = writeln!(
            err,
            "warning\tbudget of {} lines exceeds the corpus ({} lines); extracting everything",
            a.budget, corpus.total_lines
        );
    }
    let prefix = extract_ordered_prefix(&corpus, a.budget)?;
    create_dir(&a.out)?;
    write_corpus(&prefix, &a.out)?;
    write(&a.out.join("stats.txt"), &corpus_stats(&prefix).to_text())
}

pub(super) fn stats(a: &StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let stats = corpus_stats(&load(&a.corpus)?);
    let _ = write!(out, "{}", stats.to_text());
    if let Some(path) = &a.json {
        let line = serde_json::to_string(&stats).expect("stats serialize");
        write(path, &format!("{line}\n"))?;
    }
    Ok(())
}

/// Keys accepted in generation config files and recorded in headers.
pub const GENERATE_KEYS: [&str; 17] = [
    "task",
    "n",
    "mask_rate",
    "seed",
    "k_min",
    "k_max",
    "direction_policy",
    "side",
    "budget_multiplier",
    "bert_mix",
    "src",
    "tgt",
    "boundaries",
    "src_lang",
    "tgt_lang",
    "utterances",
    "lang",
];

/// Fully resolved generation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerateSettings {
    pub task: Task,
    pub config: GenerationConfig,
    /// Canonical `key → value` form, as written into the header.
    pub echo: BTreeMap<String, String>,
}

fn required<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, ConfigError> {
    Ok(config::get(map, key)?.unwrap_or(default))
}

fn bad(key: &str, value: &str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    }
}

/// Validates a settings map, fills defaults and canonicalises values.
pub fn generation_settings(map: BTreeMap<String, String>) -> Result<GenerateSettings, CliError> {
    if let Some(k) = map.keys().find(|k| !GENERATE_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(k.clone()).into());
    }
    let task_name = map
        .get("task")
        .ok_or_else(|| CliError::input("ConfigError", "no task given (--task)"))?;
    let task: Task = task_name.parse().map_err(|_| bad("task", task_name))?;
    let direction = map.get("direction_policy").map_or(Ok(DirectionPolicy::default()), |v| {
        v.parse().map_err(|_| bad("direction_policy", v))
    })?;
    let side = map
        .get("side")
        .map_or(Ok(SidePolicy::default()), |v| v.parse().map_err(|_| bad("side", v)))?;
    let bert_mix: bool = required(&map, "bert_mix", false)?;
    let cfg = GenerationConfig {
        n_examples: required(&map, "n", DEFAULT_N_EXAMPLES)?,
        mask_rate: required(&map, "mask_rate", DEFAULT_MASK_RATE)?,
        k_min: required(&map, "k_min", DEFAULT_K_MIN)?,
        k_max: required(&map, "k_max", DEFAULT_K_MAX)?,
        seed: required(&map, "seed", 0)?,
        direction_policy: direction,
        side_policy: side,
        budget_multiplier: required(&map, "budget_multiplier", 1.0)?,
        scheme: if bert_mix {
            MaskingScheme::BertMix
        } else {
            MaskingScheme::Sentinel
        },
    };
    cfg.validate()?;

    let mut echo = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        echo.insert(k.to_string(), v);
    };
    put("task", task.cli_name().to_string());
    put("n", cfg.n_examples.to_string());
    put("mask_rate", cfg.mask_rate.to_string());
    put("seed", cfg.seed.to_string());
    put("k_min", cfg.k_min.to_string());
    put("k_max", cfg.k_max.to_string());
    put("direction_policy", direction.name().to_string());
    put("side", side.name().to_string());
    put("budget_multiplier", cfg.budget_multiplier.to_string());
    put("bert_mix", bert_mix.to_string());
    let missing = |k: &str| CliError::input("ConfigError", format!("task {task} needs {k}"));
    if task == Task::Tapt {
        put(
            "utterances",
            map.get("utterances").ok_or_else(|| missing("--utterances"))?.clone(),
        );
        put("lang", map.get("lang").cloned().unwrap_or_else(|| "und".into()));
    } else {
        put("src", map.get("src").ok_or_else(|| missing("--src or --corpus"))?.clone());
        put("tgt", map.get("tgt").ok_or_else(|| missing("--tgt or --corpus"))?.clone());
        if let Some(b) = map.get("boundaries") {
            put("boundaries", b.clone());
        }
        put("src_lang", map.get("src_lang").cloned().unwrap_or_else(|| "src".into()));
        put("tgt_lang", map.get("tgt_lang").cloned().unwrap_or_else(|| "tgt".into()));
    }
    Ok(GenerateSettings {
        task,
        config: cfg,
        echo,
    })
}

fn settings_from_args(a: &GenerateArgs) -> Result<GenerateSettings, CliError> {
    let mut map = BTreeMap::new();
    if let Some(path) = &a.replay {
        let text = read(path)?;
        let first = text.lines().next().unwrap_or("");
        let header = GenerationHeader::from_line(first).map_err(|e| {
            CliError::input(e.code(), format!("{}:1: {e}", path.display()))
        })?;
        map = header.config;
    }
    if let Some(path) = &a.config {
        map.extend(config::parse_kv(&read(path)?).map_err(|e| {
            CliError::input("ConfigError", format!("{}: {e}", path.display()))
        })?);
    }
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    if let Some(dir) = &a.corpus {
        set("src", Some(dir.join("src.txt").display().to_string()));
        set("tgt", Some(dir.join("tgt.txt").display().to_string()));
        set("boundaries", Some(dir.join("boundaries.txt").display().to_string()));
    }
    set("task", a.task.clone());
    set("n", a.n.map(|v| v.to_string()));
    set("mask_rate", a.mask_rate.map(|v| v.to_string()));
    set("seed", a.seed.map(|v| v.to_string()));
    set("k_min", a.k_min.map(|v| v.to_string()));
    set("k_max", a.k_max.map(|v| v.to_string()));
    set("direction_policy", a.direction_policy.clone());
    set("side", a.side.clone());
    set("budget_multiplier", a.budget_multiplier.map(|v| v.to_string()));
    set("bert_mix", a.bert_mix.then(|| "true".to_string()));
    set("src", path(&a.src));
    set("tgt", path(&a.tgt));
    set("boundaries", path(&a.boundaries));
    set("src_lang", a.src_lang.clone());
    set("tgt_lang", a.tgt_lang.clone());
    set("utterances", path(&a.utterances));
    set("lang", a.lang.clone());
    generation_settings(map)
}

fn write_examples(
    generator: &ExampleGenerator<'_>,
    header: &GenerationHeader,
    shards: usize,
    out: &Path,
) -> Result<(), CliError> {
    let file = fs::File::create(out).map_err(|e| CliError::io(out, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(out, e);
    writeln!(w, "{}", header.to_line()).map_err(io)?;
    if shards > 1 {
        for ex in generator.generate_sharded(shards)? {
            writeln!(w, "{}", example_to_line(&ex)).map_err(io)?;
        }
    } else {
        for ex in generator.iter() {
            writeln!(w, "{}", example_to_line(&ex?)).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub(super) fn generate(a: &GenerateArgs) -> Result<(), CliError> {
    if a.shards == 0 {
        return Err(CliError::input("ConfigError", "--shards must be ≥ 1"));
    }
    let s = settings_from_args(a)?;
    let header = GenerationHeader::new(s.task, s.config.seed, s.echo.clone());
    if s.task == Task::Tapt {
        let path = Path::new(&s.echo["utterances"]);
        let lang = Language::new(&s.echo["lang"]);
        let utterances: Vec<Utterance> = read(path)?
            .lines()
            .enumerate()
            .map(|(index, text)| Utterance {
                text: text.to_string(),
                index,
                language: lang.clone(),
            })
            .collect();
        let g = ExampleGenerator::for_utterances(&utterances, s.config.clone())?;
        write_examples(&g, &header, a.shards, &a.out)
    } else {
        let corpus = load_parallel_corpus(
            Path::new(&s.echo["src"]),
            Path::new(&s.echo["tgt"]),
            s.echo.get("boundaries").map(Path::new),
            Language::new(&s.echo["src_lang"]),
            Language::new(&s.echo["tgt_lang"]),
        )?;
        let g = ExampleGenerator::for_corpus(s.task, &corpus, s.config.clone())?;
        write_examples(&g, &header, a.shards, &a.out)
    }
}

pub(super) fn eval(a: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let scope: Scope = a
        .scope
        .parse()
        .map_err(|m: String| CliError::input("ConfigError", m))?;
    let pred = read(&a.pred)?;
    let gold = read(&a.gold)?;
    let turns = records::read_turns(
        &pred,
        &a.pred.display().to_string(),
        &gold,
        &a.gold.display().to_string(),
    )?;
    let ontology = records::read_ontology(&read(&a.ontology)?, &a.ontology.display().to_string())?;
    let report = evaluate(
        &turns,
        &ontology,
        EvalOptions {
            scope,
            strict: a.strict,
        },
    )?;
    let _ = write!(out, "{}", report.summary_text());
    if let Some(path) = &a.report {
        let _ = write!(out, "{}", report.breakdown_text());
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write(path, &format!("{json}\n"))?;
    }
    Ok(())
}

pub(super) fn make_synthetic(a: &MakeSyntheticArgs) -> Result<(), CliError> {
    let (corpus, probe) = make_synthetic_bilingual_corpus(a.n_docs, a.doc_len, a.vocab_size, a.seed)?;
    create_dir(&a.out)?;
    write_corpus(&corpus, &a.out)?;
    write(&a.out.join("pairs.txt"), &probe.to_text())
}

pub(super) fn train_toy(a: &TrainToyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read(&a.examples)?;
    let (header, examples) =
        records::read_example_file(&text, &a.examples.display().to_string(), true)?;
    let vocab = build_vocab(&examples, a.min_count)?;
    let cfg = TrainConfig {
        learning_rate: a.lr,
        epochs: a.epochs,
        batch_size: a.batch_size,
        seed: a.seed,
        init_scale: a.init_scale,
        dim: a.dim,
    };
    cfg.validate()?;
    let (mut model, curve) = train(cfg.init_model(&vocab), &examples, &cfg, &vocab)?;
    model.task = Some(header.task);
    create_dir(&a.out)?;
    write(&a.out.join("model.ckpt"), &save_checkpoint(&model))?;
    write(&a.out.join("vocab.txt"), &vocab.to_text())?;
    write(&a.out.join("loss.csv"), &curve.to_csv())?;
    let _ = write!(
        out,
        "examples: {}\nvocab: {}\ninitial_loss: {:.6}\nfinal_loss: {:.6}\n",
        examples.len(),
        vocab.len(),
        curve.initial(),
        curve.last()
    );
    Ok(())
}

pub(super) fn probe(a: &ProbeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_checkpoint(&read(&a.model.join("model.ckpt"))?)?;
    let vocab = Vocabulary::from_text(&read(&a.model.join("vocab.txt"))?)?;
    if vocab.len() != model.vocab_size {
        return Err(CliError::input(
            "CheckpointError",
            format!(
                "vocabulary has {} entries but the checkpoint has {} rows",
                vocab.len(),
                model.vocab_size
            ),
        ));
    }
    let spec = AlignmentProbeSpec::parse(&read(&a.pairs)?)?;
    let score = alignment_score(&model, &spec, &vocab)?;
    let _ = write!(
        out,
        "pairs: {}\nmean_cosine: {:.4}\nprecision_at_1: {:.4}\n",
        spec.word_pairs.len(),
        score.mean_cosine,
        score.precision_at_1
    );
    Ok(())
}
