mod common;

use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

use common::fixture;

fn xlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xlift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn digest(path: &Path) -> String {
    format!("{:x}", Sha256::digest(std::fs::read(path).unwrap()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn extract_takes_exact_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ex");
    let o = xlift(&[
        "extract",
        "--src",
        p(&fixture("mini-bilingual/src.txt")),
        "--tgt",
        p(&fixture("mini-bilingual/tgt.txt")),
        "--boundaries",
        p(&fixture("mini-bilingual/boundaries.txt")),
        "--budget",
        "200",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    for f in ["src.txt", "tgt.txt"] {
        assert_eq!(std::fs::read_to_string(out.join(f)).unwrap().lines().count(), 200);
    }
    assert_eq!(std::fs::read_to_string(out.join("boundaries.txt")).unwrap(), "0\n150\n");
    let stats = std::fs::read_to_string(out.join("stats.txt")).unwrap();
    assert!(stats.contains("lines: 200\n") && stats.contains("doc_length[50]: 1\n"), "{stats}");
}

#[test]
fn oversized_budget_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = xlift(&[
        "extract",
        "--src",
        p(&fixture("bat-scene/en.txt")),
        "--tgt",
        p(&fixture("bat-scene/de.txt")),
        "--out",
        p(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).starts_with("warning\t"), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(tmp.path().join("src.txt")).unwrap().lines().count(), 6);
}

#[test]
fn mismatched_inputs_exit_2() {
    let o = xlift(&[
        "extract",
        "--src",
        p(&fixture("mini-bilingual/src.txt")),
        "--tgt",
        p(&fixture("bat-scene/de.txt")),
        "--out",
        p(&std::env::temp_dir().join("xlift-never")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("LineCountMismatch\t"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn stats_prints_report_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    let json = tmp.path().join("stats.json");
    let o = xlift(&[
        "stats",
        "--src",
        p(&fixture("bat-scene/en.txt")),
        "--tgt",
        p(&fixture("bat-scene/de.txt")),
        "--json",
        p(&json),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("documents: 1\nlines: 6\n"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["lines"], 6);
}

fn generate(out: &Path, extra: &[&str]) -> Output {
    let corpus = fixture("mini-bilingual");
    let mut args = vec![
        "generate",
        "--corpus",
        p(&corpus),
        "--src-lang",
        "en",
        "--tgt-lang",
        "de",
        "--out",
        p(out),
    ];
    args.extend_from_slice(extra);
    xlift(&args)
}

#[test]
fn generate_is_deterministic_and_honest() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.jsonl");
    let b = tmp.path().join("b.jsonl");
    for out in [&a, &b] {
        let o = generate(out, &["--task", "rm", "--n", "300", "--seed", "4"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(digest(&a), digest(&b));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 301);
    assert!(text.ends_with('\n'));
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 4);
    assert_eq!(header["task"], "RM");

    let c = tmp.path().join("c.jsonl");
    let o = xlift(&["generate", "--replay", p(&a), "--out", p(&c), "--shards", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(digest(&a), digest(&c));

    let d = tmp.path().join("d.jsonl");
    let o = generate(&d, &["--task", "rm", "--n", "300", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(digest(&a), digest(&d));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("gen.conf");
    std::fs::write(&cfg, "# monolingual run\ntask = monodm\nn = 40\nmask-rate = 0.3\nside = tgt\n").unwrap();
    let out = tmp.path().join("m.jsonl");
    let o = generate(&out, &["--config", p(&cfg), "--n", "25"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 26);
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["config"]["mask_rate"], "0.3");
    assert_eq!(header["config"]["n"], "25");
    assert!(text.lines().skip(1).all(|l| l.contains("\"direction\":\"tgt\"")));

    std::fs::write(&cfg, "task = monodm\ncolour = blue\n").unwrap();
    let o = generate(&out, &["--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ConfigError\t"));
}

#[test]
fn generator_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x.jsonl");
    let o = generate(&out, &["--task", "tlm", "--mask-rate", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("InvalidConfig\t"));
    let o = generate(&out, &["--task", "xdm", "--k-min", "200", "--k-max", "300"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("CorpusTooShort\t"), "{}", stderr(&o));
    let o = xlift(&["generate", "--task", "nope", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tapt_from_utterance_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t.jsonl");
    let o = xlift(&[
        "generate",
        "--task",
        "tapt",
        "--utterances",
        p(&fixture("bat-scene/de.txt")),
        "--lang",
        "de",
        "--n",
        "12",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let (_, examples) = xlift::records::read_example_file(&text, "t", true).unwrap();
    let starts: Vec<usize> = examples.iter().map(|e| e.provenance.start).collect();
    assert_eq!(starts, [0, 1, 2, 3, 4, 5, 0, 1, 2, 3, 4, 5]);
}

#[test]
fn eval_reports_and_rejects_bad_lines() {
    let dir = fixture("dst/cascade");
    let o = xlift(&[
        "eval",
        "--pred",
        p(&dir.join("gold.jsonl")),
        "--gold",
        p(&dir.join("gold.jsonl")),
        "--ontology",
        p(&dir.join("ontology.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "turns: 4\nJGA: 1.0000\nSlot F1: 1.0000\nSlot Accuracy: 1.0000\nRequest Accuracy: 1.0000\n"
    );

    let tmp = tempfile::tempdir().unwrap();
    let report = tmp.path().join("report.json");
    let o = xlift(&[
        "eval",
        "--pred",
        p(&dir.join("pred-baseline.jsonl")),
        "--gold",
        p(&dir.join("gold.jsonl")),
        "--ontology",
        p(&dir.join("ontology.json")),
        "--report",
        p(&report),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dialogue train: turns=3 jga=0.3333 first_error=1"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["dialogues"][1]["first_error"], 1);

    let bad = tmp.path().join("bad.jsonl");
    let gold = std::fs::read_to_string(dir.join("gold.jsonl")).unwrap();
    let mut lines: Vec<&str> = gold.lines().collect();
    lines[2] = "{\"dialogue_id\": \"train\"";
    std::fs::write(&bad, lines.join("\n")).unwrap();
    let o = xlift(&[
        "eval",
        "--pred",
        p(&bad),
        "--gold",
        p(&dir.join("gold.jsonl")),
        "--ontology",
        p(&dir.join("ontology.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("ParseError\t") && err.contains("bad.jsonl:3:"), "{err}");
}

#[test]
fn synthetic_train_probe_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let syn = tmp.path().join("syn");
    let o = xlift(&["make-synthetic", "--out", p(&syn)]);
    assert_eq!(o.status.code(), Some(0));
    let examples = tmp.path().join("tlm.jsonl");
    let o = xlift(&[
        "generate",
        "--task",
        "tlm",
        "--corpus",
        p(&syn),
        "--src-lang",
        "syn-a",
        "--tgt-lang",
        "syn-b",
        "--n",
        "300",
        "--out",
        p(&examples),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let model = tmp.path().join("model");
    let o = xlift(&[
        "train-toy",
        "--examples",
        p(&examples),
        "--epochs",
        "3",
        "--lr",
        "1",
        "--out",
        p(&model),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let curve = std::fs::read_to_string(model.join("loss.csv")).unwrap();
    assert_eq!(curve.lines().count(), 5);
    let o = xlift(&["probe", "--model", p(&model), "--pairs", p(&syn.join("pairs.txt"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let p1: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("precision_at_1: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&p1));

    let o = xlift(&[
        "train-toy",
        "--examples",
        p(&examples),
        "--lr",
        "1e300",
        "--init-scale",
        "1",
        "--out",
        p(&model),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("NonFiniteLoss\t"));
}

#[test]
fn usage_errors_exit_2() {
    let o = xlift(&["generate", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("UsageError\t"));
    let o = xlift(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
