use std::fmt::Write as _;

use crate::maskgen::Task;

use super::model::ToyMlm;
use super::ToyError;

const MAGIC: &str = "xlift-toymlm v1";

/// Text checkpoint: one header line, then one row of `dim` values per
/// vocabulary entry. Values use shortest round-trip formatting, so loading a
/// saved model restores it bit for bit.
pub fn save_checkpoint(model: &ToyMlm) -> String {
    let mut s = format!(
        "{MAGIC} vocab_size={} dim={} seed={} task={} trained={}\n",
        model.vocab_size,
        model.dim,
        model.seed,
        model.task.map_or("none", Task::tag),
        model.trained
    );
    for v in 0..model.vocab_size {
        let row: Vec<String> = model.row(v).iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn load_checkpoint(text: &str) -> Result<ToyMlm, ToyError> {
    let bad = |m: &str| ToyError::Checkpoint(m.to_string());
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty checkpoint"))?;
    let fields = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad("missing checkpoint header"))?;
    let (mut vocab_size, mut dim, mut seed, mut task, mut trained) = (None, None, 0, None, false);
    for kv in fields.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad("malformed header field"))?;
        match k {
            "vocab_size" => vocab_size = v.parse().ok(),
            "dim" => dim = v.parse().ok(),
            "seed" => seed = v.parse().map_err(|_| bad("bad seed"))?,
            "task" if v != "none" => task = Some(v.parse::<Task>().map_err(|e| bad(&e))?),
            "task" => {}
            "trained" => trained = v == "true",
            _ => return Err(bad(&format!("unknown header field {k}"))),
        }
    }
    let vocab_size = vocab_size.ok_or_else(|| bad("header lacks vocab_size"))?;
    let dim = dim.ok_or_else(|| bad("header lacks dim"))?;
    let mut embeddings = Vec::with_capacity(vocab_size * dim);
    for (r, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(&format!("row {r}: not a number")))?;
        if row.len() != dim {
            return Err(bad(&format!("row {r}: expected {dim} values, got {}", row.len())));
        }
        embeddings.extend(row);
    }
    if embeddings.len() != vocab_size * dim {
        return Err(bad("row count does not match vocab_size"));
    }
    Ok(ToyMlm {
        embeddings,
        vocab_size,
        dim,
        seed,
        trained,
        task,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_exact_round_trip() {
        let mut m = ToyMlm::new(7, 3, 42, 0.37);
        m.task = Some(Task::Tlm);
        let back = load_checkpoint(&save_checkpoint(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(load_checkpoint("").is_err());
        assert!(load_checkpoint("hello\n").is_err());
        let m = ToyMlm::new(2, 2, 0, 1.0);
        let text = save_checkpoint(&m);
        let truncated: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(load_checkpoint(&truncated).is_err());
    }
}
