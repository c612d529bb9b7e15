use serde::Serialize;

use super::model::ToyMlm;
use super::vocab::Vocabulary;
use super::ToyError;

/// Gold translation pairs and the candidate pool for retrieval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentProbeSpec {
    pub word_pairs: Vec<(String, String)>,
    /// Target-language surfaces searched for nearest neighbours.
    pub candidate_pool: Vec<String>,
}

impl AlignmentProbeSpec {
    /// Pool defaults to the pairs' target words.
    pub fn from_pairs(word_pairs: Vec<(String, String)>) -> Self {
        let candidate_pool = word_pairs.iter().map(|(_, t)| t.clone()).collect();
        AlignmentProbeSpec {
            word_pairs,
            candidate_pool,
        }
    }

    /// Parses `src<TAB>tgt` (or space separated) lines.
    pub fn parse(text: &str) -> Result<Self, ToyError> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => pairs.push((a.to_string(), b.to_string())),
                _ => {
                    return Err(ToyError::InvalidConfig(format!(
                        "pair file line {}: expected two fields",
                        n + 1
                    )))
                }
            }
        }
        Ok(AlignmentProbeSpec::from_pairs(pairs))
    }

    pub fn to_text(&self) -> String {
        self.word_pairs
            .iter()
            .map(|(a, b)| format!("{a}\t{b}\n"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlignmentScore {
    pub mean_cosine: f64,
    pub precision_at_1: f64,
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Mean pair cosine and nearest-neighbour retrieval precision@1 over the
/// candidate pool. Ties go to the lower id.
pub fn alignment_score(
    model: &ToyMlm,
    probe: &AlignmentProbeSpec,
    vocab: &Vocabulary,
) -> Result<AlignmentScore, ToyError> {
    let lookup = |s: &str| vocab.get(s).ok_or_else(|| ToyError::UnknownProbeWord(s.to_string()));
    if probe.word_pairs.is_empty() {
        return Err(ToyError::EmptyInput);
    }
    let mut pool: Vec<usize> = probe
        .candidate_pool
        .iter()
        .map(|s| lookup(s))
        .collect::<Result<_, _>>()?;
    pool.sort_unstable();
    pool.dedup();

    let mut cos_sum = 0.0;
    let mut hits = 0usize;
    for (src, tgt) in &probe.word_pairs {
        let s = lookup(src)?;
        let t = lookup(tgt)?;
        cos_sum += cosine(model.row(s), model.row(t));
        let mut best: Option<(usize, f64)> = None;
        for &c in &pool {
            let sim = cosine(model.row(s), model.row(c));
            if best.is_none_or(|(_, b)| sim > b) {
                best = Some((c, sim));
            }
        }
        if best.map(|(c, _)| c) == Some(t) {
            hits += 1;
        }
    }
    let n = probe.word_pairs.len() as f64;
    Ok(AlignmentScore {
        mean_cosine: cos_sum / n,
        precision_at_1: hits as f64 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_rows_cosine_one() {
        let vocab = Vocabulary::from_surfaces(["bat", "Fledermaus", "Martin"]);
        let mut m = ToyMlm::new(vocab.len(), 4, 0, 1.0);
        let row = m.row(2).to_vec();
        m.row_mut(3).copy_from_slice(&row);
        let probe = AlignmentProbeSpec::from_pairs(vec![("bat".into(), "Fledermaus".into())]);
        let s = alignment_score(&m, &probe, &vocab).unwrap();
        assert!((s.mean_cosine - 1.0).abs() < 1e-12);
        assert_eq!(s.precision_at_1, 1.0);
    }

    #[test]
    fn ties_go_to_lower_id() {
        let vocab = Vocabulary::from_surfaces(["a", "x", "y"]);
        let mut m = ToyMlm::zeros(vocab.len(), 2);
        m.row_mut(2).copy_from_slice(&[1.0, 0.0]);
        m.row_mut(3).copy_from_slice(&[2.0, 0.0]);
        m.row_mut(4).copy_from_slice(&[3.0, 0.0]);
        let probe = AlignmentProbeSpec {
            word_pairs: vec![("a".into(), "y".into())],
            candidate_pool: vec!["y".into(), "x".into()],
        };
        assert_eq!(alignment_score(&m, &probe, &vocab).unwrap().precision_at_1, 0.0);
    }

    #[test]
    fn unknown_word() {
        let vocab = Vocabulary::from_surfaces(["a"]);
        let m = ToyMlm::zeros(vocab.len(), 2);
        let probe = AlignmentProbeSpec::from_pairs(vec![("a".into(), "b".into())]);
        assert_eq!(
            alignment_score(&m, &probe, &vocab).unwrap_err(),
            ToyError::UnknownProbeWord("b".into())
        );
    }

    #[test]
    fn pair_file_parse() {
        let p = AlignmentProbeSpec::parse("a0\tb0\na1 b1\n\n").unwrap();
        assert_eq!(p.word_pairs.len(), 2);
        assert_eq!(AlignmentProbeSpec::parse(&p.to_text()).unwrap(), p);
        assert!(AlignmentProbeSpec::parse("a b c").is_err());
    }
}
