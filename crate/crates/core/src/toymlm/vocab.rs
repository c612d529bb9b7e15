use std::collections::HashMap;

use crate::maskgen::{MaskedExample, MASK, UNK};

use super::ToyError;

pub const UNK_ID: usize = 0;
pub const MASK_ID: usize = 1;

/// Surface ↔ id bijection with `[UNK]` at 0 and `[MASK]` at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    id_of: HashMap<String, usize>,
    surfaces: Vec<String>,
}

impl Vocabulary {
    /// Builds a vocabulary from surfaces listed in id order after the two
    /// specials. Duplicates and specials in `words` are skipped.
    pub fn from_surfaces<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v = Vocabulary {
            id_of: HashMap::new(),
            surfaces: Vec::new(),
        };
        v.insert(UNK.to_string());
        v.insert(MASK.to_string());
        for w in words {
            v.insert(w.into());
        }
        v
    }

    fn insert(&mut self, s: String) {
        if !self.id_of.contains_key(&s) {
            self.id_of.insert(s.clone(), self.surfaces.len());
            self.surfaces.push(s);
        }
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    /// Id of `surface`, or [`UNK_ID`] if absent.
    pub fn id(&self, surface: &str) -> usize {
        self.id_of.get(surface).copied().unwrap_or(UNK_ID)
    }

    pub fn get(&self, surface: &str) -> Option<usize> {
        self.id_of.get(surface).copied()
    }

    pub fn surface(&self, id: usize) -> Option<&str> {
        self.surfaces.get(id).map(String::as_str)
    }

    pub fn surfaces(&self) -> &[String] {
        &self.surfaces
    }

    /// One surface per line, in id order.
    pub fn to_text(&self) -> String {
        let mut s = self.surfaces.join("\n");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ToyError> {
        let mut lines = text.lines();
        if lines.next() != Some(UNK) || lines.next() != Some(MASK) {
            return Err(ToyError::Checkpoint(format!(
                "vocabulary must start with {UNK} and {MASK}"
            )));
        }
        let rest: Vec<&str> = lines.collect();
        let v = Vocabulary::from_surfaces(rest.iter().copied());
        if v.len() != rest.len() + 2 {
            return Err(ToyError::Checkpoint("duplicate vocabulary entry".into()));
        }
        Ok(v)
    }
}

/// Counts de-masked surfaces and assigns ids by descending frequency, ties
/// broken lexicographically. Surfaces seen fewer than `min_count` times are
/// left out and map to `[UNK]`.
pub fn build_vocab<'a, I>(examples: I, min_count: usize) -> Result<Vocabulary, ToyError>
where
    I: IntoIterator<Item = &'a MaskedExample>,
{
    let mut counts: HashMap<&'a str, usize> = HashMap::new();
    let mut seen_any = false;
    for ex in examples {
        seen_any = true;
        for s in ex.demasked_surfaces() {
            if s != MASK && s != UNK {
                *counts.entry(s).or_insert(0) += 1;
            }
        }
    }
    if !seen_any {
        return Err(ToyError::EmptyInput);
    }
    let mut ranked: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(Vocabulary::from_surfaces(ranked.into_iter().map(|(s, _)| s)))
}
