use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Lowercases and collapses internal whitespace. Applied to slot names and
/// values before any comparison.
pub fn normalize_value(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

pub type SlotValue = (String, String);

/// Slot universe for one task domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    /// Slot name → permitted values. An empty value set admits any value.
    pub informable: BTreeMap<String, BTreeSet<String>>,
    pub requestable: BTreeSet<String>,
    /// Number of distinct slot types. At least `informable.len()`.
    pub slot_universe_size: usize,
}

impl Ontology {
    pub fn new<I, V, R>(
        informable: I,
        requestable: R,
        slot_universe_size: Option<usize>,
    ) -> Result<Self, MetricsError>
    where
        I: IntoIterator<Item = (String, V)>,
        V: IntoIterator<Item = String>,
        R: IntoIterator<Item = String>,
    {
        let informable: BTreeMap<String, BTreeSet<String>> = informable
            .into_iter()
            .map(|(slot, values)| {
                (
                    normalize_value(&slot),
                    values.into_iter().map(|v| normalize_value(&v)).collect(),
                )
            })
            .collect();
        let requestable: BTreeSet<String> =
            requestable.into_iter().map(|r| normalize_value(&r)).collect();
        if let Some(both) = requestable.iter().find(|r| informable.contains_key(*r)) {
            return Err(MetricsError::OntologyOverlap(both.clone()));
        }
        let universe = slot_universe_size.unwrap_or(informable.len());
        if universe < informable.len() {
            return Err(MetricsError::UniverseTooSmall {
                universe,
                informable: informable.len(),
            });
        }
        Ok(Ontology {
            informable,
            requestable,
            slot_universe_size: universe,
        })
    }

    /// Number of slot decisions per turn under `scope`.
    pub fn scope_size(&self, scope: Scope) -> usize {
        match scope {
            Scope::InformableOnly => self.informable.len(),
            Scope::FullUniverse => self
                .slot_universe_size
                .max(self.informable.len() + self.requestable.len()),
        }
    }

    /// Checks that every name and value in `state` belongs to the ontology.
    pub fn check(&self, state: &DialogueState) -> Result<(), MetricsError> {
        for (slot, value) in &state.informable {
            match self.informable.get(slot) {
                None => return Err(MetricsError::UnknownSlot(slot.clone())),
                Some(values) if !values.is_empty() && !values.contains(value) => {
                    return Err(MetricsError::UnknownValue {
                        slot: slot.clone(),
                        value: value.clone(),
                    })
                }
                _ => {}
            }
        }
        for r in &state.requested {
            if !self.requestable.contains(r) {
                return Err(MetricsError::UnknownSlot(r.clone()));
            }
        }
        Ok(())
    }
}

/// Which slots count toward slot accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// Informable slots only.
    #[default]
    InformableOnly,
    /// Every slot type in the universe, including requestables and slots
    /// neither side mentions.
    FullUniverse,
}

impl std::str::FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "informable" | "informable-only" => Ok(Scope::InformableOnly),
            "full" | "full-universe" => Ok(Scope::FullUniverse),
            _ => Err(format!("unknown scope {s:?}")),
        }
    }
}

/// Informable slot assignments and requested slots for one turn.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DialogueState {
    /// At most one value per slot.
    pub informable: BTreeMap<String, String>,
    pub requested: BTreeSet<String>,
}

impl DialogueState {
    pub fn new<P, R, S1, S2, S3>(pairs: P, requested: R) -> Result<Self, MetricsError>
    where
        P: IntoIterator<Item = (S1, S2)>,
        R: IntoIterator<Item = S3>,
        S1: AsRef<str>,
        S2: AsRef<str>,
        S3: AsRef<str>,
    {
        let mut informable = BTreeMap::new();
        for (slot, value) in pairs {
            let slot = normalize_value(slot.as_ref());
            let value = normalize_value(value.as_ref());
            if let Some(prev) = informable.insert(slot.clone(), value.clone()) {
                if prev != value {
                    return Err(MetricsError::DuplicateSlot(slot));
                }
            }
        }
        Ok(DialogueState {
            informable,
            requested: requested
                .into_iter()
                .map(|r| normalize_value(r.as_ref()))
                .collect(),
        })
    }

    pub fn informable_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.informable.iter().map(|(s, v)| (s.as_str(), v.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnRecord {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub predicted: DialogueState,
    pub gold: DialogueState,
}
