//! On-disk formats: example records (one JSON object per line, canonical
//! field order), generation headers, DST turn files, and ontology files.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::corpus::Language;
use crate::dstmetrics::{DialogueState, MetricsError, Ontology, TurnRecord};
use crate::maskgen::{Direction, LanguageSpan, MaskedExample, Provenance, Task, Token};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("unsupported schema_version {0}")]
    SchemaVersion(u32),
    #[error("{0}")]
    Invalid(String),
    #[error("{file}:{line}: {source}")]
    State {
        file: String,
        line: usize,
        source: MetricsError,
    },
}

impl RecordError {
    pub fn code(&self) -> &'static str {
        match self {
            RecordError::Parse { .. } => "ParseError",
            RecordError::SchemaVersion(_) => "SchemaVersion",
            RecordError::Invalid(_) => "InvalidRecord",
            RecordError::State { source, .. } => source.code(),
        }
    }

    fn at(self, file: &str, line: usize) -> Self {
        match self {
            RecordError::Invalid(message) => RecordError::Parse {
                file: file.to_string(),
                line,
                message,
            },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceRecord {
    pub doc_id: String,
    pub start: usize,
    pub k: usize,
    pub direction: Direction,
}

/// Wire form of a [`MaskedExample`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleRecord {
    pub task: Task,
    pub tokens: Vec<String>,
    pub mask_positions: Vec<usize>,
    pub targets: Vec<String>,
    pub language_spans: Vec<(usize, usize, String)>,
    pub utterance_boundaries: Vec<usize>,
    pub provenance: ProvenanceRecord,
    pub schema_version: u32,
}

const RECORD_FIELDS: [&str; 8] = [
    "task",
    "tokens",
    "mask_positions",
    "targets",
    "language_spans",
    "utterance_boundaries",
    "provenance",
    "schema_version",
];

impl From<&MaskedExample> for ExampleRecord {
    fn from(ex: &MaskedExample) -> Self {
        ExampleRecord {
            task: ex.task,
            tokens: ex.tokens.iter().map(|t| t.surface.clone()).collect(),
            mask_positions: ex.mask_positions.clone(),
            targets: ex.targets.clone(),
            language_spans: ex
                .language_spans
                .iter()
                .map(|s| (s.start, s.end, s.language.to_string()))
                .collect(),
            utterance_boundaries: ex.utterance_boundaries.clone(),
            provenance: ProvenanceRecord {
                doc_id: ex.provenance.doc_id.clone(),
                start: ex.provenance.start,
                k: ex.provenance.k,
                direction: ex.provenance.direction,
            },
            schema_version: SCHEMA_VERSION,
        }
    }
}

impl ExampleRecord {
    /// Rebuilds the example. Token languages come from the spans and
    /// utterance ordinals from the boundaries, so both must cover the tokens.
    pub fn into_example(self) -> Result<MaskedExample, RecordError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(RecordError::SchemaVersion(self.schema_version));
        }
        let n = self.tokens.len();
        let spans: Vec<LanguageSpan> = self
            .language_spans
            .iter()
            .map(|(start, end, lang)| LanguageSpan {
                start: *start,
                end: *end,
                language: Language::new(lang),
            })
            .collect();
        let mut language_of = vec![None; n];
        for span in &spans {
            if span.start > span.end || span.end > n {
                return Err(RecordError::Invalid(format!(
                    "language span {}..{} out of range",
                    span.start, span.end
                )));
            }
            for slot in &mut language_of[span.start..span.end] {
                *slot = Some(span.language.clone());
            }
        }
        let mut tokens = Vec::with_capacity(n);
        let mut ordinal = 0;
        for (i, (surface, language)) in self.tokens.into_iter().zip(language_of).enumerate() {
            while self
                .utterance_boundaries
                .get(ordinal + 1)
                .is_some_and(|&b| b <= i)
            {
                ordinal += 1;
            }
            let language = language.ok_or_else(|| {
                RecordError::Invalid(format!("token {i} is not covered by a language span"))
            })?;
            tokens.push(Token {
                surface,
                utterance_ordinal: ordinal,
                language,
            });
        }
        Ok(MaskedExample {
            task: self.task,
            tokens,
            mask_positions: self.mask_positions,
            targets: self.targets,
            language_spans: spans,
            utterance_boundaries: self.utterance_boundaries,
            provenance: Provenance {
                doc_id: self.provenance.doc_id,
                start: self.provenance.start,
                k: self.provenance.k,
                direction: self.provenance.direction,
            },
        })
    }
}

/// Canonical single-line serialization of an example.
pub fn example_to_line(ex: &MaskedExample) -> String {
    serde_json::to_string(&ExampleRecord::from(ex)).expect("records serialize")
}

/// Parses one example line. In strict mode unknown fields are rejected;
/// otherwise they are dropped.
pub fn example_from_line(line: &str, strict: bool) -> Result<MaskedExample, RecordError> {
    let record: ExampleRecord = if strict {
        serde_json::from_str(line).map_err(|e| RecordError::Invalid(e.to_string()))?
    } else {
        let mut v: Value =
            serde_json::from_str(line).map_err(|e| RecordError::Invalid(e.to_string()))?;
        if let Value::Object(map) = &mut v {
            map.retain(|k, _| RECORD_FIELDS.contains(&k.as_str()));
        }
        serde_json::from_value(v).map_err(|e| RecordError::Invalid(e.to_string()))?
    };
    record.into_example()
}

/// First line of every example file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationHeader {
    pub schema_version: u32,
    pub kind: String,
    pub task: Task,
    pub seed: u64,
    /// Every generation setting as `key → value`, replayable as a config file.
    pub config: BTreeMap<String, String>,
}

impl GenerationHeader {
    pub fn new(task: Task, seed: u64, config: BTreeMap<String, String>) -> Self {
        GenerationHeader {
            schema_version: SCHEMA_VERSION,
            kind: "header".to_string(),
            task,
            seed,
            config,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("header serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, RecordError> {
        let h: GenerationHeader =
            serde_json::from_str(line).map_err(|e| RecordError::Invalid(e.to_string()))?;
        if h.schema_version != SCHEMA_VERSION {
            return Err(RecordError::SchemaVersion(h.schema_version));
        }
        if h.kind != "header" {
            return Err(RecordError::Invalid("first line is not a header".into()));
        }
        Ok(h)
    }
}

/// Reads an example file: header line, then one record per line.
pub fn read_example_file(
    text: &str,
    file: &str,
    strict: bool,
) -> Result<(GenerationHeader, Vec<MaskedExample>), RecordError> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| RecordError::Parse {
        file: file.to_string(),
        line: 1,
        message: "missing header line".into(),
    })?;
    let header = GenerationHeader::from_line(first).map_err(|e| e.at(file, 1))?;
    let examples = lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| example_from_line(l, strict).map_err(|e| e.at(file, i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header, examples))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    #[serde(default)]
    pub informable: BTreeMap<String, String>,
    #[serde(default)]
    pub requested: Vec<String>,
}

/// One line of a prediction or gold file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurnLine {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub state: StateRecord,
}

impl TurnLine {
    pub fn from_state(dialogue_id: &str, turn_index: usize, state: &DialogueState) -> Self {
        TurnLine {
            dialogue_id: dialogue_id.to_string(),
            turn_index,
            state: StateRecord {
                informable: state.informable.clone(),
                requested: state.requested.iter().cloned().collect(),
            },
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("turn serializes")
    }
}

type TurnMap = BTreeMap<(String, usize), DialogueState>;

fn parse_turn_file(text: &str, file: &str) -> Result<TurnMap, RecordError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| RecordError::Parse {
            file: file.to_string(),
            line: i + 1,
            message,
        };
        let t: TurnLine = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let state = DialogueState::new(t.state.informable, t.state.requested).map_err(|source| {
            RecordError::State {
                file: file.to_string(),
                line: i + 1,
                source,
            }
        })?;
        let key = (t.dialogue_id, t.turn_index);
        if out.contains_key(&key) {
            return Err(parse_err(format!(
                "duplicate turn {} of dialogue {:?}",
                key.1, key.0
            )));
        }
        out.insert(key, state);
    }
    Ok(out)
}

/// Joins prediction and gold files on `(dialogue_id, turn_index)`. Turns
/// come out ordered by dialogue id, then turn index.
pub fn read_turns(
    pred_text: &str,
    pred_file: &str,
    gold_text: &str,
    gold_file: &str,
) -> Result<Vec<TurnRecord>, RecordError> {
    let mut pred = parse_turn_file(pred_text, pred_file)?;
    let gold = parse_turn_file(gold_text, gold_file)?;
    let mut turns = Vec::with_capacity(gold.len());
    for ((dialogue_id, turn_index), gold_state) in gold {
        let predicted = pred.remove(&(dialogue_id.clone(), turn_index)).ok_or_else(|| {
            RecordError::Invalid(format!(
                "{pred_file}: no prediction for dialogue {dialogue_id:?} turn {turn_index}"
            ))
        })?;
        turns.push(TurnRecord {
            dialogue_id,
            turn_index,
            predicted,
            gold: gold_state,
        });
    }
    if let Some(((d, t), _)) = pred.into_iter().next() {
        return Err(RecordError::Invalid(format!(
            "{pred_file}: prediction for dialogue {d:?} turn {t} has no gold turn"
        )));
    }
    Ok(turns)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyFile {
    pub informable: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub requestable: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_universe_size: Option<usize>,
}

pub fn read_ontology(text: &str, file: &str) -> Result<Ontology, RecordError> {
    let f: OntologyFile = serde_json::from_str(text).map_err(|e| RecordError::Parse {
        file: file.to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    Ontology::new(f.informable, f.requestable, f.slot_universe_size).map_err(|source| {
        RecordError::State {
            file: file.to_string(),
            line: 1,
            source,
        }
    })
}

impl From<&Ontology> for OntologyFile {
    fn from(o: &Ontology) -> Self {
        OntologyFile {
            informable: o
                .informable
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
                .collect(),
            requestable: o.requestable.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
            slot_universe_size: Some(o.slot_universe_size),
        }
    }
}
