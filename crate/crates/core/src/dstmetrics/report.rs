use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::metrics::correct_slots;
use super::{
    joint_goal_accuracy, request_accuracy, slot_accuracy, slot_f1, MetricsError, Ontology, Scope,
    TurnRecord,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub scope: Scope,
    /// Reject out-of-ontology slots and values instead of scoring them as
    /// mismatches.
    pub strict: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SlotCounts {
    pub correct: usize,
    pub wrong_value: usize,
    pub missed: usize,
    pub spurious: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DialogueBreakdown {
    pub dialogue_id: String,
    pub turns: usize,
    pub joint_goal_accuracy: f64,
    /// Turn index of the earliest turn failing joint goal accuracy.
    pub first_error: Option<usize>,
}

/// Errors at one turn, split by origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TurnBreakdown {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub joint_correct: bool,
    pub correct_slots: usize,
    /// Gold pairs absent from the prediction.
    pub missing: Vec<(String, String)>,
    /// Predicted pairs absent from gold.
    pub spurious: Vec<(String, String)>,
    /// Errors already present at the previous turn of the dialogue.
    pub inherited: Vec<(String, String)>,
    /// The turn fails only through inherited errors.
    pub cascaded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub turns: usize,
    pub scope: Scope,
    pub joint_goal_accuracy: f64,
    pub slot_f1: f64,
    pub slot_accuracy: f64,
    pub request_accuracy: f64,
    pub dialogues: Vec<DialogueBreakdown>,
    pub slots: BTreeMap<String, SlotCounts>,
    pub turn_breakdown: Vec<TurnBreakdown>,
}

impl MetricsReport {
    /// The four headline metrics as `name: value` lines.
    pub fn summary_text(&self) -> String {
        format!(
            "turns: {}\nJGA: {:.4}\nSlot F1: {:.4}\nSlot Accuracy: {:.4}\nRequest Accuracy: {:.4}\n",
            self.turns,
            self.joint_goal_accuracy,
            self.slot_f1,
            self.slot_accuracy,
            self.request_accuracy
        )
    }

    /// Per-dialogue and per-turn breakdown as text.
    pub fn breakdown_text(&self) -> String {
        let mut s = String::new();
        for d in &self.dialogues {
            let first = d
                .first_error
                .map_or_else(|| "-".to_string(), |i| i.to_string());
            let _ = writeln!(
                s,
                "dialogue {}: turns={} jga={:.4} first_error={}",
                d.dialogue_id, d.turns, d.joint_goal_accuracy, first
            );
        }
        for t in self.turn_breakdown.iter().filter(|t| !t.joint_correct) {
            let fmt = |v: &[(String, String)]| {
                v.iter()
                    .map(|(s, x)| format!("{s}={x}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let _ = writeln!(
                s,
                "turn {}#{}: missing=[{}] spurious=[{}] inherited=[{}]{}",
                t.dialogue_id,
                t.turn_index,
                fmt(&t.missing),
                fmt(&t.spurious),
                fmt(&t.inherited),
                if t.cascaded { " cascaded" } else { "" }
            );
        }
        s
    }
}

/// Computes every metric plus per-dialogue, per-slot and per-turn detail.
pub fn evaluate(
    turns: &[TurnRecord],
    ontology: &Ontology,
    options: EvalOptions,
) -> Result<MetricsReport, MetricsError> {
    let jga = joint_goal_accuracy(turns)?;
    let f1 = slot_f1(turns)?;
    let acc = slot_accuracy(turns, ontology, options.scope, options.strict)?;
    let req = request_accuracy(turns)?;

    let mut by_dialogue: BTreeMap<&str, Vec<&TurnRecord>> = BTreeMap::new();
    for t in turns {
        by_dialogue.entry(&t.dialogue_id).or_default().push(t);
    }

    let mut dialogues = Vec::with_capacity(by_dialogue.len());
    let mut turn_breakdown = Vec::with_capacity(turns.len());
    let mut slots: BTreeMap<String, SlotCounts> = BTreeMap::new();

    for (id, mut dturns) in by_dialogue {
        dturns.sort_by_key(|t| t.turn_index);
        if let Some(w) = dturns.windows(2).find(|w| w[0].turn_index == w[1].turn_index) {
            return Err(MetricsError::DuplicateTurn {
                dialogue_id: id.to_string(),
                turn_index: w[0].turn_index,
            });
        }
        let mut first_error = None;
        let mut hits = 0usize;
        let mut prev_errors: BTreeSet<(String, String)> = BTreeSet::new();
        for t in &dturns {
            let pred = &t.predicted.informable;
            let gold = &t.gold.informable;
            let missing: Vec<(String, String)> = gold
                .iter()
                .filter(|(s, v)| pred.get(*s) != Some(*v))
                .map(|(s, v)| (s.clone(), v.clone()))
                .collect();
            let spurious: Vec<(String, String)> = pred
                .iter()
                .filter(|(s, v)| gold.get(*s) != Some(*v))
                .map(|(s, v)| (s.clone(), v.clone()))
                .collect();
            let joint_correct = pred == gold;
            if joint_correct {
                hits += 1;
            } else if first_error.is_none() {
                first_error = Some(t.turn_index);
            }
            let errors: BTreeSet<(String, String)> =
                missing.iter().chain(&spurious).cloned().collect();
            let inherited: Vec<(String, String)> =
                errors.intersection(&prev_errors).cloned().collect();
            let cascaded = !joint_correct && inherited.len() == errors.len();

            for slot in pred.keys().chain(gold.keys()).collect::<BTreeSet<_>>() {
                let c = slots.entry(slot.clone()).or_default();
                match (pred.get(slot), gold.get(slot)) {
                    (Some(p), Some(g)) if p == g => c.correct += 1,
                    (Some(_), Some(_)) => c.wrong_value += 1,
                    (None, Some(_)) => c.missed += 1,
                    (Some(_), None) => c.spurious += 1,
                    (None, None) => {}
                }
            }

            turn_breakdown.push(TurnBreakdown {
                dialogue_id: id.to_string(),
                turn_index: t.turn_index,
                joint_correct,
                correct_slots: correct_slots(t, ontology, options.scope),
                missing,
                spurious,
                inherited,
                cascaded,
            });
            prev_errors = errors;
        }
        dialogues.push(DialogueBreakdown {
            dialogue_id: id.to_string(),
            turns: dturns.len(),
            joint_goal_accuracy: hits as f64 / dturns.len() as f64,
            first_error,
        });
    }

    Ok(MetricsReport {
        turns: turns.len(),
        scope: options.scope,
        joint_goal_accuracy: jga,
        slot_f1: f1,
        slot_accuracy: acc,
        request_accuracy: req,
        dialogues,
        slots,
        turn_breakdown,
    })
}
