use std::collections::BTreeSet;

use super::{MetricsError, Ontology, Scope, TurnRecord};

fn non_empty(turns: &[TurnRecord]) -> Result<(), MetricsError> {
    if turns.is_empty() {
        Err(MetricsError::EmptyEvaluation)
    } else {
        Ok(())
    }
}

/// Fraction of turns whose predicted informable state equals the gold one.
pub fn joint_goal_accuracy(turns: &[TurnRecord]) -> Result<f64, MetricsError> {
    non_empty(turns)?;
    let hits = turns
        .iter()
        .filter(|t| t.predicted.informable == t.gold.informable)
        .count();
    Ok(hits as f64 / turns.len() as f64)
}

/// Set F1 between predicted and gold (slot, value) pairs for one turn.
/// Both empty scores 1, exactly one empty scores 0.
pub fn turn_f1(turn: &TurnRecord) -> f64 {
    let pred = &turn.predicted.informable;
    let gold = &turn.gold.informable;
    match (pred.is_empty(), gold.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let common = pred
        .iter()
        .filter(|(slot, value)| gold.get(*slot) == Some(*value))
        .count() as f64;
    let precision = common / pred.len() as f64;
    let recall = common / gold.len() as f64;
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Unweighted mean of per-turn F1.
pub fn slot_f1(turns: &[TurnRecord]) -> Result<f64, MetricsError> {
    non_empty(turns)?;
    let total: f64 = turns.iter().map(turn_f1).sum();
    Ok(total / turns.len() as f64)
}

/// Correct slot decisions in one turn under `scope`.
///
/// A slot is correct when the predicted value (or absence) equals the gold
/// one. Slots outside the ontology on which the two sides disagree count as
/// errors against the turn, which can only lower the count.
pub(crate) fn correct_slots(turn: &TurnRecord, ontology: &Ontology, scope: Scope) -> usize {
    let pred = &turn.predicted;
    let gold = &turn.gold;
    let mut correct = ontology
        .informable
        .keys()
        .filter(|s| pred.informable.get(*s) == gold.informable.get(*s))
        .count();
    let mut outside: usize = pred
        .informable
        .keys()
        .chain(gold.informable.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|s| !ontology.informable.contains_key(*s))
        .filter(|s| pred.informable.get(*s) != gold.informable.get(*s))
        .count();
    if scope == Scope::FullUniverse {
        correct += ontology
            .requestable
            .iter()
            .filter(|r| pred.requested.contains(*r) == gold.requested.contains(*r))
            .count();
        correct += ontology.scope_size(scope)
            - ontology.informable.len()
            - ontology.requestable.len();
        outside += pred
            .requested
            .symmetric_difference(&gold.requested)
            .filter(|r| !ontology.requestable.contains(*r))
            .count();
    }
    correct.saturating_sub(outside)
}

/// Correct slot decisions over `turns × scope size`.
pub fn slot_accuracy(
    turns: &[TurnRecord],
    ontology: &Ontology,
    scope: Scope,
    strict: bool,
) -> Result<f64, MetricsError> {
    non_empty(turns)?;
    if strict {
        for t in turns {
            ontology.check(&t.gold)?;
            ontology.check(&t.predicted)?;
        }
    }
    let per_turn = ontology.scope_size(scope);
    if per_turn == 0 {
        return Err(MetricsError::EmptyEvaluation);
    }
    let correct: usize = turns
        .iter()
        .map(|t| correct_slots(t, ontology, scope))
        .sum();
    Ok(correct as f64 / (turns.len() * per_turn) as f64)
}

/// Fraction of turns whose requested-slot set matches exactly.
pub fn request_accuracy(turns: &[TurnRecord]) -> Result<f64, MetricsError> {
    non_empty(turns)?;
    let hits = turns
        .iter()
        .filter(|t| t.predicted.requested == t.gold.requested)
        .count();
    Ok(hits as f64 / turns.len() as f64)
}
