use std::fmt;

use super::{mask_count, MaskedExample, Task, MASK};

/// One broken invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoMasks,
    TargetCountMismatch { positions: usize, targets: usize },
    PositionsNotIncreasing,
    PositionOutOfRange(usize),
    NotMasked(usize),
    EmptyToken(usize),
    WhitespaceInToken(usize),
    SpansNotTiling,
    TokenLanguageMismatch(usize),
    BoundariesInvalid,
    OrdinalMismatch(usize),
    SpanCount { expected: usize, found: usize },
    RmMaskOutsideReply,
    RmReplyNotFullyMasked,
    ReplyLanguageNotDistinct,
    TlmUnbalanced,
    SentenceVariantK(usize),
    MaskCountLaw { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoMasks => write!(f, "no mask positions"),
            Violation::TargetCountMismatch { positions, targets } => {
                write!(f, "{positions} mask positions but {targets} targets")
            }
            Violation::PositionsNotIncreasing => write!(f, "positions not increasing"),
            Violation::PositionOutOfRange(p) => write!(f, "mask position {p} out of range"),
            Violation::NotMasked(p) => write!(f, "token at mask position {p} is not {MASK}"),
            Violation::EmptyToken(i) => write!(f, "token {i} is empty"),
            Violation::WhitespaceInToken(i) => write!(f, "token {i} contains whitespace"),
            Violation::SpansNotTiling => write!(f, "language spans do not tile the tokens"),
            Violation::TokenLanguageMismatch(i) => {
                write!(f, "token {i} language differs from its span")
            }
            Violation::BoundariesInvalid => write!(f, "utterance boundaries invalid"),
            Violation::OrdinalMismatch(i) => {
                write!(f, "token {i} utterance ordinal disagrees with boundaries")
            }
            Violation::SpanCount { expected, found } => {
                write!(f, "expected {expected} language spans, found {found}")
            }
            Violation::RmMaskOutsideReply => write!(f, "RM mask outside reply"),
            Violation::RmReplyNotFullyMasked => write!(f, "RM reply not fully masked"),
            Violation::ReplyLanguageNotDistinct => {
                write!(f, "reply language matches the context language")
            }
            Violation::TlmUnbalanced => {
                write!(f, "TLM sides carry different utterance counts")
            }
            Violation::SentenceVariantK(k) => write!(f, "utterance-level example has k={k}"),
            Violation::MaskCountLaw { expected, found } => {
                write!(f, "expected {expected} masks, found {found}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidationOptions {
    /// Also check `|mask_positions| == max(1, floor(rate × tokens))` for
    /// every task except RM.
    pub mask_rate: Option<f64>,
    /// Accept masked positions that do not hold the sentinel (80/10/10 mix).
    pub allow_corruption: bool,
}

pub fn validate_example(ex: &MaskedExample) -> Verdict {
    validate_example_with(ex, ValidationOptions::default())
}

/// Checks every structural invariant and collects all violations.
pub fn validate_example_with(ex: &MaskedExample, opts: ValidationOptions) -> Verdict {
    let mut v = Vec::new();
    let n = ex.tokens.len();

    if ex.mask_positions.is_empty() {
        v.push(Violation::NoMasks);
    }
    if ex.mask_positions.len() != ex.targets.len() {
        v.push(Violation::TargetCountMismatch {
            positions: ex.mask_positions.len(),
            targets: ex.targets.len(),
        });
    }
    if ex.mask_positions.windows(2).any(|w| w[0] >= w[1]) {
        v.push(Violation::PositionsNotIncreasing);
    }
    for &p in &ex.mask_positions {
        if p >= n {
            v.push(Violation::PositionOutOfRange(p));
        } else if !opts.allow_corruption && ex.tokens[p].surface != MASK {
            v.push(Violation::NotMasked(p));
        }
    }
    for (i, t) in ex.tokens.iter().enumerate() {
        if t.surface.is_empty() {
            v.push(Violation::EmptyToken(i));
        } else if t.surface.chars().any(char::is_whitespace) {
            v.push(Violation::WhitespaceInToken(i));
        }
    }
    for (i, tgt) in ex.targets.iter().enumerate() {
        if tgt.is_empty() || tgt.chars().any(char::is_whitespace) {
            let at = ex.mask_positions.get(i).copied().unwrap_or(i);
            v.push(Violation::EmptyToken(at));
        }
    }

    // spans tile [0, n)
    let mut at = 0;
    let mut tiles = true;
    for span in &ex.language_spans {
        if span.start != at || span.end <= span.start {
            tiles = false;
        }
        at = span.end;
    }
    if at != n || (n > 0 && ex.language_spans.is_empty()) {
        tiles = false;
    }
    if !tiles {
        v.push(Violation::SpansNotTiling);
    } else {
        for span in &ex.language_spans {
            for i in span.start..span.end {
                if ex.tokens[i].language != span.language {
                    v.push(Violation::TokenLanguageMismatch(i));
                }
            }
        }
    }

    let b = &ex.utterance_boundaries;
    let boundaries_ok = b.first() == Some(&0)
        && b.windows(2).all(|w| w[0] < w[1])
        && b.last().is_some_and(|&l| l < n);
    if !boundaries_ok {
        v.push(Violation::BoundariesInvalid);
    } else {
        for (o, _) in b.iter().enumerate() {
            let r = ex.utterance_range(o).unwrap();
            for i in r {
                if ex.tokens[i].utterance_ordinal != o {
                    v.push(Violation::OrdinalMismatch(i));
                }
            }
        }
    }

    let expected_spans = ex.task.span_count();
    if ex.language_spans.len() != expected_spans {
        v.push(Violation::SpanCount {
            expected: expected_spans,
            found: ex.language_spans.len(),
        });
    }

    match ex.task {
        Task::Xdm | Task::Rm if boundaries_ok => {
            let reply = ex.utterance_range(b.len() - 1).unwrap();
            let reply_lang = &ex.tokens[reply.start].language;
            if ex.tokens[..reply.start]
                .iter()
                .any(|t| &t.language == reply_lang)
            {
                v.push(Violation::ReplyLanguageNotDistinct);
            }
            if ex.task == Task::Rm {
                if ex.mask_positions.iter().any(|p| !reply.contains(p)) {
                    v.push(Violation::RmMaskOutsideReply);
                }
                if ex.mask_positions.len() != reply.len()
                    || reply.clone().any(|p| !ex.mask_positions.contains(&p))
                {
                    v.push(Violation::RmReplyNotFullyMasked);
                }
            }
        }
        Task::Tlm | Task::TlmSent if boundaries_ok && ex.language_spans.len() == 2 => {
            let split = ex.language_spans[1].start;
            let first = b.iter().filter(|&&s| s < split).count();
            if first * 2 != b.len() || !b.contains(&split) {
                v.push(Violation::TlmUnbalanced);
            }
        }
        _ => {}
    }
    if matches!(ex.task, Task::MonoDmSent | Task::TlmSent | Task::Tapt) && ex.provenance.k != 1 {
        v.push(Violation::SentenceVariantK(ex.provenance.k));
    }

    if let Some(rate) = opts.mask_rate {
        if ex.task != Task::Rm {
            let expected = mask_count(n, rate);
            if expected != ex.mask_positions.len() {
                v.push(Violation::MaskCountLaw {
                    expected,
                    found: ex.mask_positions.len(),
                });
            }
        }
    }

    Verdict { violations: v }
}
