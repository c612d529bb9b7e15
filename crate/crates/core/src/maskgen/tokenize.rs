//! Word segmentation for space-delimited and CJK scripts.

use crate::corpus::Language;

use super::Token;

/// True for codepoints segmented one-per-token: CJK ideographs, kana, CJK
/// punctuation and fullwidth forms.
pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3000..=0x303F     // CJK symbols and punctuation
        | 0x3040..=0x30FF   // hiragana, katakana
        | 0x3400..=0x4DBF   // extension A
        | 0x4E00..=0x9FFF   // unified ideographs
        | 0xF900..=0xFAFF   // compatibility ideographs
        | 0xFF00..=0xFFEF   // halfwidth and fullwidth forms
        | 0x20000..=0x2FA1F // extensions B..F, compatibility supplement
    )
}

fn is_cjk_token(s: &str) -> bool {
    let mut chars = s.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if is_cjk(c))
}

/// Splits `text` into word surfaces, borrowing from the input.
pub fn segment(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut run_start: Option<usize> = None;
        for (i, c) in chunk.char_indices() {
            if is_cjk(c) {
                if let Some(s) = run_start.take() {
                    out.push(&chunk[s..i]);
                }
                out.push(&chunk[i..i + c.len_utf8()]);
            } else if run_start.is_none() {
                run_start = Some(i);
            }
        }
        if let Some(s) = run_start {
            out.push(&chunk[s..]);
        }
    }
    out
}

/// Tokenizes one utterance. Every token gets utterance ordinal 0.
pub fn tokenize(text: &str, language: &Language) -> Vec<Token> {
    segment(text)
        .into_iter()
        .map(|s| Token {
            surface: s.to_string(),
            utterance_ordinal: 0,
            language: language.clone(),
        })
        .collect()
}

/// Joins surfaces with single spaces, except between two CJK tokens.
pub fn detokenize<S: AsRef<str>>(surfaces: &[S]) -> String {
    let mut out = String::new();
    let mut prev_cjk = false;
    for (i, s) in surfaces.iter().enumerate() {
        let s = s.as_ref();
        let cjk = is_cjk_token(s);
        if i > 0 && !(cjk && prev_cjk) {
            out.push(' ');
        }
        out.push_str(s);
        prev_cjk = cjk;
    }
    out
}

/// The canonical form a text takes after a tokenize/detokenize round trip.
pub fn normalize(text: &str) -> String {
    detokenize(&segment(text))
}
