use super::gazetteer::{Gazetteer, Pattern};
use super::mutants::{on, Mutant};
use super::tokenizer::{scan, TokenClass, Tokenization};
use super::{Entity, ExtractionResult, MutantRuntimeFault, StepBudget};
use crate::textmodel::{char_length, Span};

fn whitespace_width(ws: &str) -> i64 {
    char_length(ws) as i64
}

fn token_width(text: &str, mutant: Option<Mutant>) -> i64 {
    if on(mutant, Mutant::TokenWidthOne) {
        return 1;
    }
    char_length(text) as i64
}

fn gap_matches(gap: &str, expected: &str, mutant: Option<Mutant>) -> bool {
    if on(mutant, Mutant::GapMatchesTrue) {
        return true;
    }
    let same = gap == expected;
    same != on(mutant, Mutant::GapCompare)
}

fn advance(i: usize, flipped: bool) -> Result<usize, MutantRuntimeFault> {
    if flipped {
        i.checked_sub(1)
            .ok_or_else(|| MutantRuntimeFault::panic("token index decremented below zero"))
    } else {
        Ok(i + 1)
    }
}

/// Character offsets of every token, rebuilt by summing whitespace and
/// token widths from the start of the input.
fn offsets(tz: &Tokenization, mutant: Option<Mutant>) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(tz.tokens.len());
    let mut pos: i64 = 0;
    for (tok, ws) in tz.tokens.iter().zip(&tz.whitespace) {
        let ws = whitespace_width(ws);
        pos = if on(mutant, Mutant::WhitespaceAccumulate) {
            pos - ws
        } else {
            pos + ws
        };
        let start = pos;
        let width = token_width(&tok.text, mutant);
        pos = if on(mutant, Mutant::TokenAccumulate) {
            pos - width
        } else {
            pos + width
        };
        out.push((start, pos));
    }
    out
}

fn to_span(start: i64, end: i64) -> Result<Span, MutantRuntimeFault> {
    let bad = || MutantRuntimeFault::panic(format!("invalid entity offsets {start}..{end}"));
    let s = usize::try_from(start).map_err(|_| bad())?;
    let e = usize::try_from(end).map_err(|_| bad())?;
    Span::try_new(s, e).ok_or_else(bad)
}

fn matches_at(
    pattern: &Pattern,
    gazetteer: &Gazetteer,
    tz: &Tokenization,
    t: usize,
    mutant: Option<Mutant>,
) -> Result<bool, MutantRuntimeFault> {
    // token 0 already matched through the index lookup
    let mut j = 1;
    while j < pattern.len() {
        let (Some(tok), Some(gap)) = (tz.tokens.get(t + j), tz.whitespace.get(t + j)) else {
            return Ok(false);
        };
        let expected_gap = j
            .checked_sub(1)
            .and_then(|g| pattern.gaps.get(g))
            .ok_or_else(|| MutantRuntimeFault::panic(format!("pattern gap index {j} - 1 out of range")))?;
        if !gap_matches(gap, expected_gap, mutant) {
            return Ok(false);
        }
        let same = gazetteer.fold_key(&tok.text, mutant) == pattern.tokens[j];
        if same == on(mutant, Mutant::PatternTokenCompare) {
            return Ok(false);
        }
        j = advance(j, on(mutant, Mutant::PatternLoopAdvance))?;
    }
    Ok(true)
}

/// Token count of the longest gazetteer term starting at token `t`.
fn longest_match(
    gazetteer: &Gazetteer,
    tz: &Tokenization,
    t: usize,
    remaining: usize,
    mutant: Option<Mutant>,
) -> Result<Option<usize>, MutantRuntimeFault> {
    let key = gazetteer.fold_key(&tz.tokens[t].text, mutant);
    let mut best = 0;
    for pattern in gazetteer.candidates(&key) {
        let len = pattern.len();
        let fits = if on(mutant, Mutant::FitBound) {
            len < remaining
        } else {
            len <= remaining
        };
        if !fits || !matches_at(pattern, gazetteer, tz, t, mutant)? {
            continue;
        }
        let better = if on(mutant, Mutant::LongestTieBreak) {
            len >= best
        } else {
            len > best
        };
        if better {
            best = len;
        }
    }
    Ok((best > 0).then_some(best))
}

fn term_text(tz: &Tokenization, t: usize, len: usize) -> String {
    let mut term = tz.tokens[t].text.clone();
    for k in t + 1..t + len {
        term.push_str(&tz.whitespace[k]);
        term.push_str(&tz.tokens[k].text);
    }
    term
}

/// Left-to-right longest-match chunking of `text` against `gazetteer`.
pub fn extract(
    text: &str,
    gazetteer: &Gazetteer,
    mutant: Option<Mutant>,
) -> Result<ExtractionResult, MutantRuntimeFault> {
    let input_length = char_length(text);
    let tz = scan(text, mutant)?;
    let n = tz.tokens.len();
    let offsets = offsets(&tz, mutant);
    let mut budget = StepBudget::for_length(input_length);
    let mut entities = Vec::new();
    let mut t = 0;
    loop {
        let more = if on(mutant, Mutant::ChunkScanBound) {
            t <= n
        } else {
            t < n
        };
        if !more {
            break;
        }
        budget.tick()?;
        let tok = tz
            .tokens
            .get(t)
            .ok_or_else(|| MutantRuntimeFault::panic(format!("token index {t} out of bounds for {n}")))?;
        let is_word = tok.class == TokenClass::Word;
        if is_word == on(mutant, Mutant::WordStartTest) {
            t = advance(t, on(mutant, Mutant::NonWordSkip))?;
            continue;
        }
        let remaining = if on(mutant, Mutant::RemainingWindow) {
            n + t
        } else {
            n - t
        };
        match longest_match(gazetteer, &tz, t, remaining, mutant)? {
            Some(len) => {
                let (start, _) = offsets[t];
                let (_, last_end) = offsets[t + len - 1];
                let matched = if on(mutant, Mutant::MatchedLength) {
                    last_end + start
                } else {
                    last_end - start
                };
                entities.push(Entity {
                    term: term_text(&tz, t, len),
                    span: to_span(start, start + matched)?,
                });
                t += len;
            }
            None => t = advance(t, on(mutant, Mutant::NoMatchAdvance))?,
        }
    }
    if on(mutant, Mutant::EmptyResult) {
        entities.clear();
    }
    Ok(ExtractionResult { entities, input_length })
}
