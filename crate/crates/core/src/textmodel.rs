//! Text units, character spans, and segmentation.
//!
//! All offsets in this crate count Unicode scalar values, never bytes. A
//! [`Span`] is half-open: `[start, end)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Separator placed between paragraphs of a canonical article.
pub const PARAGRAPH_SEPARATOR: &str = "\n\n";
/// Separator placed between joined sentences.
pub const SENTENCE_SEPARATOR: &str = " ";
/// Separator placed between entries of a word list.
pub const WORD_SEPARATOR: &str = "\n";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("article contains no paragraphs")]
    EmptyArticle,
    #[error("paragraph contains no sentences")]
    EmptyParagraph,
    #[error("expected a {expected:?} unit, found {found:?}")]
    WrongKind { expected: UnitKind, found: UnitKind },
    #[error("word list entry {0:?} is empty or contains whitespace")]
    InvalidWord(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Article,
    Paragraph,
    Sentence,
    WordList,
}

/// A piece of text tagged with the granularity it represents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextUnit {
    pub kind: UnitKind,
    pub text: String,
}

impl TextUnit {
    /// Wraps `text` without normalization.
    pub fn new(kind: UnitKind, text: impl Into<String>) -> Self {
        Self {
            kind,
            text: text.into(),
        }
    }

    pub fn sentence(text: impl Into<String>) -> Self {
        Self::new(UnitKind::Sentence, text)
    }

    pub fn paragraph(text: impl Into<String>) -> Self {
        Self::new(UnitKind::Paragraph, text)
    }

    pub fn article(text: impl Into<String>) -> Self {
        Self::new(UnitKind::Article, text)
    }

    /// Builds a canonical article: line endings normalized to `\n`, each
    /// paragraph trimmed, paragraphs joined by exactly one blank line.
    pub fn canonical_article(raw: &str) -> Result<Self, TextError> {
        let normalized = normalize_newlines(raw);
        let paragraphs = split_paragraphs_raw(&normalized)?;
        let joined = paragraphs
            .iter()
            .map(|(p, _)| p.text.as_str())
            .collect::<Vec<_>>()
            .join(PARAGRAPH_SEPARATOR);
        Ok(Self::article(joined))
    }

    /// Joins words with a single newline, no trailing newline.
    pub fn word_list<S: AsRef<str>>(words: &[S]) -> Result<Self, TextError> {
        for w in words {
            let w = w.as_ref();
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(TextError::InvalidWord(w.to_string()));
            }
        }
        let text = words.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(WORD_SEPARATOR);
        Ok(Self::new(UnitKind::WordList, text))
    }

    pub fn char_length(&self) -> usize {
        char_length(&self.text)
    }

    fn expect_kind(&self, expected: UnitKind) -> Result<(), TextError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(TextError::WrongKind {
                expected,
                found: self.kind,
            })
        }
    }
}

/// Half-open character interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    /// Panics if `start >= end`; use [`Span::try_new`] for untrusted bounds.
    pub fn new(start: usize, end: usize) -> Self {
        Self::try_new(start, end).unwrap_or_else(|| panic!("invalid span [{start}, {end})"))
    }

    pub fn try_new(start: usize, end: usize) -> Option<Self> {
        (start < end).then_some(Self { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Moves both ends by `delta`; `None` if the result leaves `usize`.
    pub fn shifted(&self, delta: i64) -> Option<Span> {
        let start = shift_offset(self.start, delta)?;
        let end = shift_offset(self.end, delta)?;
        Span::try_new(start, end)
    }

    pub fn slice<'a>(&self, text: &'a str) -> Option<&'a str> {
        slice_chars(text, self.start, self.end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

pub(crate) fn shift_offset(offset: usize, delta: i64) -> Option<usize> {
    let shifted = i64::try_from(offset).ok()?.checked_add(delta)?;
    usize::try_from(shifted).ok()
}

/// Number of Unicode scalar values in `text`.
pub fn char_length(text: &str) -> usize {
    text.chars().count()
}

/// Substring by character offsets `[start, end)`.
pub fn slice_chars(text: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let byte_start = byte_offset(text, start)?;
    let byte_end = byte_offset(text, end)?;
    text.get(byte_start..byte_end)
}

fn byte_offset(text: &str, char_offset: usize) -> Option<usize> {
    if char_offset == 0 {
        return Some(0);
    }
    match text.char_indices().nth(char_offset) {
        Some((b, _)) => Some(b),
        None if char_length(text) == char_offset => Some(text.len()),
        None => None,
    }
}

/// Replaces `\r\n` and lone `\r` with `\n`.
pub fn normalize_newlines(text: &str) -> String {
    text.replace("\r\n", "\n").replace('\r', "\n")
}

/// Paragraphs of an article with their spans in the article text.
///
/// Paragraphs are separated by one or more blank lines (lines holding only
/// whitespace). Each span is trimmed to the paragraph's first and last
/// non-whitespace character.
pub fn split_paragraphs(article: &TextUnit) -> Result<Vec<(TextUnit, Span)>, TextError> {
    article.expect_kind(UnitKind::Article)?;
    split_paragraphs_raw(&article.text)
}

fn split_paragraphs_raw(text: &str) -> Result<Vec<(TextUnit, Span)>, TextError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    // (start, end) of the current block of non-blank lines, trimmed
    let mut block: Option<(usize, usize)> = None;
    let mut line_start = 0;
    while line_start <= chars.len() {
        let line_end = chars[line_start..]
            .iter()
            .position(|&c| c == '\n')
            .map_or(chars.len(), |p| line_start + p);
        let line = &chars[line_start..line_end];
        match line.iter().position(|c| !c.is_whitespace()) {
            None => {
                if let Some((s, e)) = block.take() {
                    out.push(paragraph_at(&chars, s, e));
                }
            }
            Some(first) => {
                let last = line.iter().rposition(|c| !c.is_whitespace()).unwrap_or(first);
                let (s, e) = (line_start + first, line_start + last + 1);
                block = Some(match block {
                    Some((bs, _)) => (bs, e),
                    None => (s, e),
                });
            }
        }
        line_start = line_end + 1;
    }
    if let Some((s, e)) = block {
        out.push(paragraph_at(&chars, s, e));
    }
    if out.is_empty() {
        return Err(TextError::EmptyArticle);
    }
    Ok(out)
}

fn paragraph_at(chars: &[char], start: usize, end: usize) -> (TextUnit, Span) {
    let text: String = chars[start..end].iter().collect();
    (TextUnit::paragraph(text), Span::new(start, end))
}

/// Sentences of a paragraph with their spans in the paragraph text.
///
/// A sentence ends at `.`, `?` or `!` when it is followed by the end of the
/// text (possibly after whitespace) or by whitespace and then an uppercase
/// letter. Abbreviations such as "Dr. Smith" are split; this is accepted as
/// long as segmentation is deterministic.
pub fn split_sentences(paragraph: &TextUnit) -> Result<Vec<(TextUnit, Span)>, TextError> {
    paragraph.expect_kind(UnitKind::Paragraph)?;
    let chars: Vec<char> = paragraph.text.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    let mut seg_start = skip_whitespace(&chars, 0);
    let mut k = seg_start;
    while k < n {
        if matches!(chars[k], '.' | '?' | '!') && is_sentence_end(&chars, k) {
            push_sentence(&chars, seg_start, k + 1, &mut out);
            seg_start = skip_whitespace(&chars, k + 1);
            k = seg_start;
        } else {
            k += 1;
        }
    }
    if seg_start < n {
        push_sentence(&chars, seg_start, n, &mut out);
    }
    if out.is_empty() {
        return Err(TextError::EmptyParagraph);
    }
    Ok(out)
}

fn is_sentence_end(chars: &[char], punct: usize) -> bool {
    let next = punct + 1;
    if next == chars.len() {
        return true;
    }
    if !chars[next].is_whitespace() {
        return false;
    }
    let after = skip_whitespace(chars, next);
    after == chars.len() || chars[after].is_uppercase()
}

fn skip_whitespace(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    i
}

fn push_sentence(chars: &[char], start: usize, end: usize, out: &mut Vec<(TextUnit, Span)>) {
    let mut end = end;
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    if end > start {
        let text: String = chars[start..end].iter().collect();
        out.push((TextUnit::sentence(text), Span::new(start, end)));
    }
}

/// Whitespace-delimited words of `text` with their spans.
pub fn split_words(text: &str) -> Vec<(String, Span)> {
    let mut out = Vec::new();
    let mut current: Option<(usize, String)> = None;
    let mut count = 0;
    for (i, c) in text.chars().enumerate() {
        count = i + 1;
        if c.is_whitespace() {
            if let Some((s, w)) = current.take() {
                out.push((w, Span::new(s, i)));
            }
        } else {
            current.get_or_insert_with(|| (i, String::new())).1.push(c);
        }
    }
    if let Some((s, w)) = current {
        out.push((w, Span::new(s, count)));
    }
    out
}
