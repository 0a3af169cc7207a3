use serde::{Deserialize, Serialize};

use super::mutants::{on, Mutant};
use super::{MutantRuntimeFault as Fault, StepBudget};
use crate::textmodel::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenClass {
    /// Maximal run of letters or digits.
    Word,
    /// A single character that is neither alphanumeric nor whitespace.
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub span: Span,
    pub class: TokenClass,
}

/// Tokens plus the whitespace around them.
///
/// `whitespace[k]` is the text between `tokens[k - 1]` (or the start of the
/// input) and `tokens[k]`; the final entry is the trailing whitespace, so
/// `whitespace.len() == tokens.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tokenization {
    pub tokens: Vec<Token>,
    pub whitespace: Vec<String>,
}

pub(crate) fn is_word_char(c: char, mutant: Option<Mutant>) -> bool {
    if on(mutant, Mutant::WordCharTrue) {
        return true;
    }
    let ascii = if on(mutant, Mutant::AsciiFastPath) {
        (c as u32) <= 0x80
    } else {
        (c as u32) < 0x80
    };
    if ascii {
        c.is_ascii_alphanumeric()
    } else {
        c.is_alphanumeric()
    }
}

fn char_at(chars: &[char], i: usize) -> Result<char, Fault> {
    chars
        .get(i)
        .copied()
        .ok_or_else(|| Fault::panic(format!("index {i} out of bounds for length {}", chars.len())))
}

fn collect(chars: &[char], start: usize, end: usize) -> Result<String, Fault> {
    chars
        .get(start..end)
        .map(|s| s.iter().collect())
        .ok_or_else(|| Fault::panic(format!("range {start}..{end} out of bounds")))
}

/// Moves an index forward by one, or backward when `flipped`.
fn advance(i: usize, flipped: bool) -> Result<usize, Fault> {
    if flipped {
        i.checked_sub(1)
            .ok_or_else(|| Fault::panic("index decremented below zero"))
    } else {
        Ok(i + 1)
    }
}

/// Splits `text` into word and punctuation tokens, keeping the whitespace
/// between them.
pub fn scan(text: &str, mutant: Option<Mutant>) -> Result<Tokenization, Fault> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut budget = StepBudget::for_length(n);
    let mut tokens = Vec::new();
    let mut whitespace = Vec::new();
    let mut prev_end = 0;
    let mut i = 0;

    let in_bounds = |i: usize| {
        if on(mutant, Mutant::MainScanBound) {
            i <= n
        } else {
            i < n
        }
    };
    while in_bounds(i) {
        budget.tick()?;
        let c = char_at(&chars, i)?;
        let space = c.is_whitespace();
        if space != on(mutant, Mutant::DispatchWhitespace) {
            i = advance(i, on(mutant, Mutant::WhitespaceAdvance))?;
            continue;
        }

        let start = i;
        let has_gap = if on(mutant, Mutant::GapCaptureBound) {
            start >= prev_end
        } else {
            start > prev_end
        };
        let gap = if has_gap != on(mutant, Mutant::GapCapture) {
            collect(&chars, prev_end, start)?
        } else {
            String::new()
        };

        if is_word_char(c, mutant) {
            let mut end = start + 1;
            loop {
                let more = if on(mutant, Mutant::WordScanBound) {
                    end <= n
                } else {
                    end < n
                };
                if !(more && is_word_char(char_at(&chars, end)?, mutant)) {
                    break;
                }
                budget.tick()?;
                end = advance(end, on(mutant, Mutant::WordScanAdvance))?;
            }
            let span =
                Span::try_new(start, end).ok_or_else(|| Fault::panic(format!("empty token at {start}..{end}")))?;
            tokens.push(Token {
                text: collect(&chars, start, end)?,
                span,
                class: TokenClass::Word,
            });
            whitespace.push(gap);
            i = end;
        } else {
            tokens.push(Token {
                text: c.to_string(),
                span: Span::new(start, start + 1),
                class: TokenClass::Punct,
            });
            whitespace.push(gap);
            i = advance(i, on(mutant, Mutant::PunctAdvance))?;
        }
        prev_end = i.max(prev_end);
    }
    whitespace.push(collect(&chars, prev_end.min(n), n)?);
    Ok(Tokenization { tokens, whitespace })
}

/// Tokens of `text`; whitespace yields no token.
pub fn tokenize(text: &str, mutant: Option<Mutant>) -> Result<Vec<Token>, Fault> {
    scan(text, mutant).map(|t| t.tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recognizer::FaultKind;

    fn words(text: &str) -> Vec<(String, usize, usize, TokenClass)> {
        tokenize(text, None)
            .unwrap()
            .into_iter()
            .map(|t| (t.text, t.span.start, t.span.end, t.class))
            .collect()
    }

    /// Character-class oracle: classify each char, then merge adjacent
    /// alphanumerics.
    fn oracle(text: &str) -> Vec<(String, usize, usize, TokenClass)> {
        let mut out: Vec<(String, usize, usize, TokenClass)> = Vec::new();
        for (i, c) in text.chars().enumerate() {
            if c.is_whitespace() {
                continue;
            }
            if c.is_alphanumeric() {
                if let Some(last) = out.last_mut() {
                    if last.3 == TokenClass::Word && last.2 == i {
                        last.0.push(c);
                        last.2 = i + 1;
                        continue;
                    }
                }
                out.push((c.to_string(), i, i + 1, TokenClass::Word));
            } else {
                out.push((c.to_string(), i, i + 1, TokenClass::Punct));
            }
        }
        out
    }

    #[test]
    fn neuritin_span() {
        assert_eq!(
            words("Neuritin plays"),
            vec![
                ("Neuritin".into(), 0, 8, TokenClass::Word),
                ("plays".into(), 9, 14, TokenClass::Word),
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("", None).unwrap().is_empty());
    }

    #[test]
    fn hyphenated_name() {
        let expected = vec![
            ("IL".into(), 0, 2, TokenClass::Word),
            ("-".into(), 2, 3, TokenClass::Punct),
            ("2".into(), 3, 4, TokenClass::Word),
        ];
        assert_eq!(oracle("IL-2"), expected);
        assert_eq!(words("IL-2"), expected);
    }

    #[test]
    fn whitespace_is_kept_between_tokens() {
        let t = scan(" a  b\n", None).unwrap();
        assert_eq!(t.whitespace, vec![" ", "  ", "\n"]);
        assert_eq!(t.tokens.len() + 1, t.whitespace.len());
    }

    #[test]
    fn step_cap_reports_loop() {
        let err = tokenize("word, word, word", Some(Mutant::PunctAdvance)).unwrap_err();
        assert_eq!(err.kind, FaultKind::Loop);
    }

    #[test]
    fn out_of_bounds_reports_panic() {
        let err = tokenize("ends in word", Some(Mutant::WordScanBound)).unwrap_err();
        assert_eq!(err.kind, FaultKind::Panic);
        // Text ending in punctuation never reads past the end in the word loop.
        assert!(tokenize("ends in word.", Some(Mutant::WordScanBound)).is_ok());
    }

    #[test]
    fn negated_whitespace_dispatch_changes_tokens() {
        let t = tokenize("a b", Some(Mutant::DispatchWhitespace)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].class, TokenClass::Punct);
    }

    proptest::proptest! {
        #[test]
        fn matches_oracle(text in "[a-zA-Z0-9αβ .,;()\\-\n\t]{0,40}") {
            proptest::prop_assert_eq!(words(&text), oracle(&text));
        }

        #[test]
        fn whitespace_reassembles_input(text in "[a-z0-9 .\n-]{0,40}") {
            let t = scan(&text, None).unwrap();
            let mut rebuilt = String::new();
            for (ws, tok) in t.whitespace.iter().zip(&t.tokens) {
                rebuilt.push_str(ws);
                rebuilt.push_str(&tok.text);
            }
            rebuilt.push_str(t.whitespace.last().unwrap());
            proptest::prop_assert_eq!(rebuilt, text);
        }
    }
}
