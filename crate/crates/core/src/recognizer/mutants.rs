//! Compiled-in fault variants of the recognizer.
//!
//! Each [`Mutant`] changes exactly one operator or return value at one code
//! site in the tokenizer or chunker. The variant is passed per call, so
//! concurrent runs over different mutants never share state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Mutation operator classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// `<`, `<=`, `>`, `>=` replaced by the boundary alternative.
    ConditionalBoundary,
    /// `++` and `--` swapped.
    Increment,
    /// Arithmetic operator replaced (`+` with `-`, and so on).
    Math,
    /// A condition replaced by its negation.
    NegateConditional,
    /// A returned value replaced by a constant.
    ReturnValue,
}

impl Operator {
    pub const ALL: [Operator; 5] = [
        Operator::ConditionalBoundary,
        Operator::Increment,
        Operator::Math,
        Operator::NegateConditional,
        Operator::ReturnValue,
    ];
}

/// Part of the recognizer a mutant lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Tokenizer,
    Chunker,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantDescriptor {
    pub id: String,
    pub operator: Operator,
    pub component: Component,
    pub site: String,
    pub description: String,
}

macro_rules! catalog {
    ($( $variant:ident => ($id:literal, $op:ident, $comp:ident, $site:literal, $desc:literal) ),+ $(,)?) => {
        /// One seeded fault.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Mutant {
            $( $variant ),+
        }

        impl Mutant {
            pub const ALL: &'static [Mutant] = &[ $( Mutant::$variant ),+ ];

            pub fn id(self) -> &'static str {
                match self { $( Mutant::$variant => $id ),+ }
            }

            pub fn operator(self) -> Operator {
                match self { $( Mutant::$variant => Operator::$op ),+ }
            }

            pub fn component(self) -> Component {
                match self { $( Mutant::$variant => Component::$comp ),+ }
            }

            pub fn site(self) -> &'static str {
                match self { $( Mutant::$variant => $site ),+ }
            }

            pub fn description(self) -> &'static str {
                match self { $( Mutant::$variant => $desc ),+ }
            }
        }
    };
}

catalog! {
    WordScanBound => ("M-CB-01", ConditionalBoundary, Tokenizer,
        "tokenizer::scan word loop",
        "token-end check `<` -> `<=`"),
    MainScanBound => ("M-CB-02", ConditionalBoundary, Tokenizer,
        "tokenizer::scan main loop",
        "scan index check `i < n` -> `i <= n`"),
    AsciiFastPath => ("M-CB-03", ConditionalBoundary, Tokenizer,
        "tokenizer::is_word_char",
        "ASCII fast path `< 0x80` -> `<= 0x80`"),
    GapCaptureBound => ("M-CB-04", ConditionalBoundary, Tokenizer,
        "tokenizer::scan whitespace capture",
        "gap test `start > prev_end` -> `start >= prev_end`"),
    FitBound => ("M-CB-05", ConditionalBoundary, Chunker,
        "chunker::longest_match fit check",
        "candidate fit `len <= remaining` -> `len < remaining`"),
    LongestTieBreak => ("M-CB-06", ConditionalBoundary, Chunker,
        "chunker::longest_match best update",
        "longest-match update `len > best` -> `len >= best`"),
    ChunkScanBound => ("M-CB-07", ConditionalBoundary, Chunker,
        "chunker::extract token loop",
        "token index check `t < n` -> `t <= n`"),
    WhitespaceAdvance => ("M-INC-01", Increment, Tokenizer,
        "tokenizer::scan whitespace branch",
        "whitespace advance `i += 1` -> `i -= 1`"),
    PunctAdvance => ("M-INC-02", Increment, Tokenizer,
        "tokenizer::scan punctuation branch",
        "punctuation advance `i += 1` -> `i -= 1`"),
    WordScanAdvance => ("M-INC-03", Increment, Tokenizer,
        "tokenizer::scan word loop",
        "word extension `end += 1` -> `end -= 1`"),
    NonWordSkip => ("M-INC-04", Increment, Chunker,
        "chunker::extract non-word skip",
        "non-word skip `t += 1` -> `t -= 1`"),
    NoMatchAdvance => ("M-INC-05", Increment, Chunker,
        "chunker::extract no-match advance",
        "no-match advance `t += 1` -> `t -= 1`"),
    PatternLoopAdvance => ("M-INC-06", Increment, Chunker,
        "chunker::matches_at token loop",
        "pattern position `j += 1` -> `j -= 1`"),
    WhitespaceAccumulate => ("M-MATH-01", Math, Chunker,
        "chunker::offsets whitespace width",
        "offset accumulation `pos += ws` -> `pos -= ws`"),
    TokenAccumulate => ("M-MATH-02", Math, Chunker,
        "chunker::offsets token width",
        "offset accumulation `pos += tok` -> `pos -= tok`"),
    RemainingWindow => ("M-MATH-03", Math, Chunker,
        "chunker::extract remaining tokens",
        "remaining window `n - t` -> `n + t`"),
    MatchedLength => ("M-MATH-04", Math, Chunker,
        "chunker::extract entity length",
        "matched length `last_end - start` -> `last_end + start`"),
    DispatchWhitespace => ("M-NC-01", NegateConditional, Tokenizer,
        "tokenizer::scan whitespace dispatch",
        "whitespace test negated"),
    GapCapture => ("M-NC-02", NegateConditional, Tokenizer,
        "tokenizer::scan whitespace capture",
        "gap test `start > prev_end` negated"),
    GapCompare => ("M-NC-03", NegateConditional, Chunker,
        "chunker::gap_matches",
        "gap comparison `==` -> `!=`"),
    PatternTokenCompare => ("M-NC-04", NegateConditional, Chunker,
        "chunker::matches_at token comparison",
        "pattern token comparison `==` -> `!=`"),
    WordStartTest => ("M-NC-05", NegateConditional, Chunker,
        "chunker::extract word-start test",
        "word-start class test negated"),
    WordCharTrue => ("M-RV-01", ReturnValue, Tokenizer,
        "tokenizer::is_word_char",
        "return value replaced by `true`"),
    EmptyResult => ("M-RV-02", ReturnValue, Chunker,
        "chunker::extract result",
        "returned entity list replaced by empty list"),
    TokenWidthOne => ("M-RV-03", ReturnValue, Chunker,
        "chunker::token_width",
        "return value replaced by `1`"),
    GapMatchesTrue => ("M-RV-04", ReturnValue, Chunker,
        "chunker::gap_matches",
        "return value replaced by `true`"),
    FoldCaseIdentity => ("M-RV-05", ReturnValue, Chunker,
        "gazetteer::fold_key",
        "case-folded key replaced by the input (case-insensitive mode only)"),
}

impl Mutant {
    pub fn descriptor(self) -> MutantDescriptor {
        MutantDescriptor {
            id: self.id().to_string(),
            operator: self.operator(),
            component: self.component(),
            site: self.site().to_string(),
            description: self.description().to_string(),
        }
    }
}

impl fmt::Display for Mutant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mutant id {0:?}")]
pub struct UnknownMutant(pub String);

impl FromStr for Mutant {
    type Err = UnknownMutant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutant::ALL
            .iter()
            .copied()
            .find(|m| m.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMutant(s.to_string()))
    }
}

/// The full catalog in id order.
pub fn list_mutants() -> Vec<MutantDescriptor> {
    Mutant::ALL.iter().map(|m| m.descriptor()).collect()
}

/// True when `active` is the given variant.
#[inline]
pub(crate) fn on(active: Option<Mutant>, which: Mutant) -> bool {
    active == Some(which)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn catalog_shape() {
        let all = list_mutants();
        assert!(all.len() >= 20);
        let ids: HashSet<_> = all.iter().map(|d| d.id.clone()).collect();
        assert_eq!(ids.len(), all.len());
        for op in Operator::ALL {
            assert!(all.iter().filter(|d| d.operator == op).count() >= 3, "{op:?}");
        }
        for comp in [Component::Tokenizer, Component::Chunker] {
            assert!(all.iter().any(|d| d.component == comp));
        }
    }

    #[test]
    fn token_end_boundary_entry() {
        let m: Mutant = "M-CB-01".parse().unwrap();
        assert_eq!(m.operator(), Operator::ConditionalBoundary);
        assert!(m.description().contains("`<` -> `<=`"));
        assert!("M-XX-99".parse::<Mutant>().is_err());
    }
}
