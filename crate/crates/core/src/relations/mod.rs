//! The ten metamorphic relations: follow-up construction and checking.
//!
//! Relations fall in three groups. Addition relations (1 to 4) insert a unit
//! into a host; entities of the host that start at or after the insertion
//! boundary move right by the inserted length plus separator, and entities of
//! the inserted unit move to the insertion offset. Deletion relations (5 to 8)
//! remove a contiguous region; entities after it move left by its length and
//! entities that overlap it disappear. Shuffling relations (9 and 10) permute
//! units; only the term multiset is preserved.

mod assemble;
mod check;
mod generate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recognizer::Entity;
use crate::textmodel::{Span, TextUnit};

pub use assemble::{addition_pair, deletion_pair, reconstruct, shuffle_pair};
pub use check::{check, expected_entities, validate_pair};
pub use generate::{derive_seed, gen_pair, gen_pair_with, GenOptions, DEFAULT_LIST_LEN, MAX_ATTEMPTS};

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("corpus too small for MR{mr}: {reason}")]
    CorpusTooSmall { mr: MrId, reason: String },
    #[error("MR{mr}: no seam-free pair after {attempts} attempts")]
    SeamUnresolvable { mr: MrId, attempts: usize },
    #[error("inconsistent transform metadata: {0}")]
    InconsistentMeta(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Addition,
    Deletion,
    Shuffling,
}

/// Relation number, 1 through 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct MrId(u8);

impl MrId {
    pub fn new(value: u8) -> Option<Self> {
        (1..=10).contains(&value).then_some(Self(value))
    }

    pub fn all() -> impl Iterator<Item = MrId> {
        (1..=10).map(MrId)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn category(self) -> Category {
        match self.0 {
            1..=4 => Category::Addition,
            5..=8 => Category::Deletion,
            _ => Category::Shuffling,
        }
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            1 => "add sentence to sentence",
            2 => "add sentence to paragraph",
            3 => "add paragraph to article",
            4 => "add word list to word list",
            5 => "remove words from sentence",
            6 => "remove sentence from paragraph",
            7 => "remove paragraph from article",
            8 => "remove second half of word list",
            9 => "shuffle paragraphs of article",
            _ => "shuffle word list",
        }
    }
}

impl TryFrom<u8> for MrId {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        MrId::new(value).ok_or_else(|| format!("MR id must be 1..=10, got {value}"))
    }
}

impl From<MrId> for u8 {
    fn from(id: MrId) -> u8 {
        id.0
    }
}

impl fmt::Display for MrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for MrId {
    type Err = String;

    /// Accepts `3` or `MR3` (any case).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix("MR").or_else(|| s.strip_prefix("mr")).unwrap_or(s);
        let value: u8 = digits.parse().map_err(|_| format!("invalid MR id {s:?}"))?;
        MrId::try_from(value)
    }
}

/// Where an inserted or removed unit sits relative to its host.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Start,
    Middle,
    End,
}

/// Bookkeeping needed to evaluate a relation exactly.
///
/// Offsets are characters. `boundary` is in host/source coordinates;
/// `inserted_at` is in follow-up coordinates. Source entities starting
/// before `boundary` move by `shift_before`, the rest by `shift_after`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformMeta {
    pub mr: MrId,
    pub placement: Option<Placement>,
    pub boundary: Option<usize>,
    pub inserted_at: Option<usize>,
    pub shift_before: i64,
    pub shift_after: i64,
    /// Removed region in source coordinates, separator included.
    pub removed_span: Option<Span>,
    /// `permutation[k]` is the source index of follow-up unit `k`.
    pub permutation: Option<Vec<usize>>,
    /// Separator added (addition), removed (deletion) or used to rejoin
    /// units (shuffling).
    pub separator: String,
}

/// A source/follow-up test pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestPair {
    pub mr: MrId,
    /// Host first, then the inserted unit for addition relations.
    pub source_texts: Vec<TextUnit>,
    pub followup_text: TextUnit,
    pub meta: TransformMeta,
    pub seed: u64,
}

/// Raw source units drawn for one recipe before assembly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceBundle {
    pub units: std::collections::BTreeMap<&'static str, TextUnit>,
    /// Unit index `i` for positional recipes (sentence, word or paragraph).
    pub index: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Multiset equality of `(term, span)` pairs.
    #[default]
    Strict,
    /// Set equality of terms and, separately, of start positions.
    Paper,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(Mode::Strict),
            "paper" => Ok(Mode::Paper),
            _ => Err(format!("unknown mode {s:?}; expected strict or paper")),
        }
    }
}

/// What the follow-up extraction should contain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedOutcome {
    pub entities: Vec<Entity>,
    /// Positions are unconstrained; only terms are compared.
    pub terms_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub satisfied: bool,
    pub missing: Vec<Entity>,
    pub extra: Vec<Entity>,
    pub mode: Mode,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories() {
        let cats: Vec<_> = MrId::all().map(MrId::category).collect();
        assert_eq!(cats[..4], [Category::Addition; 4]);
        assert_eq!(cats[4..8], [Category::Deletion; 4]);
        assert_eq!(cats[8..], [Category::Shuffling; 2]);
        assert!(MrId::new(0).is_none());
        assert!(MrId::new(11).is_none());
    }

    #[test]
    fn parse_ids() {
        assert_eq!("MR3".parse::<MrId>().unwrap().value(), 3);
        assert_eq!("10".parse::<MrId>().unwrap().value(), 10);
        assert!("MR11".parse::<MrId>().is_err());
        assert!(serde_json::from_str::<MrId>("12").is_err());
        assert_eq!(serde_json::to_string(&MrId::new(7).unwrap()).unwrap(), "7");
    }
}
