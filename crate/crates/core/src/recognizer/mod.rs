//! The system under test: a tokenizer and a gazetteer longest-match
//! chunker that report `(term, span)` entities, plus a catalog of seeded
//! faults.

mod chunker;
mod gazetteer;
pub mod mutants;
mod tokenizer;
mod triage;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use chunker::extract;
pub use gazetteer::{Gazetteer, GazetteerError};
pub use mutants::{list_mutants, Component, Mutant, MutantDescriptor, Operator};
pub use tokenizer::{scan, tokenize, Token, TokenClass, Tokenization};
pub use triage::{classify_mutant, default_probes, Classification, Probe};

use crate::textmodel::Span;

/// An extracted term and its half-open character span in the input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entity {
    pub term: String,
    #[serde(flatten)]
    pub span: Span,
}

impl Entity {
    pub fn new(term: impl Into<String>, start: usize, end: usize) -> Self {
        Self {
            term: term.into(),
            span: Span::new(start, end),
        }
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.term, self.span)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub entities: Vec<Entity>,
    pub input_length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaultKind {
    /// The step cap was exceeded.
    Loop,
    /// An out-of-range access or broken internal assertion.
    Panic,
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultKind::Loop => "Loop",
            FaultKind::Panic => "Panic",
        })
    }
}

/// A run that crashed or did not terminate. Only mutants produce these.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct MutantRuntimeFault {
    pub kind: FaultKind,
    pub message: String,
}

impl MutantRuntimeFault {
    pub(crate) fn panic(message: impl Into<String>) -> Self {
        Self {
            kind: FaultKind::Panic,
            message: message.into(),
        }
    }
}

/// Bounds loop iterations at `10 * length + 100`.
pub(crate) struct StepBudget {
    remaining: usize,
    cap: usize,
}

impl StepBudget {
    pub fn for_length(length: usize) -> Self {
        let cap = 10 * length + 100;
        Self { remaining: cap, cap }
    }

    pub fn tick(&mut self) -> Result<(), MutantRuntimeFault> {
        match self.remaining.checked_sub(1) {
            Some(r) => {
                self.remaining = r;
                Ok(())
            }
            None => Err(MutantRuntimeFault {
                kind: FaultKind::Loop,
                message: format!("step cap of {} exceeded", self.cap),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_json_shape() {
        let e = Entity::new("Neuritin", 0, 8);
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"term":"Neuritin","start":0,"end":8}"#
        );
    }

    #[test]
    fn budget_exhausts() {
        let mut b = StepBudget::for_length(0);
        for _ in 0..100 {
            b.tick().unwrap();
        }
        assert_eq!(b.tick().unwrap_err().kind, FaultKind::Loop);
    }
}
