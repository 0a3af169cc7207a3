use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use thiserror::Error;

use super::mutants::{on, Mutant};
use super::tokenizer::{scan, TokenClass};

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("empty gazetteer")]
    Empty,
    #[error("invalid gazetteer term {term:?}: {reason}")]
    InvalidTerm { term: String, reason: &'static str },
    #[error("cannot read gazetteer {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A term compiled to its token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Pattern {
    /// Token texts, case-folded when the gazetteer is case-insensitive.
    pub tokens: Vec<String>,
    /// `gaps[j]` is the text between token `j` and `j + 1`: `""` or `" "`.
    pub gaps: Vec<String>,
}

impl Pattern {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }
}

/// Dictionary of entity terms used for longest-match chunking.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    terms: BTreeSet<String>,
    case_sensitive: bool,
    /// Patterns keyed by their first (folded) token, shortest first.
    index: HashMap<String, Vec<Pattern>>,
}

impl Gazetteer {
    pub fn new<I, S>(terms: I) -> Result<Self, GazetteerError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_case_sensitivity(terms, true)
    }

    pub fn with_case_sensitivity<I, S>(terms: I, case_sensitive: bool) -> Result<Self, GazetteerError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let terms: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        if terms.is_empty() {
            return Err(GazetteerError::Empty);
        }
        let mut index: HashMap<String, Vec<Pattern>> = HashMap::new();
        for term in &terms {
            let pattern = compile(term, case_sensitive)?;
            index.entry(pattern.tokens[0].clone()).or_default().push(pattern);
        }
        for patterns in index.values_mut() {
            patterns.sort_by_key(Pattern::len);
            patterns.dedup();
        }
        Ok(Self {
            terms,
            case_sensitive,
            index,
        })
    }

    /// Parses one term per line; blank lines and lines starting with `#`
    /// are skipped.
    pub fn parse(source: &str, case_sensitive: bool) -> Result<Self, GazetteerError> {
        let terms = source
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        Self::with_case_sensitivity(terms, case_sensitive)
    }

    pub fn load(path: impl AsRef<Path>, case_sensitive: bool) -> Result<Self, GazetteerError> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path).map_err(|source| GazetteerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&source, case_sensitive)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn case_sensitive(&self) -> bool {
        self.case_sensitive
    }

    /// Whether `term` is a gazetteer entry under this gazetteer's case rule.
    pub fn contains(&self, term: &str) -> bool {
        if self.case_sensitive {
            self.terms.contains(term)
        } else {
            let folded = term.to_lowercase();
            self.terms.iter().any(|t| t.to_lowercase() == folded)
        }
    }

    pub(crate) fn fold_key(&self, token: &str, mutant: Option<Mutant>) -> String {
        if self.case_sensitive || on(mutant, Mutant::FoldCaseIdentity) {
            token.to_string()
        } else {
            token.to_lowercase()
        }
    }

    pub(crate) fn candidates(&self, key: &str) -> &[Pattern] {
        self.index.get(key).map_or(&[], Vec::as_slice)
    }
}

fn compile(term: &str, case_sensitive: bool) -> Result<Pattern, GazetteerError> {
    let invalid = |reason| GazetteerError::InvalidTerm {
        term: term.to_string(),
        reason,
    };
    if term.is_empty() {
        return Err(invalid("empty term"));
    }
    let tz = scan(term, None).map_err(|_| invalid("tokenizer fault"))?;
    let first = tz.tokens.first().ok_or_else(|| invalid("no tokens"))?;
    if first.class != TokenClass::Word {
        return Err(invalid("term must start with a letter or digit"));
    }
    let leading = &tz.whitespace[0];
    let trailing = &tz.whitespace[tz.tokens.len()];
    if !leading.is_empty() || !trailing.is_empty() {
        return Err(invalid("leading or trailing whitespace"));
    }
    let gaps: Vec<String> = tz.whitespace[1..tz.tokens.len()].to_vec();
    if gaps.iter().any(|g| !(g.is_empty() || g == " ")) {
        return Err(invalid("tokens must be separated by a single space"));
    }
    let fold = |s: &str| {
        if case_sensitive {
            s.to_string()
        } else {
            s.to_lowercase()
        }
    };
    Ok(Pattern {
        tokens: tz.tokens.iter().map(|t| fold(&t.text)).collect(),
        gaps,
    })
}
