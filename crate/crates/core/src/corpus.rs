//! Article ingestion and seeded sampling of source material.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recognizer::{tokenize, TokenClass};
use crate::textmodel::{split_paragraphs, Span, TextError, TextUnit};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} is not valid UTF-8")]
    Encoding(PathBuf),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("duplicate article id {0:?}")]
    DuplicateId(String),
    #[error("article {id:?}: {source}")]
    Text {
        id: String,
        #[source]
        source: TextError,
    },
    #[error("corpus has {available} word tokens, {requested} requested")]
    NotEnoughTokens { requested: usize, available: usize },
}

#[derive(Debug, Clone)]
pub struct Article {
    pub id: String,
    pub text: TextUnit,
    pub paragraphs: Vec<(TextUnit, Span)>,
}

/// Ordered, non-empty collection of canonical articles.
#[derive(Debug, Clone)]
pub struct Corpus {
    articles: Vec<Article>,
}

impl Corpus {
    /// Builds a corpus from `(id, raw text)` pairs, canonicalizing each
    /// article.
    pub fn from_texts<I, S, T>(texts: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut articles = Vec::new();
        for (id, raw) in texts {
            let id = id.into();
            if !seen.insert(id.clone()) {
                return Err(CorpusError::DuplicateId(id));
            }
            let text_err = |source| CorpusError::Text { id: id.clone(), source };
            let text = TextUnit::canonical_article(raw.as_ref()).map_err(text_err)?;
            let paragraphs = split_paragraphs(&text).map_err(text_err)?;
            articles.push(Article { id, text, paragraphs });
        }
        if articles.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        Ok(Self { articles })
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    /// Every word token of every article, with its article id.
    pub fn word_tokens(&self) -> Vec<(&str, String, Span)> {
        let mut out = Vec::new();
        for a in &self.articles {
            let tokens = tokenize(&a.text.text, None).expect("reference tokenizer never faults");
            out.extend(
                tokens
                    .into_iter()
                    .filter(|t| t.class == TokenClass::Word)
                    .map(|t| (a.id.as_str(), t.text, t.span)),
            );
        }
        out
    }
}

/// Reads articles in the given order; ids are file stems.
pub fn load_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<Corpus, CorpusError> {
    let mut texts = Vec::with_capacity(paths.len());
    for path in paths {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes).map_err(|_| CorpusError::Encoding(path.to_path_buf()))?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        texts.push((id, text));
    }
    Corpus::from_texts(texts)
}

/// Loads every `.txt` file in `dir`, sorted by file name.
pub fn load_corpus_dir(dir: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let dir = dir.as_ref();
    let io = |source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            paths.push(path);
        }
    }
    paths.sort();
    load_corpus(&paths)
}

/// A seeded draw of corpus words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSample {
    pub words: Vec<String>,
    pub seed: u64,
    /// `(article id, token span)` of each drawn word.
    pub provenance: Vec<(String, Span)>,
}

/// Draws `n` word tokens uniformly, with replacement, across all articles.
pub fn sample_words(corpus: &Corpus, n: usize, seed: u64) -> Result<WordSample, CorpusError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_words_with(corpus, n, seed, &mut rng)
}

pub(crate) fn sample_words_with(
    corpus: &Corpus,
    n: usize,
    seed: u64,
    rng: &mut impl Rng,
) -> Result<WordSample, CorpusError> {
    let pool = corpus.word_tokens();
    if pool.len() < n {
        return Err(CorpusError::NotEnoughTokens {
            requested: n,
            available: pool.len(),
        });
    }
    let mut words = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for _ in 0..n {
        let (id, word, span) = &pool[rng.gen_range(0..pool.len())];
        words.push(word.clone());
        provenance.push((id.to_string(), *span));
    }
    Ok(WordSample {
        words,
        seed,
        provenance,
    })
}

/// Newline-joined word list, no trailing newline.
pub fn serialize_word_list(sample: &WordSample) -> TextUnit {
    TextUnit::word_list(&sample.words).expect("sampled tokens contain no whitespace")
}
