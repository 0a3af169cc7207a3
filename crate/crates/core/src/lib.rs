//! Metamorphic testing for span-extraction programs.
//!
//! The crate bundles a deterministic gazetteer recognizer (the system under
//! test), ten metamorphic relations over articles, paragraphs, sentences and
//! word lists, and a mutation campaign that measures how many seeded faults
//! the relations expose.

pub mod cli;
pub mod corpus;
pub mod engine;
pub mod recognizer;
pub mod relations;
pub mod textmodel;
