//! Source/follow-up execution and the mutant × relation campaign.

mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{load_corpus_dir, Corpus, CorpusError};
use crate::recognizer::{
    classify_mutant, default_probes, extract, Classification, Component, ExtractionResult, Gazetteer, GazetteerError,
    Mutant, MutantRuntimeFault,
};
use crate::relations::{
    check, derive_seed, expected_entities, gen_pair_with, GenOptions, Mode, MrId, RelationError, TestPair, Verdict,
    DEFAULT_LIST_LEN,
};

pub use report::{write_csv, write_json, CsvRow};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Gazetteer(#[from] GazetteerError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("kill rate undefined: no testable mutants")]
    EmptyDenominator,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Result of running one pair through one recognizer configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Completed {
        sources: Vec<ExtractionResult>,
        followup: ExtractionResult,
        verdict: Verdict,
    },
    /// The mutant crashed or looped on the source or follow-up input.
    Faulted(MutantRuntimeFault),
}

impl RunOutcome {
    pub fn violated(&self) -> bool {
        matches!(self, RunOutcome::Completed { verdict, .. } if !verdict.satisfied)
    }
}

/// Runs the sources and the follow-up through the same recognizer
/// configuration and checks the relation.
pub fn run_pair(
    pair: &TestPair,
    gazetteer: &Gazetteer,
    mutant: Option<Mutant>,
    mode: Mode,
) -> Result<RunOutcome, RelationError> {
    let mut sources = Vec::with_capacity(pair.source_texts.len());
    for unit in &pair.source_texts {
        match extract(&unit.text, gazetteer, mutant) {
            Ok(r) => sources.push(r),
            Err(f) => return Ok(RunOutcome::Faulted(f)),
        }
    }
    let followup = match extract(&pair.followup_text.text, gazetteer, mutant) {
        Ok(r) => r,
        Err(f) => return Ok(RunOutcome::Faulted(f)),
    };
    let expected = expected_entities(&pair.meta, &sources)?;
    let verdict = check(&expected, &followup, mode);
    Ok(RunOutcome::Completed {
        sources,
        followup,
        verdict,
    })
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub mrs: Vec<MrId>,
    /// Empty runs the baseline only.
    pub mutants: Vec<Mutant>,
    pub pairs_per_mr: usize,
    pub seed: u64,
    pub mode: Mode,
    pub corpus: PathBuf,
    pub gazetteer: PathBuf,
    pub case_sensitive: bool,
    pub validate: bool,
    pub list_len: usize,
    /// Worker threads; 0 uses the rayon default. Does not affect results.
    pub jobs: usize,
}

impl CampaignConfig {
    pub fn new(corpus: impl Into<PathBuf>, gazetteer: impl Into<PathBuf>) -> Self {
        Self {
            mrs: MrId::all().collect(),
            mutants: Mutant::ALL.to_vec(),
            pairs_per_mr: 10,
            seed: 42,
            mode: Mode::Strict,
            corpus: corpus.into(),
            gazetteer: gazetteer.into(),
            case_sensitive: true,
            validate: true,
            list_len: DEFAULT_LIST_LEN,
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.pairs_per_mr == 0 {
            return Err(EngineError::Config("pairs_per_mr must be at least 1".into()));
        }
        if self.mrs.is_empty() {
            return Err(EngineError::Config("no relations selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Killed,
    Survived,
    Exception,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KillMatrix {
    /// `cells[mutant][mr]`; EqualOutput mutants have no row.
    pub cells: BTreeMap<String, BTreeMap<MrId, Cell>>,
    pub triage: BTreeMap<String, Classification>,
}

impl KillMatrix {
    pub fn testable(&self) -> impl Iterator<Item = &str> {
        self.triage
            .iter()
            .filter(|(_, c)| **c == Classification::Testable)
            .map(|(id, _)| id.as_str())
    }

    pub fn killed_by(&self, mr: MrId) -> impl Iterator<Item = &str> + '_ {
        self.testable()
            .filter(move |id| self.cells.get(*id).and_then(|row| row.get(&mr)) == Some(&Cell::Killed))
    }

    /// Testable mutants killed by at least one relation.
    pub fn killed_by_any(&self) -> impl Iterator<Item = &str> + '_ {
        self.testable().filter(|id| {
            self.cells
                .get(*id)
                .is_some_and(|row| row.values().any(|c| *c == Cell::Killed))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TriageCounts {
    pub total: usize,
    pub exceptions: usize,
    pub equal_output: usize,
    pub tested: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MrStats {
    pub tokenizer_killed: usize,
    pub chunker_killed: usize,
    pub total_killed: usize,
    pub testable: usize,
    pub kill_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Baseline {
    pub pairs: usize,
    pub violations: usize,
    pub violations_per_mr: BTreeMap<MrId, usize>,
}

/// The parts of the config that determine results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub mrs: Vec<MrId>,
    pub mutants: Vec<String>,
    pub pairs_per_mr: usize,
    pub seed: u64,
    pub mode: Mode,
    pub validate: bool,
    pub list_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: ReportConfig,
    pub baseline: Baseline,
    pub triage_counts: TriageCounts,
    pub matrix: KillMatrix,
    pub per_mr: BTreeMap<MrId, MrStats>,
    pub killed_union: usize,
    /// `None` when no mutant is testable.
    pub overall_kill_rate: Option<f64>,
    pub empty_denominator: bool,
    /// Faults hit by Testable mutants during the campaign; never kills.
    pub campaign_faults: BTreeMap<String, usize>,
}

impl CampaignReport {
    pub fn baseline_clean(&self) -> bool {
        self.baseline.violations == 0
    }
}

/// Fraction of testable mutants killed by `mr`, or by any relation.
pub fn kill_rate(report: &CampaignReport, mr: Option<MrId>) -> Result<f64, EngineError> {
    let testable = report.matrix.testable().count();
    if testable == 0 {
        return Err(EngineError::EmptyDenominator);
    }
    let killed = match mr {
        Some(mr) => report.matrix.killed_by(mr).count(),
        None => report.matrix.killed_by_any().count(),
    };
    Ok(killed as f64 / testable as f64)
}

/// Seed of pair `j` for relation `mr`; independent of the pair count so
/// larger campaigns extend smaller ones.
pub fn pair_seed(seed: u64, mr: MrId, j: usize) -> u64 {
    derive_seed(derive_seed(seed, u64::from(mr.value())), j as u64)
}

/// Generates `pairs_per_mr` pairs for each configured relation.
pub fn generate_pairs(
    config: &CampaignConfig,
    corpus: &Corpus,
    gazetteer: &Gazetteer,
) -> Result<BTreeMap<MrId, Vec<TestPair>>, RelationError> {
    let options = GenOptions {
        placement: None,
        list_len: config.list_len,
        validate: config.validate,
    };
    let mut out = BTreeMap::new();
    for &mr in &config.mrs {
        let pairs = (0..config.pairs_per_mr)
            .map(|j| gen_pair_with(mr, corpus, gazetteer, pair_seed(config.seed, mr, j), &options))
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(mr, pairs);
    }
    Ok(out)
}

pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport, EngineError> {
    config.validate()?;
    let corpus = load_corpus_dir(&config.corpus)?;
    let gazetteer = Gazetteer::load(&config.gazetteer, config.case_sensitive)?;
    run_campaign_with(config, &corpus, &gazetteer)
}

/// Like [`run_campaign`] with the corpus and gazetteer already loaded.
pub fn run_campaign_with(
    config: &CampaignConfig,
    corpus: &Corpus,
    gazetteer: &Gazetteer,
) -> Result<CampaignReport, EngineError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| EngineError::Config(e.to_string()))?;
    pool.install(|| campaign(config, corpus, gazetteer))
}

fn campaign(config: &CampaignConfig, corpus: &Corpus, gazetteer: &Gazetteer) -> Result<CampaignReport, EngineError> {
    let pairs = generate_pairs(config, corpus, gazetteer)?;
    let mode = config.mode;

    let mut baseline = Baseline::default();
    for (&mr, list) in &pairs {
        let outcomes: Vec<RunOutcome> = list
            .par_iter()
            .map(|p| run_pair(p, gazetteer, None, mode))
            .collect::<Result<_, _>>()?;
        let violations = outcomes.iter().filter(|o| o.violated()).count();
        baseline.pairs += outcomes.len();
        baseline.violations += violations;
        baseline.violations_per_mr.insert(mr, violations);
    }

    let probes = default_probes();
    let mut mutants = config.mutants.clone();
    mutants.sort_by_key(|m| m.id());
    mutants.dedup();
    let triage: Vec<(Mutant, Classification)> = mutants.par_iter().map(|&m| (m, classify_mutant(m, &probes))).collect();

    let mut matrix = KillMatrix::default();
    let mut counts = TriageCounts {
        total: triage.len(),
        ..TriageCounts::default()
    };
    for &(m, class) in &triage {
        matrix.triage.insert(m.id().to_string(), class);
        match class {
            Classification::Exception => {
                counts.exceptions += 1;
                matrix.cells.insert(
                    m.id().to_string(),
                    config.mrs.iter().map(|&mr| (mr, Cell::Exception)).collect(),
                );
            }
            Classification::EqualOutput => counts.equal_output += 1,
            Classification::Testable => counts.tested += 1,
        }
    }

    let jobs: Vec<(Mutant, MrId)> = triage
        .iter()
        .filter(|(_, c)| *c == Classification::Testable)
        .flat_map(|&(m, _)| pairs.keys().map(move |&mr| (m, mr)))
        .collect();
    let results: Vec<(Mutant, MrId, Cell, usize)> = jobs
        .par_iter()
        .map(|&(m, mr)| {
            let mut killed = false;
            let mut faults = 0;
            for pair in &pairs[&mr] {
                match run_pair(pair, gazetteer, Some(m), mode)? {
                    RunOutcome::Faulted(_) => faults += 1,
                    o if o.violated() => killed = true,
                    _ => {}
                }
            }
            let cell = if killed { Cell::Killed } else { Cell::Survived };
            Ok((m, mr, cell, faults))
        })
        .collect::<Result<_, RelationError>>()?;

    let mut campaign_faults = BTreeMap::new();
    for (m, mr, cell, faults) in results {
        matrix.cells.entry(m.id().to_string()).or_default().insert(mr, cell);
        if faults > 0 {
            *campaign_faults.entry(m.id().to_string()).or_insert(0) += faults;
        }
    }

    let component: BTreeMap<&str, Component> = Mutant::ALL.iter().map(|m| (m.id(), m.component())).collect();
    let per_mr = config
        .mrs
        .iter()
        .map(|&mr| {
            let mut stats = MrStats {
                testable: counts.tested,
                ..MrStats::default()
            };
            for id in matrix.killed_by(mr) {
                stats.total_killed += 1;
                match component[id] {
                    Component::Tokenizer => stats.tokenizer_killed += 1,
                    Component::Chunker => stats.chunker_killed += 1,
                }
            }
            stats.kill_rate = (counts.tested > 0).then(|| stats.total_killed as f64 / counts.tested as f64);
            (mr, stats)
        })
        .collect();

    let killed_union = matrix.killed_by_any().count();
    let overall_kill_rate = (counts.tested > 0).then(|| killed_union as f64 / counts.tested as f64);
    Ok(CampaignReport {
        config: ReportConfig {
            mrs: config.mrs.clone(),
            mutants: mutants.iter().map(|m| m.id().to_string()).collect(),
            pairs_per_mr: config.pairs_per_mr,
            seed: config.seed,
            mode,
            validate: config.validate,
            list_len: config.list_len,
        },
        baseline,
        triage_counts: counts,
        matrix,
        per_mr,
        killed_union,
        overall_kill_rate,
        empty_denominator: counts.tested == 0,
        campaign_faults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::gen_pair;

    fn fixture(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
    }

    fn small_config() -> CampaignConfig {
        CampaignConfig {
            pairs_per_mr: 3,
            list_len: 50,
            ..CampaignConfig::new(fixture("corpus"), fixture("gazetteer.txt"))
        }
    }

    #[test]
    fn empty_result_mutant_satisfies_every_relation() {
        let corpus = load_corpus_dir(fixture("corpus")).unwrap();
        let gaz = Gazetteer::load(fixture("gazetteer.txt"), true).unwrap();
        for mr in MrId::all() {
            let pair = gen_pair_with(
                mr,
                &corpus,
                &gaz,
                5,
                &GenOptions {
                    list_len: 50,
                    ..GenOptions::default()
                },
            )
            .unwrap();
            let out = run_pair(&pair, &gaz, Some(Mutant::EmptyResult), Mode::Strict).unwrap();
            assert!(!out.violated(), "MR{mr}");
        }
    }

    #[test]
    fn tokenizer_negation_breaks_paragraph_removal() {
        let corpus = load_corpus_dir(fixture("corpus")).unwrap();
        let gaz = Gazetteer::load(fixture("gazetteer.txt"), true).unwrap();
        let mr7 = MrId::new(7).unwrap();
        let killed = (0..10).any(|s| {
            let pair = gen_pair(mr7, &corpus, &gaz, s).unwrap();
            run_pair(&pair, &gaz, Some(Mutant::GapCapture), Mode::Strict)
                .unwrap()
                .violated()
        });
        assert!(killed);
    }

    #[test]
    fn faults_are_not_kills() {
        let gaz = Gazetteer::new(["word"]).unwrap();
        let corpus = Corpus::from_texts([("a", "word, word, word.\n\nword, word again.")]).unwrap();
        let pair = gen_pair(MrId::new(9).unwrap(), &corpus, &gaz, 0).unwrap();
        let out = run_pair(&pair, &gaz, Some(Mutant::PunctAdvance), Mode::Strict).unwrap();
        assert!(matches!(out, RunOutcome::Faulted(_)));
        assert!(!out.violated());
    }

    #[test]
    fn campaign_matrix_shape() {
        let report = run_campaign(&small_config()).unwrap();
        assert!(report.baseline_clean());
        let c = report.triage_counts;
        assert_eq!(c.total, Mutant::ALL.len());
        assert_eq!(c.exceptions + c.equal_output + c.tested, c.total);
        for (id, class) in &report.matrix.triage {
            let row = report.matrix.cells.get(id);
            match class {
                Classification::EqualOutput => assert!(row.is_none()),
                Classification::Exception => assert!(row.unwrap().values().all(|v| *v == Cell::Exception)),
                Classification::Testable => {
                    let row = row.unwrap();
                    assert_eq!(row.len(), 10);
                    assert!(row.values().all(|v| *v != Cell::Exception));
                }
            }
        }
        // Rates recomputed from raw cells.
        for (&mr, stats) in &report.per_mr {
            let killed = report.matrix.killed_by(mr).count();
            assert_eq!(stats.total_killed, killed);
            assert_eq!(stats.tokenizer_killed + stats.chunker_killed, killed);
            let rate = kill_rate(&report, Some(mr)).unwrap();
            assert!((rate * c.tested as f64 - killed as f64).abs() < 1e-9);
        }
        assert_eq!(
            report.matrix.cells["M-RV-02"]
                .values()
                .filter(|v| **v == Cell::Killed)
                .count(),
            0
        );
    }

    #[test]
    fn baseline_only_campaign() {
        let config = CampaignConfig {
            mutants: vec![],
            ..small_config()
        };
        let report = run_campaign(&config).unwrap();
        assert!(report.matrix.cells.is_empty());
        assert!(report.empty_denominator);
        assert!(matches!(kill_rate(&report, None), Err(EngineError::EmptyDenominator)));
    }

    #[test]
    fn kill_rate_arithmetic() {
        let mut report = run_campaign(&CampaignConfig {
            mutants: vec![],
            ..small_config()
        })
        .unwrap();
        let mr = MrId::new(7).unwrap();
        for k in 0..6 {
            let id = format!("T{k}");
            report.matrix.triage.insert(id.clone(), Classification::Testable);
            let cell = if k < 4 { Cell::Killed } else { Cell::Survived };
            report.matrix.cells.insert(id, [(mr, cell)].into());
        }
        let rate = kill_rate(&report, Some(mr)).unwrap();
        assert!((rate - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(format!("{rate:.3}"), "0.667");
        assert_eq!(kill_rate(&report, Some(MrId::new(1).unwrap())).unwrap(), 0.0);
    }

    #[test]
    fn invalid_config() {
        let config = CampaignConfig {
            pairs_per_mr: 0,
            ..small_config()
        };
        assert!(matches!(run_campaign(&config), Err(EngineError::Config(_))));
    }

    #[test]
    fn more_pairs_never_unkill() {
        let small = run_campaign(&small_config()).unwrap();
        let large = run_campaign(&CampaignConfig {
            pairs_per_mr: 6,
            ..small_config()
        })
        .unwrap();
        for (id, row) in &small.matrix.cells {
            for (mr, cell) in row {
                if *cell == Cell::Killed {
                    assert_eq!(large.matrix.cells[id][mr], Cell::Killed, "{id} MR{mr}");
                }
            }
        }
    }
}
