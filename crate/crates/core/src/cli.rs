//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or input errors, 2 corpus too small or
//! seam unresolvable, 3 relation violated on the unmutated recognizer,
//! 4 mutant runtime fault.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::corpus::load_corpus_dir;
use crate::engine::{
    generate_pairs, run_campaign, run_pair, write_csv, write_json, CampaignConfig, EngineError, RunOutcome,
};
use crate::recognizer::{extract, list_mutants, Gazetteer, Mutant};
use crate::relations::{Mode, MrId, RelationError, TestPair, DEFAULT_LIST_LEN};

#[derive(Debug, Parser)]
#[command(
    name = "metamorph",
    version,
    about = "Metamorphic testing of a gazetteer entity recognizer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract entities from a text file and print them as JSON.
    Extract {
        file: PathBuf,
        #[command(flatten)]
        gazetteer: GazetteerArgs,
        #[arg(long)]
        mutant: Option<Mutant>,
    },
    /// Generate source/follow-up pairs as JSON files.
    GenPairs {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        generation: GenerationArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one saved pair and print the verdict.
    RunMt {
        pair: PathBuf,
        #[command(flatten)]
        gazetteer: GazetteerArgs,
        #[arg(long)]
        mutant: Option<Mutant>,
        #[arg(long, default_value = "strict")]
        mode: Mode,
    },
    /// Run the mutant × relation campaign and write report.json and per_mr.csv.
    Campaign {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        generation: GenerationArgs,
        /// `all`, `none`, or comma-separated ids.
        #[arg(long, default_value = "all")]
        mutants: String,
        #[arg(long, default_value = "strict")]
        mode: Mode,
        /// Worker threads; 0 picks the number of cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the mutant catalog as JSON.
    ListMutants,
}

#[derive(Debug, Args)]
pub struct GazetteerArgs {
    #[arg(long)]
    pub gazetteer: PathBuf,
    #[arg(long)]
    pub case_insensitive: bool,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Directory of `.txt` articles.
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub gazetteer: GazetteerArgs,
}

#[derive(Debug, Args)]
pub struct GenerationArgs {
    /// `all` or comma-separated relation numbers (`3` or `MR3`).
    #[arg(long, default_value = "all")]
    pub mr: String,
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    #[arg(long, env = "METAMORPH_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_LIST_LEN)]
    pub list_len: usize,
    /// Keep pairs even when the reference recognizer violates them.
    #[arg(long)]
    pub no_validate: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<RelationError> for Failure {
    fn from(e: RelationError) -> Self {
        let code = match e {
            RelationError::CorpusTooSmall { .. } | RelationError::SeamUnresolvable { .. } => 2,
            RelationError::InconsistentMeta(_) => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Relation(r) => r.into(),
            other => Failure::new(1, other.to_string()),
        }
    }
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure::new(1, e.to_string())
}

fn parse_mrs(list: &str) -> Result<Vec<MrId>, Failure> {
    if list.eq_ignore_ascii_case("all") {
        return Ok(MrId::all().collect());
    }
    let mut mrs: Vec<MrId> = list
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(input_error)?;
    mrs.sort();
    mrs.dedup();
    Ok(mrs)
}

fn parse_mutants(list: &str) -> Result<Vec<Mutant>, Failure> {
    match list.to_ascii_lowercase().as_str() {
        "all" => Ok(Mutant::ALL.to_vec()),
        "none" => Ok(Vec::new()),
        _ => list
            .split(',')
            .map(|s| s.trim().parse::<Mutant>().map_err(input_error))
            .collect(),
    }
}

fn load_gazetteer(args: &GazetteerArgs) -> Result<Gazetteer, Failure> {
    Gazetteer::load(&args.gazetteer, !args.case_insensitive).map_err(input_error)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(1, format!("cannot read {}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(path).map_err(|e| Failure::new(1, format!("cannot create {}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize")
}

fn campaign_config(input: &InputArgs, generation: &GenerationArgs) -> Result<CampaignConfig, Failure> {
    Ok(CampaignConfig {
        mrs: parse_mrs(&generation.mr)?,
        pairs_per_mr: generation.pairs,
        seed: generation.seed,
        case_sensitive: !input.gazetteer.case_insensitive,
        validate: !generation.no_validate,
        list_len: generation.list_len,
        ..CampaignConfig::new(&input.corpus, &input.gazetteer.gazetteer)
    })
}

/// Runs a parsed command, returning the exit code on success.
pub fn execute(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Extract {
            file,
            gazetteer,
            mutant,
        } => {
            let gaz = load_gazetteer(&gazetteer)?;
            let text = read_text(&file)?;
            match extract(&text, &gaz, mutant) {
                Ok(result) => {
                    println!(
                        "{}",
                        serde_json::to_string(&result.entities).expect("entities serialize")
                    );
                    Ok(0)
                }
                Err(fault) => Err(Failure::new(4, format!("mutant fault: {fault}"))),
            }
        }
        Command::GenPairs { input, generation, out } => {
            let config = campaign_config(&input, &generation)?;
            if config.pairs_per_mr == 0 {
                return Err(Failure::new(1, "--pairs must be at least 1"));
            }
            let corpus = load_corpus_dir(&input.corpus).map_err(input_error)?;
            let gaz = load_gazetteer(&input.gazetteer)?;
            let pairs = generate_pairs(&config, &corpus, &gaz)?;
            create_dir(&out)?;
            let mut written = 0;
            for (mr, list) in &pairs {
                for (j, pair) in list.iter().enumerate() {
                    let path = out.join(format!("mr{mr}_pair{j}.json"));
                    std::fs::write(&path, to_json(pair) + "\n")
                        .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", path.display())))?;
                    written += 1;
                }
            }
            println!(
                "wrote {written} pairs for {} relations to {}",
                pairs.len(),
                out.display()
            );
            Ok(0)
        }
        Command::RunMt {
            pair,
            gazetteer,
            mutant,
            mode,
        } => {
            let gaz = load_gazetteer(&gazetteer)?;
            let pair: TestPair = serde_json::from_str(&read_text(&pair)?).map_err(input_error)?;
            match run_pair(&pair, &gaz, mutant, mode)? {
                RunOutcome::Faulted(fault) => Err(Failure::new(4, format!("mutant fault: {fault}"))),
                RunOutcome::Completed { verdict, .. } => {
                    println!("{}", to_json(&verdict));
                    Ok(if !verdict.satisfied && mutant.is_none() { 3 } else { 0 })
                }
            }
        }
        Command::Campaign {
            input,
            generation,
            mutants,
            mode,
            jobs,
            out,
        } => {
            let config = CampaignConfig {
                mutants: parse_mutants(&mutants)?,
                mode,
                jobs,
                ..campaign_config(&input, &generation)?
            };
            let report = run_campaign(&config)?;
            create_dir(&out)?;
            write_json(&report, &out.join("report.json"))?;
            write_csv(&report, &out.join("per_mr.csv"))?;
            let c = report.triage_counts;
            println!(
                "mutants: {} total, {} exceptions, {} equal output, {} tested",
                c.total, c.exceptions, c.equal_output, c.tested
            );
            match report.overall_kill_rate {
                Some(rate) => println!("overall kill rate: {rate:.3} ({} of {})", report.killed_union, c.tested),
                None => println!("overall kill rate: undefined (no testable mutants)"),
            }
            if report.baseline_clean() {
                Ok(0)
            } else {
                eprintln!(
                    "baseline violated: {} of {} pairs fail on the unmutated recognizer",
                    report.baseline.violations, report.baseline.pairs
                );
                Ok(3)
            }
        }
        Command::ListMutants => {
            println!("{}", to_json(&list_mutants()));
            Ok(0)
        }
    }
}

/// Parses the process arguments and runs the command.
pub fn run() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
