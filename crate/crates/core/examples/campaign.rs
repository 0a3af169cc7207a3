//! Run the full mutation campaign on the fixtures and print the per-relation
//! kill counts.
//!
//! cargo run --release --example campaign [seed]

use metamorph::engine::{kill_rate, run_campaign, CampaignConfig};

fn main() {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let mut config = CampaignConfig::new(format!("{fixtures}/corpus"), format!("{fixtures}/gazetteer.txt"));
    if let Some(seed) = std::env::args().nth(1) {
        config.seed = seed.parse().expect("seed must be an integer");
    }
    let report = run_campaign(&config).unwrap();
    let c = report.triage_counts;
    println!(
        "total {} / exceptions {} / equal output {} / tested {}",
        c.total, c.exceptions, c.equal_output, c.tested
    );
    println!(
        "baseline: {} violations in {} pairs",
        report.baseline.violations, report.baseline.pairs
    );
    println!("{:<5} {:>9} {:>7} {:>5}", "MR", "tokenizer", "chunker", "all");
    for (mr, s) in &report.per_mr {
        println!(
            "MR{:<3} {:>9} {:>7} {:>5}",
            mr, s.tokenizer_killed, s.chunker_killed, s.total_killed
        );
    }
    println!(
        "union: {} killed, rate {:.3}",
        report.killed_union,
        kill_rate(&report, None).unwrap()
    );
}
