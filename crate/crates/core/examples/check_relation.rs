//! Build an insertion pair by hand, derive the expected entities, and check
//! the follow-up extraction in both checker modes.
//!
//! cargo run --example check_relation

use metamorph::engine::{run_pair, RunOutcome};
use metamorph::recognizer::{Gazetteer, Mutant};
use metamorph::relations::{addition_pair, Mode, MrId, Placement};
use metamorph::textmodel::TextUnit;

fn main() {
    let gazetteer = Gazetteer::new(["BDNF", "TrkB", "Neuritin", "neurons"]).unwrap();
    let host = TextUnit::paragraph("BDNF binds TrkB. The signal reaches neurons.");
    let inserted = TextUnit::sentence("Neuritin is induced.");
    let pair = addition_pair(MrId::new(2).unwrap(), host, inserted, Placement::Middle, 17, " ", 0).unwrap();
    println!("follow-up: {:?}", pair.followup_text.text);

    for mutant in [None, Some(Mutant::WhitespaceAccumulate)] {
        for mode in [Mode::Strict, Mode::Paper] {
            let label = mutant.map_or("reference", |m| m.id());
            match run_pair(&pair, &gazetteer, mutant, mode).unwrap() {
                RunOutcome::Completed { verdict, .. } => {
                    let show = |es: &[metamorph::recognizer::Entity]| {
                        es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
                    };
                    println!(
                        "{label:<10} {mode:?}: satisfied={} missing=[{}] extra=[{}]",
                        verdict.satisfied,
                        show(&verdict.missing),
                        show(&verdict.extra)
                    );
                }
                RunOutcome::Faulted(f) => println!("{label:<10} {mode:?}: fault {f}"),
            }
        }
    }
}
