//! Generate one source/follow-up pair per relation from the fixture corpus.
//!
//! cargo run --example generate_pairs [seed]

use metamorph::corpus::load_corpus_dir;
use metamorph::recognizer::Gazetteer;
use metamorph::relations::{gen_pair_with, GenOptions, MrId};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .map_or(42, |s| s.parse().expect("seed must be an integer"));
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let corpus = load_corpus_dir(format!("{fixtures}/corpus")).unwrap();
    let gazetteer = Gazetteer::load(format!("{fixtures}/gazetteer.txt"), true).unwrap();
    let options = GenOptions {
        list_len: 8,
        ..GenOptions::default()
    };
    for mr in MrId::all() {
        let pair = gen_pair_with(mr, &corpus, &gazetteer, seed, &options).unwrap();
        println!("MR{mr} ({}), seed {}", mr.name(), pair.seed);
        for s in &pair.source_texts {
            println!("  source:    {:?}", s.text);
        }
        println!("  follow-up: {:?}", pair.followup_text.text);
    }
}
