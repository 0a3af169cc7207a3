use std::path::PathBuf;
use std::sync::OnceLock;

use metamorph::corpus::{load_corpus_dir, Corpus};
use metamorph::engine::{run_pair, RunOutcome};
use metamorph::recognizer::{extract, Gazetteer, Mutant};
use metamorph::relations::{check, gen_pair_with, reconstruct, Category, ExpectedOutcome, GenOptions, Mode, MrId};
use metamorph::textmodel::{char_length, split_words};
use proptest::prelude::*;

fn fixtures() -> &'static (Corpus, Gazetteer) {
    static FX: OnceLock<(Corpus, Gazetteer)> = OnceLock::new();
    FX.get_or_init(|| {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        (
            load_corpus_dir(dir.join("corpus")).unwrap(),
            Gazetteer::load(dir.join("gazetteer.txt"), true).unwrap(),
        )
    })
}

fn options() -> GenOptions {
    GenOptions {
        list_len: 30,
        ..GenOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_pairs_hold_on_the_reference(k in 1u8..=10, seed in any::<u64>()) {
        let (corpus, gaz) = fixtures();
        let pair = gen_pair_with(MrId::new(k).unwrap(), corpus, gaz, seed, &options()).unwrap();
        prop_assert_eq!(reconstruct(&pair).unwrap(), pair.followup_text.text.clone());
        for mode in [Mode::Strict, Mode::Paper] {
            let out = run_pair(&pair, gaz, None, mode).unwrap();
            prop_assert!(!out.violated());
        }
        let back: metamorph::relations::TestPair = serde_json::from_str(&serde_json::to_string(&pair).unwrap()).unwrap();
        prop_assert_eq!(back, pair);
    }

    #[test]
    fn shuffles_preserve_the_word_multiset(k in 9u8..=10, seed in any::<u64>()) {
        let (corpus, gaz) = fixtures();
        let pair = gen_pair_with(MrId::new(k).unwrap(), corpus, gaz, seed, &options()).unwrap();
        let words = |t: &str| {
            let mut w: Vec<String> = split_words(t).into_iter().map(|(w, _)| w).collect();
            w.sort();
            w
        };
        prop_assert_eq!(words(&pair.source_texts[0].text), words(&pair.followup_text.text));
        prop_assert_eq!(pair.mr.category(), Category::Shuffling);
    }

    #[test]
    fn deletions_shrink_by_the_removed_span(k in 5u8..=8, seed in any::<u64>()) {
        let (corpus, gaz) = fixtures();
        let pair = gen_pair_with(MrId::new(k).unwrap(), corpus, gaz, seed, &options()).unwrap();
        let removed = pair.meta.removed_span.unwrap();
        prop_assert_eq!(
            char_length(&pair.followup_text.text) + removed.len(),
            char_length(&pair.source_texts[0].text)
        );
    }

    #[test]
    fn mutant_verdicts_are_deterministic(k in 1u8..=10, seed in any::<u64>(), m in 0usize..Mutant::ALL.len()) {
        let (corpus, gaz) = fixtures();
        let pair = gen_pair_with(MrId::new(k).unwrap(), corpus, gaz, seed, &options()).unwrap();
        let mutant = Some(Mutant::ALL[m]);
        let a = run_pair(&pair, gaz, mutant, Mode::Strict).unwrap();
        let b = run_pair(&pair, gaz, mutant, Mode::Strict).unwrap();
        prop_assert_eq!(&a, &b);
        if let RunOutcome::Completed { verdict, .. } = a {
            let paper = run_pair(&pair, gaz, mutant, Mode::Paper).unwrap();
            prop_assert!(!verdict.satisfied || !paper.violated());
        }
    }

    #[test]
    fn self_check_is_satisfied(text in "[A-Za-z ,.]{0,80}") {
        let (_, gaz) = fixtures();
        let r = extract(&text, gaz, None).unwrap();
        let expected = ExpectedOutcome { entities: r.entities.clone(), terms_only: false };
        prop_assert!(check(&expected, &r, Mode::Strict).satisfied);
    }
}
