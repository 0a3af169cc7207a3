use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assemble::{addition_pair, deletion_pair, shuffle_pair};
use super::check::validate_pair;
use super::{MrId, Placement, RelationError, SourceBundle, TestPair};
use crate::corpus::{sample_words_with, serialize_word_list, Corpus, CorpusError};
use crate::recognizer::Gazetteer;
use crate::textmodel::{
    split_sentences, split_words, Span, TextUnit, PARAGRAPH_SEPARATOR, SENTENCE_SEPARATOR, WORD_SEPARATOR,
};

/// Words per list in the word-list recipes; MR8 and MR10 use twice this.
pub const DEFAULT_LIST_LEN: usize = 500;
/// Generation attempts before giving up on seam-free pairs.
pub const MAX_ATTEMPTS: usize = 32;

#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Forces the insertion/removal position; random when `None`.
    pub placement: Option<Placement>,
    pub list_len: usize,
    /// Regenerate until the reference recognizer satisfies the pair.
    pub validate: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            placement: None,
            list_len: DEFAULT_LIST_LEN,
            validate: true,
        }
    }
}

/// SplitMix64 finalizer over `base` and `salt`.
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gen_pair(mr: MrId, corpus: &Corpus, gazetteer: &Gazetteer, seed: u64) -> Result<TestPair, RelationError> {
    gen_pair_with(mr, corpus, gazetteer, seed, &GenOptions::default())
}

/// Builds a pair for `mr`, retrying with derived seeds until it validates.
///
/// The first attempt uses `seed` itself; the pair records the seed of the
/// attempt that produced it.
pub fn gen_pair_with(
    mr: MrId,
    corpus: &Corpus,
    gazetteer: &Gazetteer,
    seed: u64,
    options: &GenOptions,
) -> Result<TestPair, RelationError> {
    for attempt in 0..MAX_ATTEMPTS {
        let attempt_seed = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, attempt as u64)
        };
        let bundle = draw_sources(mr, corpus, attempt_seed, options)?;
        let pair = assemble(mr, bundle, options)?;
        if !options.validate || validate_pair(&pair, gazetteer) {
            return Ok(pair);
        }
    }
    Err(RelationError::SeamUnresolvable {
        mr,
        attempts: MAX_ATTEMPTS,
    })
}

fn too_small(mr: MrId, reason: impl Into<String>) -> RelationError {
    RelationError::CorpusTooSmall {
        mr,
        reason: reason.into(),
    }
}

struct ParagraphRef<'a> {
    article: usize,
    unit: &'a TextUnit,
    sentences: Vec<(TextUnit, Span)>,
}

fn paragraphs(corpus: &Corpus) -> Vec<ParagraphRef<'_>> {
    let mut out = Vec::new();
    for (a, article) in corpus.articles().iter().enumerate() {
        for (p, _) in &article.paragraphs {
            let sentences = split_sentences(p).expect("canonical paragraphs are non-empty");
            out.push(ParagraphRef {
                article: a,
                unit: p,
                sentences,
            });
        }
    }
    out
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> Option<&'a T> {
    items.choose(rng)
}

/// Placement for a unit among `count` units (or `count + 1` slots for
/// insertion). Middle is only offered when there is an interior position.
fn choose_placement(
    mr: MrId,
    rng: &mut ChaCha8Rng,
    forced: Option<Placement>,
    has_middle: bool,
) -> Result<Placement, RelationError> {
    match forced {
        Some(Placement::Middle) if !has_middle => Err(too_small(mr, "no unit has an interior position")),
        Some(p) => Ok(p),
        None => {
            let choices: &[Placement] = if has_middle {
                &[Placement::Start, Placement::Middle, Placement::End]
            } else {
                &[Placement::Start, Placement::End]
            };
            Ok(*pick(rng, choices).expect("non-empty"))
        }
    }
}

fn word_list(mr: MrId, corpus: &Corpus, n: usize, rng: &mut ChaCha8Rng, seed: u64) -> Result<TextUnit, RelationError> {
    match sample_words_with(corpus, n, seed, rng) {
        Ok(sample) => Ok(serialize_word_list(&sample)),
        Err(CorpusError::NotEnoughTokens { available, .. }) => {
            Err(too_small(mr, format!("{available} word tokens, {n} needed")))
        }
        Err(e) => Err(too_small(mr, e.to_string())),
    }
}

fn non_identity_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    if n < 2 {
        return perm;
    }
    loop {
        perm.shuffle(rng);
        if perm.iter().enumerate().any(|(i, &p)| i != p) {
            return perm;
        }
    }
}

/// Draws the source units a recipe needs.
pub(crate) fn draw_sources(
    mr: MrId,
    corpus: &Corpus,
    seed: u64,
    options: &GenOptions,
) -> Result<SourceBundle, RelationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut units = BTreeMap::new();
    let mut index = None;
    let forced = options.placement;
    match mr.value() {
        1 => {
            let sentences: Vec<TextUnit> = paragraphs(corpus)
                .into_iter()
                .flat_map(|p| p.sentences.into_iter().map(|(s, _)| s))
                .collect();
            if sentences.len() < 2 {
                return Err(too_small(mr, "needs two sentences"));
            }
            let picks = rand::seq::index::sample(&mut rng, sentences.len(), 2).into_vec();
            units.insert("S1", sentences[picks[0]].clone());
            units.insert("S2", sentences[picks[1]].clone());
        }
        2 => {
            let paras = paragraphs(corpus);
            let hosts: Vec<usize> = (0..paras.len())
                .filter(|&i| forced != Some(Placement::Middle) || paras[i].sentences.len() >= 2)
                .collect();
            let host = *pick(&mut rng, &hosts).ok_or_else(|| too_small(mr, "no paragraph with two sentences"))?;
            let donors: Vec<&TextUnit> = paras
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != host)
                .flat_map(|(_, p)| p.sentences.iter().map(|(s, _)| s))
                .collect();
            let donor =
                *pick(&mut rng, &donors).ok_or_else(|| too_small(mr, "needs a sentence outside the host paragraph"))?;
            let n = paras[host].sentences.len();
            let placement = choose_placement(mr, &mut rng, forced, n >= 2)?;
            index = Some(match placement {
                Placement::Start => 0,
                Placement::End => n,
                Placement::Middle => rng.gen_range(1..n),
            });
            units.insert("P", paras[host].unit.clone());
            units.insert("S", donor.clone());
        }
        3 => {
            let articles = corpus.articles();
            let hosts: Vec<usize> = (0..articles.len())
                .filter(|&i| articles[i].paragraphs.len() >= 2)
                .collect();
            let host = *pick(&mut rng, &hosts).ok_or_else(|| too_small(mr, "no article with two paragraphs"))?;
            let paras = paragraphs(corpus);
            let foreign: Vec<&TextUnit> = paras.iter().filter(|p| p.article != host).map(|p| p.unit).collect();
            let own: Vec<&TextUnit> = paras.iter().map(|p| p.unit).collect();
            let pool = if foreign.is_empty() { own } else { foreign };
            let donor = *pick(&mut rng, &pool).expect("host has paragraphs");
            let n = articles[host].paragraphs.len();
            let placement = choose_placement(mr, &mut rng, forced, true)?;
            index = Some(match placement {
                Placement::Start => 0,
                Placement::End => n,
                Placement::Middle => rng.gen_range(1..n),
            });
            units.insert("A", articles[host].text.clone());
            units.insert("P", donor.clone());
        }
        4 => {
            units.insert("L1", word_list(mr, corpus, options.list_len, &mut rng, seed)?);
            units.insert("L2", word_list(mr, corpus, options.list_len, &mut rng, seed)?);
        }
        5 => {
            let min_words = if forced == Some(Placement::Middle) { 3 } else { 2 };
            let sentences: Vec<TextUnit> = paragraphs(corpus)
                .into_iter()
                .flat_map(|p| p.sentences.into_iter().map(|(s, _)| s))
                .filter(|s| split_words(&s.text).len() >= min_words)
                .collect();
            let s = pick(&mut rng, &sentences).ok_or_else(|| too_small(mr, "no sentence with enough words"))?;
            units.insert("S", s.clone());
        }
        6 => {
            let min = if forced == Some(Placement::Middle) { 3 } else { 2 };
            let paras: Vec<&TextUnit> = paragraphs(corpus)
                .into_iter()
                .filter(|p| p.sentences.len() >= min)
                .map(|p| p.unit)
                .collect::<Vec<_>>();
            let p = *pick(&mut rng, &paras).ok_or_else(|| too_small(mr, "no paragraph with enough sentences"))?;
            units.insert("P", p.clone());
        }
        7 => {
            let min = if forced == Some(Placement::Middle) { 3 } else { 2 };
            let hosts: Vec<&TextUnit> = corpus
                .articles()
                .iter()
                .filter(|a| a.paragraphs.len() >= min)
                .map(|a| &a.text)
                .collect();
            let a = *pick(&mut rng, &hosts).ok_or_else(|| too_small(mr, "no article with enough paragraphs"))?;
            units.insert("A", a.clone());
        }
        8 | 10 => {
            units.insert("L1", word_list(mr, corpus, 2 * options.list_len, &mut rng, seed)?);
        }
        _ => {
            let articles = corpus.articles();
            let multi: Vec<&TextUnit> = articles
                .iter()
                .filter(|a| a.paragraphs.len() >= 2)
                .map(|a| &a.text)
                .collect();
            let all: Vec<&TextUnit> = articles.iter().map(|a| &a.text).collect();
            let pool = if multi.is_empty() { all } else { multi };
            units.insert("A", (*pick(&mut rng, &pool).expect("corpus is non-empty")).clone());
        }
    }
    // Remaining randomness (positions, permutations) continues from the
    // same stream inside `assemble`.
    let next = rng.gen();
    Ok(SourceBundle {
        units,
        index,
        seed: derive_seed(seed, next),
    })
}

/// Removal region for unit `k` of `spans` (in order), separator included:
/// the following separator for non-final units, the preceding one otherwise.
fn removal_region(spans: &[Span], k: usize) -> Span {
    if k + 1 < spans.len() {
        Span::new(spans[k].start, spans[k + 1].start)
    } else {
        Span::new(spans[k - 1].end, spans[k].end)
    }
}

fn removal_index(rng: &mut ChaCha8Rng, n: usize, placement: Placement) -> usize {
    match placement {
        Placement::Start => 0,
        Placement::End => n - 1,
        Placement::Middle => rng.gen_range(1..n - 1),
    }
}

fn placement_of(k: usize, count: usize, n: usize) -> Placement {
    if k == 0 {
        Placement::Start
    } else if k + count >= n {
        Placement::End
    } else {
        Placement::Middle
    }
}

fn assemble(mr: MrId, bundle: SourceBundle, options: &GenOptions) -> Result<TestPair, RelationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(bundle.seed);
    let seed = bundle.seed;
    let mut units = bundle.units;
    let mut take = |name: &str| units.remove(name).expect("recipe drew this unit");
    let forced = options.placement;
    match mr.value() {
        1 => addition_pair(mr, take("S1"), take("S2"), Placement::End, 0, SENTENCE_SEPARATOR, seed),
        2 => {
            let host = take("P");
            let sentences = split_sentences(&host).expect("non-empty");
            let k = bundle.index.expect("MR2 draws an index");
            let (placement, boundary) = insertion_point(k, sentences.iter().map(|(_, s)| *s).collect());
            addition_pair(mr, host, take("S"), placement, boundary, SENTENCE_SEPARATOR, seed)
        }
        3 => {
            let host = take("A");
            let spans = crate::textmodel::split_paragraphs(&host).expect("non-empty");
            let k = bundle.index.expect("MR3 draws an index");
            let (placement, boundary) = insertion_point(k, spans.iter().map(|(_, s)| *s).collect());
            let mut para = take("P");
            para.kind = crate::textmodel::UnitKind::Paragraph;
            addition_pair(mr, host, para, placement, boundary, PARAGRAPH_SEPARATOR, seed)
        }
        4 => addition_pair(mr, take("L1"), take("L2"), Placement::End, 0, WORD_SEPARATOR, seed),
        5 => {
            let s = take("S");
            let words: Vec<Span> = split_words(&s.text).into_iter().map(|(_, sp)| sp).collect();
            let n = words.len();
            let (j, count) = match forced {
                Some(Placement::Start) => (0, rng.gen_range(1..n)),
                Some(Placement::End) => {
                    let c = rng.gen_range(1..n);
                    (n - c, c)
                }
                Some(Placement::Middle) => {
                    let j = rng.gen_range(1..n - 1);
                    (j, rng.gen_range(1..n - j))
                }
                None => {
                    let c = rng.gen_range(1..n);
                    (rng.gen_range(0..=n - c), c)
                }
            };
            let removed = if j + count < n {
                Span::new(words[j].start, words[j + count].start)
            } else {
                Span::new(words[j - 1].end, words[n - 1].end)
            };
            deletion_pair(mr, s, removed, placement_of(j, count, n), seed)
        }
        6 | 7 => {
            let source = take(if mr.value() == 6 { "P" } else { "A" });
            let spans: Vec<Span> = if mr.value() == 6 {
                split_sentences(&source)
                    .expect("non-empty")
                    .into_iter()
                    .map(|(_, s)| s)
                    .collect()
            } else {
                crate::textmodel::split_paragraphs(&source)
                    .expect("non-empty")
                    .into_iter()
                    .map(|(_, s)| s)
                    .collect()
            };
            let n = spans.len();
            let placement = match forced {
                Some(p) => p,
                None => placement_of(rng.gen_range(0..n), 1, n),
            };
            let k = removal_index(&mut rng, n, placement);
            deletion_pair(mr, source, removal_region(&spans, k), placement, seed)
        }
        8 => {
            let list = take("L1");
            let words: Vec<Span> = split_words(&list.text).into_iter().map(|(_, s)| s).collect();
            let keep = words.len() / 2;
            if keep == 0 {
                return Err(too_small(mr, "word list too short to halve"));
            }
            let removed = Span::new(words[keep - 1].end, words[words.len() - 1].end);
            deletion_pair(mr, list, removed, Placement::End, seed)
        }
        9 | 10 => {
            let source = take(if mr.value() == 9 { "A" } else { "L1" });
            let count = super::assemble::shuffle_units(&source)?.0.len();
            let perm = non_identity_permutation(&mut rng, count);
            shuffle_pair(mr, source, perm, seed)
        }
        _ => unreachable!("MrId is 1..=10"),
    }
}

/// Insertion slot `k` among units with the given spans: 0 is the start,
/// `spans.len()` the end, anything else the start of unit `k`.
fn insertion_point(k: usize, spans: Vec<Span>) -> (Placement, usize) {
    if k == 0 {
        (Placement::Start, 0)
    } else if k >= spans.len() {
        (Placement::End, 0)
    } else {
        (Placement::Middle, spans[k].start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{reconstruct, Category};
    use crate::textmodel::char_length;

    fn corpus() -> Corpus {
        Corpus::from_texts([
            (
                "one",
                "Neuritin binds TrkB. BDNF acts on neurons. NGF supports survival.\n\nThe protein kinase C pathway is active. Neurons grow.\n\nA third paragraph. It has two sentences.",
            ),
            (
                "two",
                "IL-2 and IL-6 are cytokines. They signal through receptors.\n\nInsulin lowers glucose. Dopamine is a transmitter. Serotonin too.",
            ),
        ])
        .unwrap()
    }

    fn gaz() -> Gazetteer {
        Gazetteer::new([
            "Neuritin",
            "TrkB",
            "BDNF",
            "NGF",
            "protein kinase C",
            "IL-2",
            "IL-6",
            "Insulin",
            "Dopamine",
            "neurons",
        ])
        .unwrap()
    }

    fn opts() -> GenOptions {
        GenOptions {
            list_len: 20,
            ..GenOptions::default()
        }
    }

    #[test]
    fn every_relation_generates_and_reconstructs() {
        let (c, g) = (corpus(), gaz());
        for mr in MrId::all() {
            for seed in 0..5 {
                let pair = gen_pair_with(mr, &c, &g, seed, &opts()).unwrap();
                assert_eq!(
                    reconstruct(&pair).unwrap(),
                    pair.followup_text.text,
                    "MR{mr} seed {seed}"
                );
                assert!(validate_pair(&pair, &g));
                let src_len: usize = pair.source_texts.iter().map(TextUnit::char_length).sum();
                let fu_len = pair.followup_text.char_length();
                match mr.category() {
                    Category::Addition => assert_eq!(fu_len, src_len + char_length(&pair.meta.separator)),
                    Category::Deletion => assert_eq!(fu_len, src_len - pair.meta.removed_span.unwrap().len()),
                    Category::Shuffling => assert_eq!(fu_len, src_len),
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let (c, g) = (corpus(), gaz());
        for mr in MrId::all() {
            assert_eq!(
                gen_pair_with(mr, &c, &g, 9, &opts()).unwrap(),
                gen_pair_with(mr, &c, &g, 9, &opts()).unwrap()
            );
        }
    }

    #[test]
    fn word_list_halving() {
        let c = Corpus::from_texts([(
            "w",
            "alpha beta gamma delta epsilon zeta eta theta iota kappa ".repeat(200),
        )])
        .unwrap();
        let g = Gazetteer::new(["beta"]).unwrap();
        let pair = gen_pair(MrId::new(8).unwrap(), &c, &g, 3).unwrap();
        let source: Vec<&str> = pair.source_texts[0].text.split('\n').collect();
        assert_eq!(source.len(), 1000);
        let kept: Vec<&str> = pair.followup_text.text.split('\n').collect();
        assert_eq!(kept, source[..500]);
        let removed = pair.meta.removed_span.unwrap();
        assert_eq!(
            removed.slice(&pair.source_texts[0].text).unwrap(),
            format!("\n{}", source[500..].join("\n"))
        );
    }

    #[test]
    fn single_paragraph_article_shuffles_to_itself() {
        let c = Corpus::from_texts([("x", "Only one paragraph here.")]).unwrap();
        let g = Gazetteer::new(["paragraph"]).unwrap();
        let pair = gen_pair(MrId::new(9).unwrap(), &c, &g, 1).unwrap();
        assert_eq!(pair.meta.permutation, Some(vec![0]));
        assert_eq!(pair.followup_text.text, pair.source_texts[0].text);
    }

    #[test]
    fn shuffles_are_not_identity() {
        let (c, g) = (corpus(), gaz());
        for seed in 0..20 {
            let pair = gen_pair_with(MrId::new(10).unwrap(), &c, &g, seed, &opts()).unwrap();
            let perm = pair.meta.permutation.unwrap();
            assert!(perm.iter().enumerate().any(|(i, &p)| i != p));
        }
    }

    #[test]
    fn paragraph_recipes_need_paragraphs() {
        let c = Corpus::from_texts([("x", "Only one paragraph. Two sentences.")]).unwrap();
        let g = Gazetteer::new(["paragraph"]).unwrap();
        for k in [3, 7] {
            let err = gen_pair(MrId::new(k).unwrap(), &c, &g, 1).unwrap_err();
            assert!(matches!(err, RelationError::CorpusTooSmall { .. }), "MR{k}");
        }
    }

    #[test]
    fn forced_middle_placements() {
        let (c, g) = (corpus(), gaz());
        let o = GenOptions {
            placement: Some(Placement::Middle),
            ..opts()
        };
        for k in [2, 3, 5, 6, 7] {
            for seed in 0..10 {
                let pair = gen_pair_with(MrId::new(k).unwrap(), &c, &g, seed, &o).unwrap();
                assert_eq!(pair.meta.placement, Some(Placement::Middle), "MR{k}");
                let b = pair.meta.boundary.unwrap();
                assert!(b > 0 && b < pair.source_texts[0].char_length());
            }
        }
    }

    #[test]
    fn pathological_gazetteer_is_unresolvable() {
        // Every sentence ends with "x" and starts with "y", so joining any two
        // creates the seam term "x y".
        let c = Corpus::from_texts([("s", "y a x\n\ny b x\n\ny c x")]).unwrap();
        let g = Gazetteer::new(["x y"]).unwrap();
        let err = gen_pair(MrId::new(1).unwrap(), &c, &g, 0).unwrap_err();
        assert!(matches!(err, RelationError::SeamUnresolvable { attempts: 32, .. }));
        let o = GenOptions {
            validate: false,
            ..GenOptions::default()
        };
        assert!(gen_pair_with(MrId::new(1).unwrap(), &c, &g, 0, &o).is_ok());
    }
}
