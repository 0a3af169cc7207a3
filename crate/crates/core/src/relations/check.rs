use std::collections::{BTreeMap, BTreeSet};

use super::{Category, ExpectedOutcome, Mode, RelationError, TestPair, TransformMeta, Verdict};
use crate::recognizer::{extract, Entity, ExtractionResult, Gazetteer};

fn inconsistent(msg: impl Into<String>) -> RelationError {
    RelationError::InconsistentMeta(msg.into())
}

fn shift(entity: &Entity, delta: i64) -> Result<Entity, RelationError> {
    let span = entity
        .span
        .shifted(delta)
        .ok_or_else(|| inconsistent(format!("shifting {entity} by {delta} leaves the text")))?;
    Ok(Entity {
        term: entity.term.clone(),
        span,
    })
}

/// Entities the follow-up extraction should report, derived from the source
/// extractions and the transform metadata.
pub fn expected_entities(meta: &TransformMeta, sources: &[ExtractionResult]) -> Result<ExpectedOutcome, RelationError> {
    let mut entities = Vec::new();
    let terms_only = match meta.mr.category() {
        Category::Addition => {
            let [host, inserted] = sources else {
                return Err(inconsistent(format!(
                    "addition needs 2 source results, got {}",
                    sources.len()
                )));
            };
            let boundary = meta.boundary.ok_or_else(|| inconsistent("missing boundary"))?;
            let inserted_at = meta.inserted_at.ok_or_else(|| inconsistent("missing inserted_at"))?;
            if boundary > host.input_length {
                return Err(inconsistent("boundary past end of host"));
            }
            for e in &host.entities {
                let delta = if e.span.start < boundary {
                    meta.shift_before
                } else {
                    meta.shift_after
                };
                entities.push(shift(e, delta)?);
            }
            for e in &inserted.entities {
                entities.push(shift(e, inserted_at as i64)?);
            }
            false
        }
        Category::Deletion => {
            let [source] = sources else {
                return Err(inconsistent(format!(
                    "deletion needs 1 source result, got {}",
                    sources.len()
                )));
            };
            let removed = meta.removed_span.ok_or_else(|| inconsistent("missing removed_span"))?;
            if meta.shift_after != -(removed.len() as i64) {
                return Err(inconsistent("shift_after does not match removed span"));
            }
            for e in &source.entities {
                if e.span.end <= removed.start {
                    entities.push(shift(e, meta.shift_before)?);
                } else if e.span.start >= removed.end {
                    entities.push(shift(e, meta.shift_after)?);
                }
            }
            false
        }
        Category::Shuffling => {
            let [source] = sources else {
                return Err(inconsistent(format!(
                    "shuffling needs 1 source result, got {}",
                    sources.len()
                )));
            };
            if meta.permutation.is_none() {
                return Err(inconsistent("missing permutation"));
            }
            entities.extend(source.entities.iter().cloned());
            true
        }
    };
    entities.sort();
    Ok(ExpectedOutcome { entities, terms_only })
}

fn multiset<'a, K: Ord>(items: &'a [Entity], key: impl Fn(&'a Entity) -> K) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for e in items {
        *m.entry(key(e)).or_insert(0) += 1;
    }
    m
}

/// Entities of `left` not accounted for by `right`, counting multiplicity.
fn surplus<'a, K: Ord>(left: &'a [Entity], right: &'a [Entity], key: impl Fn(&'a Entity) -> K + Copy) -> Vec<Entity> {
    let mut budget = multiset(right, key);
    let mut out = Vec::new();
    for e in left {
        match budget.get_mut(&key(e)) {
            Some(c) if *c > 0 => *c -= 1,
            _ => out.push(e.clone()),
        }
    }
    out
}

/// Compares a follow-up extraction with the expected outcome.
pub fn check(expected: &ExpectedOutcome, actual: &ExtractionResult, mode: Mode) -> Verdict {
    let exp = &expected.entities;
    let act = &actual.entities;
    let (missing, extra) = match (mode, expected.terms_only) {
        (Mode::Strict, false) => {
            let key = |e: &Entity| (e.term.clone(), e.span);
            (surplus(exp, act, key), surplus(act, exp, key))
        }
        (Mode::Strict, true) => {
            let key = |e: &Entity| e.term.clone();
            (surplus(exp, act, key), surplus(act, exp, key))
        }
        (Mode::Paper, terms_only) => {
            let terms = |v: &[Entity]| v.iter().map(|e| e.term.clone()).collect::<BTreeSet<_>>();
            let starts = |v: &[Entity]| v.iter().map(|e| e.span.start).collect::<BTreeSet<_>>();
            let (exp_terms, act_terms) = (terms(exp), terms(act));
            let (exp_starts, act_starts) = (starts(exp), starts(act));
            let unmatched = |v: &[Entity], ts: &BTreeSet<String>, ss: &BTreeSet<usize>| -> Vec<Entity> {
                v.iter()
                    .filter(|e| !ts.contains(&e.term) || (!terms_only && !ss.contains(&e.span.start)))
                    .cloned()
                    .collect()
            };
            (
                unmatched(exp, &act_terms, &act_starts),
                unmatched(act, &exp_terms, &exp_starts),
            )
        }
    };
    Verdict {
        satisfied: missing.is_empty() && extra.is_empty(),
        missing,
        extra,
        mode,
    }
}

/// Whether the reference recognizer satisfies the strict relation on
/// `pair`, i.e. no gazetteer term matches across a seam the transform
/// created or removed.
pub fn validate_pair(pair: &TestPair, gazetteer: &Gazetteer) -> bool {
    let run = |text: &str| extract(text, gazetteer, None).expect("reference recognizer never faults");
    let sources: Vec<ExtractionResult> = pair.source_texts.iter().map(|u| run(&u.text)).collect();
    let Ok(expected) = expected_entities(&pair.meta, &sources) else {
        return false;
    };
    check(&expected, &run(&pair.followup_text.text), Mode::Strict).satisfied
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{addition_pair, deletion_pair, shuffle_pair, MrId, Placement};
    use crate::textmodel::{Span, TextUnit};

    fn result(entities: Vec<Entity>, input_length: usize) -> ExtractionResult {
        ExtractionResult { entities, input_length }
    }

    fn meta_for(mr: u8) -> TransformMeta {
        TransformMeta {
            mr: MrId::new(mr).unwrap(),
            placement: Some(Placement::End),
            boundary: None,
            inserted_at: None,
            shift_before: 0,
            shift_after: 0,
            removed_span: None,
            permutation: None,
            separator: String::new(),
        }
    }

    #[test]
    fn paragraph_appended_to_article() {
        let mut meta = meta_for(3);
        meta.boundary = Some(38);
        meta.inserted_at = Some(40);
        meta.shift_after = 10;
        let article = result(vec![Entity::new("BDNF", 5, 9)], 38);
        let paragraph = result(vec![Entity::new("Neuritin", 0, 8)], 8);
        let exp = expected_entities(&meta, &[article, paragraph]).unwrap();
        assert_eq!(
            exp.entities,
            [Entity::new("BDNF", 5, 9), Entity::new("Neuritin", 40, 48)]
        );
        assert!(!exp.terms_only);
    }

    #[test]
    fn paragraph_appended_matches_re_extraction() {
        let host = TextUnit::article("Some BDNF text here.\n\nMore text follows.");
        let para = TextUnit::paragraph("Neuritin acts.");
        let pair = addition_pair(MrId::new(3).unwrap(), host, para, Placement::End, 0, "\n\n", 0).unwrap();
        let g = Gazetteer::new(["BDNF", "Neuritin"]).unwrap();
        let run = |t: &str| extract(t, &g, None).unwrap();
        let sources: Vec<_> = pair.source_texts.iter().map(|u| run(&u.text)).collect();
        let exp = expected_entities(&pair.meta, &sources).unwrap();
        assert_eq!(exp.entities, run(&pair.followup_text.text).entities);
    }

    #[test]
    fn deletion_at_end_without_overlap_keeps_entities() {
        let mut meta = meta_for(6);
        meta.removed_span = Some(Span::new(20, 30));
        meta.shift_after = -10;
        let src = result(vec![Entity::new("BDNF", 0, 4), Entity::new("NGF", 10, 13)], 30);
        let exp = expected_entities(&meta, std::slice::from_ref(&src)).unwrap();
        assert_eq!(exp.entities, src.entities);
    }

    #[test]
    fn deletion_drops_overlapping_and_shifts_later() {
        let mut meta = meta_for(5);
        meta.removed_span = Some(Span::new(5, 12));
        meta.shift_after = -7;
        let src = result(
            vec![
                Entity::new("A", 0, 1),
                Entity::new("BB", 6, 8),
                Entity::new("CC", 12, 14),
            ],
            20,
        );
        let exp = expected_entities(&meta, &[src]).unwrap();
        assert_eq!(exp.entities, [Entity::new("A", 0, 1), Entity::new("CC", 5, 7)]);
    }

    #[test]
    fn shuffled_word_list_is_terms_only() {
        let mut meta = meta_for(10);
        meta.permutation = Some(vec![1, 0]);
        let src = result(vec![Entity::new("BDNF", 0, 4), Entity::new("NGF", 5, 8)], 8);
        let exp = expected_entities(&meta, &[src]).unwrap();
        assert!(exp.terms_only);
        let actual = result(vec![Entity::new("NGF", 0, 3), Entity::new("BDNF", 4, 8)], 8);
        assert!(check(&exp, &actual, Mode::Strict).satisfied);
    }

    #[test]
    fn wrong_result_count_is_inconsistent() {
        let meta = meta_for(1);
        assert!(matches!(
            expected_entities(&meta, &[]),
            Err(RelationError::InconsistentMeta(_))
        ));
        let mut meta = meta_for(7);
        meta.removed_span = Some(Span::new(0, 4));
        meta.shift_after = -3;
        assert!(expected_entities(&meta, &[result(vec![], 10)]).is_err());
    }

    #[test]
    fn verdict_diffs() {
        let exp = ExpectedOutcome {
            entities: vec![Entity::new("BDNF", 0, 4), Entity::new("NGF", 10, 13)],
            terms_only: false,
        };
        let same = result(exp.entities.clone(), 20);
        let v = check(&exp, &same, Mode::Strict);
        assert!(v.satisfied && v.missing.is_empty() && v.extra.is_empty());

        let dropped = result(vec![Entity::new("BDNF", 0, 4)], 20);
        let v = check(&exp, &dropped, Mode::Strict);
        assert!(!v.satisfied);
        assert_eq!(v.missing, [Entity::new("NGF", 10, 13)]);
        assert!(v.extra.is_empty());
    }

    #[test]
    fn duplicate_terms_separate_the_modes() {
        // Source holds Neuritin twice; the follow-up only once.
        let exp = ExpectedOutcome {
            entities: vec![Entity::new("Neuritin", 0, 8), Entity::new("Neuritin", 20, 28)],
            terms_only: true,
        };
        let actual = result(vec![Entity::new("Neuritin", 3, 11)], 40);
        let strict = check(&exp, &actual, Mode::Strict);
        let paper = check(&exp, &actual, Mode::Paper);
        assert!(!strict.satisfied);
        assert_eq!(strict.missing.len(), 1);
        assert!(paper.satisfied);
    }

    #[test]
    fn seam_match_fails_validation() {
        let g = Gazetteer::new(["B Neuritin", "Neuritin"]).unwrap();
        let pair = addition_pair(
            MrId::new(1).unwrap(),
            TextUnit::sentence("A binds B"),
            TextUnit::sentence("Neuritin acts."),
            Placement::End,
            0,
            " ",
            0,
        )
        .unwrap();
        assert!(!validate_pair(&pair, &g));
        let clean = Gazetteer::new(["Neuritin"]).unwrap();
        assert!(validate_pair(&pair, &clean));
    }

    #[test]
    fn identity_shuffle_validates() {
        let g = Gazetteer::new(["BDNF"]).unwrap();
        let pair = shuffle_pair(MrId::new(9).unwrap(), TextUnit::article("BDNF binds."), vec![0], 0).unwrap();
        assert!(validate_pair(&pair, &g));
    }

    #[test]
    fn removal_splitting_an_entity() {
        let g = Gazetteer::new(["nerve growth factor", "growth factor"]).unwrap();
        let src = TextUnit::sentence("The nerve growth factor binds.");
        // Removing "nerve " leaves "growth factor", a new match.
        let pair = deletion_pair(
            MrId::new(5).unwrap(),
            src.clone(),
            Span::new(4, 10),
            Placement::Middle,
            0,
        )
        .unwrap();
        assert!(!validate_pair(&pair, &g));
        // Removing "growth " leaves "nerve factor", nothing new.
        let pair = deletion_pair(MrId::new(5).unwrap(), src, Span::new(10, 17), Placement::Middle, 0).unwrap();
        assert!(validate_pair(&pair, &g));
    }
}
