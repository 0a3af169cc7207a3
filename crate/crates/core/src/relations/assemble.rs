use super::{Category, MrId, Placement, RelationError, TestPair, TransformMeta};
use crate::textmodel::{char_length, slice_chars, split_paragraphs, Span, TextUnit, UnitKind, WORD_SEPARATOR};

fn inconsistent(msg: impl Into<String>) -> RelationError {
    RelationError::InconsistentMeta(msg.into())
}

fn split_at_char(text: &str, at: usize) -> Result<(&str, &str), RelationError> {
    let n = char_length(text);
    let head = slice_chars(text, 0, at).ok_or_else(|| inconsistent(format!("offset {at} past end {n}")))?;
    let tail = slice_chars(text, at, n).expect("offset already checked");
    Ok((head, tail))
}

fn insert_text(
    host: &str,
    inserted: &str,
    placement: Placement,
    boundary: usize,
    separator: &str,
) -> Result<(String, usize), RelationError> {
    let (followup, prefix_len) = match placement {
        Placement::Start => (format!("{inserted}{separator}{host}"), 0),
        Placement::End => (
            format!("{host}{separator}{inserted}"),
            char_length(host) + char_length(separator),
        ),
        Placement::Middle => {
            let (head, tail) = split_at_char(host, boundary)?;
            (format!("{head}{inserted}{separator}{tail}"), char_length(head))
        }
    };
    Ok((followup, prefix_len))
}

fn effective_boundary(host: &str, placement: Placement, boundary: usize) -> Result<usize, RelationError> {
    let n = char_length(host);
    match placement {
        Placement::Start => Ok(0),
        Placement::End => Ok(n),
        Placement::Middle if boundary > 0 && boundary < n => Ok(boundary),
        Placement::Middle => Err(inconsistent(format!(
            "middle boundary {boundary} not inside host of length {n}"
        ))),
    }
}

/// Inserts `inserted` into `host` and records the realized offsets.
///
/// `boundary` is only read for [`Placement::Middle`]; it must be the start
/// of a unit inside the host, and the separator is placed after the
/// inserted unit.
pub fn addition_pair(
    mr: MrId,
    host: TextUnit,
    inserted: TextUnit,
    placement: Placement,
    boundary: usize,
    separator: &str,
    seed: u64,
) -> Result<TestPair, RelationError> {
    if mr.category() != Category::Addition {
        return Err(inconsistent(format!("MR{mr} is not an addition relation")));
    }
    let boundary = effective_boundary(&host.text, placement, boundary)?;
    let (followup, inserted_at) = insert_text(&host.text, &inserted.text, placement, boundary, separator)?;
    let shift = (char_length(&followup) - host.char_length()) as i64;
    let meta = TransformMeta {
        mr,
        placement: Some(placement),
        boundary: Some(boundary),
        inserted_at: Some(inserted_at),
        shift_before: 0,
        shift_after: shift,
        removed_span: None,
        permutation: None,
        separator: separator.to_string(),
    };
    Ok(TestPair {
        mr,
        followup_text: TextUnit::new(host.kind, followup),
        source_texts: vec![host, inserted],
        meta,
        seed,
    })
}

/// Removes `removed` (separator included) from `source`.
pub fn deletion_pair(
    mr: MrId,
    source: TextUnit,
    removed: Span,
    placement: Placement,
    seed: u64,
) -> Result<TestPair, RelationError> {
    if mr.category() != Category::Deletion {
        return Err(inconsistent(format!("MR{mr} is not a deletion relation")));
    }
    let n = source.char_length();
    if removed.end > n || removed.is_empty() {
        return Err(inconsistent(format!(
            "removed span {removed} outside source of length {n}"
        )));
    }
    let followup = remove_text(&source.text, removed)?;
    let removed_text = removed.slice(&source.text).expect("span checked");
    let separator: String = match placement {
        Placement::End => removed_text.chars().take_while(|c| c.is_whitespace()).collect(),
        _ => {
            let mut tail: Vec<char> = removed_text.chars().rev().take_while(|c| c.is_whitespace()).collect();
            tail.reverse();
            tail.into_iter().collect()
        }
    };
    let meta = TransformMeta {
        mr,
        placement: Some(placement),
        boundary: Some(removed.start),
        inserted_at: None,
        shift_before: 0,
        shift_after: -(removed.len() as i64),
        removed_span: Some(removed),
        permutation: None,
        separator,
    };
    Ok(TestPair {
        mr,
        followup_text: TextUnit::new(source.kind, followup),
        source_texts: vec![source],
        meta,
        seed,
    })
}

fn remove_text(text: &str, removed: Span) -> Result<String, RelationError> {
    let (head, rest) = split_at_char(text, removed.start)?;
    let (_, tail) = split_at_char(rest, removed.len())?;
    Ok(format!("{head}{tail}"))
}

/// Units a shuffling relation permutes: paragraphs of an article or lines
/// of a word list.
pub(crate) fn shuffle_units(source: &TextUnit) -> Result<(Vec<String>, &'static str), RelationError> {
    match source.kind {
        UnitKind::Article => {
            let paras = split_paragraphs(source).map_err(|e| inconsistent(e.to_string()))?;
            Ok((
                paras.into_iter().map(|(p, _)| p.text).collect(),
                crate::textmodel::PARAGRAPH_SEPARATOR,
            ))
        }
        UnitKind::WordList => Ok((
            source.text.split(WORD_SEPARATOR).map(str::to_string).collect(),
            WORD_SEPARATOR,
        )),
        other => Err(inconsistent(format!("cannot shuffle a {other:?}"))),
    }
}

fn apply_permutation(units: &[String], permutation: &[usize], separator: &str) -> Result<String, RelationError> {
    let mut seen = vec![false; units.len()];
    if permutation.len() != units.len() {
        return Err(inconsistent("permutation length differs from unit count"));
    }
    for &p in permutation {
        match seen.get_mut(p) {
            Some(s) if !*s => *s = true,
            _ => return Err(inconsistent(format!("invalid permutation entry {p}"))),
        }
    }
    Ok(permutation
        .iter()
        .map(|&p| units[p].as_str())
        .collect::<Vec<_>>()
        .join(separator))
}

/// Reorders the paragraphs (article) or words (word list) of `source`.
pub fn shuffle_pair(mr: MrId, source: TextUnit, permutation: Vec<usize>, seed: u64) -> Result<TestPair, RelationError> {
    if mr.category() != Category::Shuffling {
        return Err(inconsistent(format!("MR{mr} is not a shuffling relation")));
    }
    let (units, separator) = shuffle_units(&source)?;
    let followup = apply_permutation(&units, &permutation, separator)?;
    let meta = TransformMeta {
        mr,
        placement: None,
        boundary: None,
        inserted_at: None,
        shift_before: 0,
        shift_after: 0,
        removed_span: None,
        permutation: Some(permutation),
        separator: separator.to_string(),
    };
    Ok(TestPair {
        mr,
        followup_text: TextUnit::new(source.kind, followup),
        source_texts: vec![source],
        meta,
        seed,
    })
}

/// Rebuilds the follow-up text from the source units and metadata alone.
pub fn reconstruct(pair: &TestPair) -> Result<String, RelationError> {
    let meta = &pair.meta;
    match meta.mr.category() {
        Category::Addition => {
            let [host, inserted] = pair.source_texts.as_slice() else {
                return Err(inconsistent("addition pair needs host and inserted units"));
            };
            let placement = meta.placement.ok_or_else(|| inconsistent("missing placement"))?;
            let boundary = meta.boundary.ok_or_else(|| inconsistent("missing boundary"))?;
            let (text, _) = insert_text(&host.text, &inserted.text, placement, boundary, &meta.separator)?;
            Ok(text)
        }
        Category::Deletion => {
            let [source] = pair.source_texts.as_slice() else {
                return Err(inconsistent("deletion pair needs one source unit"));
            };
            let removed = meta.removed_span.ok_or_else(|| inconsistent("missing removed span"))?;
            remove_text(&source.text, removed)
        }
        Category::Shuffling => {
            let [source] = pair.source_texts.as_slice() else {
                return Err(inconsistent("shuffling pair needs one source unit"));
            };
            let permutation = meta
                .permutation
                .as_deref()
                .ok_or_else(|| inconsistent("missing permutation"))?;
            let (units, _) = shuffle_units(source)?;
            apply_permutation(&units, permutation, &meta.separator)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mr(k: u8) -> MrId {
        MrId::new(k).unwrap()
    }

    #[test]
    fn append_sentence_records_realized_offset() {
        let p = addition_pair(
            mr(1),
            TextUnit::sentence("A binds B."),
            TextUnit::sentence("Neuritin acts."),
            Placement::End,
            0,
            " ",
            1,
        )
        .unwrap();
        assert_eq!(p.followup_text.text, "A binds B. Neuritin acts.");
        assert_eq!(p.meta.inserted_at, Some(11));
        assert_eq!(reconstruct(&p).unwrap(), p.followup_text.text);
    }

    #[test]
    fn middle_insertion_rejects_edges() {
        let host = TextUnit::paragraph("One. Two.");
        let s = TextUnit::sentence("New.");
        assert!(addition_pair(mr(2), host.clone(), s.clone(), Placement::Middle, 0, " ", 0).is_err());
        let p = addition_pair(mr(2), host, s, Placement::Middle, 5, " ", 0).unwrap();
        assert_eq!(p.followup_text.text, "One. New. Two.");
        assert_eq!(p.meta.inserted_at, Some(5));
        assert_eq!(p.meta.shift_after, 5);
    }

    #[test]
    fn deletion_and_reconstruction() {
        let src = TextUnit::paragraph("One. Two. Three.");
        let p = deletion_pair(mr(6), src, Span::new(5, 10), Placement::Middle, 0).unwrap();
        assert_eq!(p.followup_text.text, "One. Three.");
        assert_eq!(p.meta.separator, " ");
        assert_eq!(p.meta.shift_after, -5);
        assert_eq!(reconstruct(&p).unwrap(), p.followup_text.text);
    }

    #[test]
    fn identity_shuffle_of_single_paragraph() {
        let a = TextUnit::article("Only paragraph.");
        let p = shuffle_pair(mr(9), a.clone(), vec![0], 0).unwrap();
        assert_eq!(p.followup_text, a);
        assert!(shuffle_pair(mr(9), a, vec![1], 0).is_err());
    }

    #[test]
    fn wrong_category() {
        let a = TextUnit::article("x");
        assert!(shuffle_pair(mr(1), a.clone(), vec![0], 0).is_err());
        assert!(deletion_pair(mr(9), a, Span::new(0, 1), Placement::End, 0).is_err());
    }
}
