//! Edit-wise majority voting over several systems' corrections.

use std::collections::BTreeMap;

use crate::align::{classify_spelling, extract_edits};
use crate::edit::{to_chars, EditKey, EditSet, EditType, SpanEdit};
use crate::error::{Error, Result};

/// How many systems produced an edit, and whether it gets the relaxed
/// threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vote {
    pub edit: SpanEdit,
    pub count: usize,
    pub spelling: bool,
}

impl Vote {
    /// Word-order and spelling edits survive with `count > n/2 - 1`,
    /// everything else needs `count > n/2`.
    pub fn survives(&self, n_systems: usize) -> bool {
        if self.edit.etype() == EditType::WordOrder || self.spelling {
            2 * self.count + 2 > n_systems
        } else {
            2 * self.count > n_systems
        }
    }
}

/// Per-edit vote counts, keyed by edit identity.
pub type VoteTally = BTreeMap<EditKey, Vote>;

/// Count identical edits across systems. The type and spelling flag of an
/// edit come from the first system that produced it.
pub fn tally(edit_sets: &[EditSet]) -> Result<VoteTally> {
    let Some(first) = edit_sets.first() else {
        return Err(Error::InvalidInput("voting needs at least one system".into()));
    };
    let source = first.source();
    let mut votes = VoteTally::new();
    for (i, set) in edit_sets.iter().enumerate() {
        if set.source() != source {
            return Err(Error::SourceMismatch(format!(
                "system {i} corrected {:?}, expected {:?}",
                set.source_string(),
                first.source_string()
            )));
        }
        for edit in set.edits() {
            votes
                .entry(edit.key())
                .and_modify(|v| v.count += 1)
                .or_insert_with(|| Vote {
                    edit: edit.clone(),
                    count: 1,
                    spelling: classify_spelling(edit, source),
                });
        }
    }
    Ok(votes)
}

/// Edits that clear their threshold, sorted by span, with their counts.
pub fn vote(edit_sets: &[EditSet]) -> Result<Vec<Vote>> {
    let n = edit_sets.len();
    let mut kept: Vec<Vote> = tally(edit_sets)?
        .into_values()
        .filter(|v| v.survives(n))
        .collect();
    kept.sort_by_key(|a| (a.edit.start(), a.edit.end()));
    Ok(kept)
}

/// Drop overlapping survivors: higher count first, then smaller start,
/// shorter span and smaller replacement. Output is sorted by span.
pub fn resolve_conflicts(kept: Vec<Vote>) -> Vec<Vote> {
    let mut ranked = kept;
    ranked.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(a.edit.start().cmp(&b.edit.start()))
            .then(a.edit.span_len().cmp(&b.edit.span_len()))
            .then(a.edit.replacement().cmp(b.edit.replacement()))
    });
    let mut accepted: Vec<Vote> = Vec::with_capacity(ranked.len());
    for candidate in ranked {
        if accepted.iter().all(|a| !a.edit.conflicts_with(&candidate.edit)) {
            accepted.push(candidate);
        }
    }
    accepted.sort_by_key(|a| (a.edit.start(), a.edit.end()));
    accepted
}

/// Combine several corrections of `source` into one.
pub fn combine(source: &str, system_outputs: &[String]) -> Result<String> {
    let src = to_chars(source);
    let sets: Vec<EditSet> = system_outputs
        .iter()
        .map(|h| extract_edits(&src, &to_chars(h)))
        .collect();
    let kept = resolve_conflicts(vote(&sets)?);
    let merged = EditSet::new(src, kept.into_iter().map(|v| v.edit).collect())?;
    Ok(merged.apply().into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::extract_edits_str;

    const SRC: &str = "我不知道他何时返回回来。";

    fn vote_of(edit: SpanEdit, count: usize, spelling: bool) -> Vote {
        Vote { edit, count, spelling }
    }

    #[test]
    fn thresholds_for_six_systems() {
        let generic = SpanEdit::redundant(0, 2).unwrap();
        assert!(!vote_of(generic.clone(), 3, false).survives(6));
        assert!(vote_of(generic, 4, false).survives(6));

        let src = to_chars("我在上海和北京工作");
        let moved = SpanEdit::transposed(&src, 2, 4, 7).unwrap();
        assert!(vote_of(moved.clone(), 3, false).survives(6));
        assert!(!vote_of(moved, 2, false).survives(6));

        let spelling = SpanEdit::substitution(1, 2, "再").unwrap();
        assert!(vote_of(spelling.clone(), 3, true).survives(6));
        assert!(!vote_of(spelling, 2, true).survives(6));
    }

    #[test]
    fn odd_system_counts() {
        let e = SpanEdit::redundant(0, 1).unwrap();
        assert!(vote_of(e.clone(), 1, false).survives(1));
        assert!(!vote_of(e.clone(), 1, false).survives(2));
        assert!(vote_of(e.clone(), 2, false).survives(3));
        assert!(!vote_of(e.clone(), 1, false).survives(3));
        // n = 3: relaxed threshold is count > 0.5
        assert!(vote_of(e, 1, true).survives(3));
    }

    #[test]
    fn tally_counts_identical_edits() {
        let a = extract_edits_str(SRC, "我不知道他何时返回。");
        let b = extract_edits_str(SRC, "我不知道他何时回来。");
        let t = tally(&[a.clone(), a, b]).unwrap();
        assert_eq!(t.len(), 2);
        let counts: Vec<usize> = t.values().map(|v| v.count).collect();
        assert_eq!(counts, vec![1, 2]);
    }

    #[test]
    fn tally_rejects_mixed_sources() {
        let a = extract_edits_str("abc", "abd");
        let b = extract_edits_str("abx", "abd");
        assert!(matches!(tally(&[a, b]), Err(Error::SourceMismatch(_))));
        assert!(tally(&[]).is_err());
    }

    #[test]
    fn conflicts_resolved_by_count_then_position() {
        let disjoint = vec![
            vote_of(SpanEdit::redundant(0, 1).unwrap(), 2, false),
            vote_of(SpanEdit::redundant(3, 4).unwrap(), 2, false),
        ];
        assert_eq!(resolve_conflicts(disjoint.clone()), disjoint);

        let by_count = vec![
            vote_of(SpanEdit::redundant(0, 3).unwrap(), 4, false),
            vote_of(SpanEdit::substitution(2, 4, "xy").unwrap(), 5, false),
        ];
        let out = resolve_conflicts(by_count);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].count, 5);

        let by_start = vec![
            vote_of(SpanEdit::redundant(5, 7).unwrap(), 3, false),
            vote_of(SpanEdit::redundant(3, 6).unwrap(), 3, false),
        ];
        let out = resolve_conflicts(by_start);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].edit.start(), 3);

        let same_point = vec![
            vote_of(SpanEdit::missing(2, "b").unwrap(), 2, false),
            vote_of(SpanEdit::missing(2, "a").unwrap(), 2, false),
        ];
        let out = resolve_conflicts(same_point);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].edit.replacement(), "a");
    }

    #[test]
    fn combine_single_and_unanimous() {
        let h = "我不知道他何时返回。".to_string();
        assert_eq!(combine(SRC, std::slice::from_ref(&h)).unwrap(), h);
        assert_eq!(combine(SRC, &[h.clone(), h.clone(), h.clone()]).unwrap(), h);
    }

    #[test]
    fn combine_two_disjoint_systems_keeps_source() {
        // Generic edits: a deletion and an insertion, one vote each.
        let a = "bcdef".to_string();
        let b = "abcdefg".to_string();
        assert_eq!(combine("abcdef", &[a, b]).unwrap(), "abcdef");
    }

    #[test]
    fn lone_spelling_fix_survives_with_two_systems() {
        let a = "abcdeX".to_string();
        assert_eq!(combine("abcdef", &[a.clone(), "abcdef".to_string()]).unwrap(), a);
    }

    #[test]
    fn combine_majority_deletion() {
        let del = "我不知道他何时返回。".to_string();
        let out = combine(SRC, &[del.clone(), del.clone(), SRC.to_string()]).unwrap();
        assert_eq!(out, del);
    }
}
