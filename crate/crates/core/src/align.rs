//! Character-level alignment and span edit extraction.
//!
//! A source/target pair is aligned under unit costs, the resulting script of
//! single-character edits is merged into span edits, and adjacent
//! deletion/insertion pairs that move the same text become word-order edits.

use crate::edit::{EditSet, EditType, SpanEdit};

/// One step of a character alignment script. Positions index the source;
/// an insertion at `at` goes before source character `at`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharEdit {
    Insert { at: usize, ch: char },
    Delete { at: usize },
    Substitute { at: usize, ch: char },
}

impl CharEdit {
    pub fn position(&self) -> usize {
        match *self {
            CharEdit::Insert { at, .. } | CharEdit::Delete { at } | CharEdit::Substitute { at, .. } => {
                at
            }
        }
    }

    fn kind(&self) -> Step {
        match self {
            CharEdit::Insert { .. } => Step::Insert,
            CharEdit::Delete { .. } => Step::Delete,
            CharEdit::Substitute { .. } => Step::Substitute,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Match = 0,
    Substitute = 1,
    Delete = 2,
    Insert = 3,
}

// Backtrace preference when several steps reach the optimum.
const PREFERENCE: [Step; 4] = [Step::Match, Step::Substitute, Step::Delete, Step::Insert];

// Suffix costs pack (edit distance, edit runs) into one integer so that
// plain comparison is lexicographic.
const EDIT: u64 = 1 << 32;
const INF: u64 = u64::MAX;

/// Minimal unit-cost edit script turning `source` into `target`.
///
/// Among scripts of minimal length, the one whose edits form the fewest
/// contiguous runs is chosen, so a duplicated word is deleted as one block
/// rather than piecemeal. Remaining ties are resolved left to right
/// preferring match, then substitution, deletion and insertion.
pub fn char_align(source: &[char], target: &[char]) -> Vec<CharEdit> {
    let (n, m) = (source.len(), target.len());
    let width = m + 1;
    // cost[((i * width) + j) * 4 + last]: best cost to finish from (i, j)
    // when the previous step was `last`.
    let mut cost = vec![INF; (n + 1) * width * 4];
    let cell = |i: usize, j: usize| (i * width + j) * 4;

    cost[cell(n, m)..].fill(0);
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            // Cost of each step taken from (i, j), before the run penalty.
            let mut via = [INF; 4];
            if i < n && j < m {
                let diag = cell(i + 1, j + 1);
                if source[i] == target[j] {
                    via[Step::Match as usize] = cost[diag + Step::Match as usize];
                } else {
                    via[Step::Substitute as usize] = cost[diag + Step::Substitute as usize] + EDIT;
                }
            }
            if i < n {
                via[Step::Delete as usize] = cost[cell(i + 1, j) + Step::Delete as usize] + EDIT;
            }
            if j < m {
                via[Step::Insert as usize] = cost[cell(i, j + 1) + Step::Insert as usize] + EDIT;
            }
            let here = cell(i, j);
            for last in 0..4 {
                cost[here + last] = (0..4)
                    .filter(|&step| via[step] != INF)
                    .map(|step| via[step] + u64::from(step != Step::Match as usize && step != last))
                    .min()
                    .unwrap_or(INF);
            }
        }
    }

    let mut script = Vec::new();
    let (mut i, mut j, mut last) = (0, 0, Step::Match);
    while i < n || j < m {
        let best = cost[cell(i, j) + last as usize];
        let (step, ni, nj) = PREFERENCE
            .iter()
            .find_map(|&step| {
                let (ni, nj) = next_cell(source, target, i, j, step)?;
                let next = cost[cell(ni, nj) + step as usize];
                let total = match step {
                    Step::Match => next,
                    _ => next + EDIT + u64::from(step != last),
                };
                (total == best).then_some((step, ni, nj))
            })
            .expect("an optimal step always exists");
        match step {
            Step::Match => {}
            Step::Substitute => script.push(CharEdit::Substitute { at: i, ch: target[j] }),
            Step::Delete => script.push(CharEdit::Delete { at: i }),
            Step::Insert => script.push(CharEdit::Insert { at: i, ch: target[j] }),
        }
        (i, j, last) = (ni, nj, step);
    }
    script
}

fn next_cell(source: &[char], target: &[char], i: usize, j: usize, step: Step) -> Option<(usize, usize)> {
    let (n, m) = (source.len(), target.len());
    match step {
        Step::Match => (i < n && j < m && source[i] == target[j]).then_some((i + 1, j + 1)),
        Step::Substitute => (i < n && j < m && source[i] != target[j]).then_some((i + 1, j + 1)),
        Step::Delete => (i < n).then_some((i + 1, j)),
        Step::Insert => (j < m).then_some((i, j + 1)),
    }
}

/// Merge maximal runs of adjacent same-kind character edits into span edits.
pub fn merge_edits(script: &[CharEdit]) -> Vec<SpanEdit> {
    let mut merged = Vec::new();
    let mut iter = script.iter().peekable();
    while let Some(first) = iter.next() {
        let kind = first.kind();
        let start = first.position();
        let mut end = start;
        let mut text = String::new();
        let mut absorb = |e: &CharEdit, end: &mut usize| match *e {
            CharEdit::Insert { ch, .. } => text.push(ch),
            CharEdit::Delete { .. } => *end += 1,
            CharEdit::Substitute { ch, .. } => {
                text.push(ch);
                *end += 1;
            }
        };
        absorb(first, &mut end);
        while let Some(next) = iter.peek() {
            let adjacent = match kind {
                Step::Insert => next.position() == start,
                _ => next.position() == end,
            };
            if next.kind() != kind || !adjacent {
                break;
            }
            absorb(next, &mut end);
            iter.next();
        }
        let edit = match kind {
            Step::Insert => SpanEdit::missing(start, text),
            Step::Delete => SpanEdit::redundant(start, end),
            Step::Substitute => SpanEdit::substitution(start, end, text),
            Step::Match => unreachable!("scripts hold no matches"),
        };
        merged.push(edit.expect("merged runs are non-empty"));
    }
    merged
}

/// Replace adjacent deletion/insertion pairs that move identical text with
/// word-order edits.
///
/// A deletion is paired with an insertion only when the insertion is the
/// next edit and inserts exactly the deleted text; a second pass does the
/// same for an insertion followed by a deletion. Anything unpaired passes
/// through unchanged.
pub fn detect_word_order(edits: &[SpanEdit], source: &[char]) -> Vec<SpanEdit> {
    let n = edits.len();
    let mut pair_with_next = vec![false; n];
    let mut used = vec![false; n];

    let moves_same_text = |deleted: &SpanEdit, inserted: &SpanEdit| {
        source[deleted.start()..deleted.end()]
            .iter()
            .copied()
            .eq(inserted.replacement().chars())
    };

    for (first, second) in [
        (EditType::Redundant, EditType::Missing),
        (EditType::Missing, EditType::Redundant),
    ] {
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (&edits[i], &edits[i + 1]);
            if used[i] || used[i + 1] || a.etype() != first || b.etype() != second {
                continue;
            }
            let matched = match first {
                EditType::Redundant => b.start() > a.end() && moves_same_text(a, b),
                _ => a.start() < b.start() && moves_same_text(b, a),
            };
            if matched {
                pair_with_next[i] = true;
                used[i] = true;
                used[i + 1] = true;
            }
        }
    }

    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if pair_with_next[i] {
            let (a, b) = (&edits[i], &edits[i + 1]);
            let (deleted, insert_at) = if a.etype() == EditType::Redundant {
                (a, b.start())
            } else {
                (b, a.start())
            };
            let moved = SpanEdit::transposed(source, deleted.start(), deleted.end(), insert_at)
                .expect("paired edits describe a valid move");
            out.push(moved);
            i += 2;
        } else {
            out.push(edits[i].clone());
            i += 1;
        }
    }
    out
}

/// Heuristic spelling check: a substitution of one or two characters by the
/// same number of characters, with no punctuation on either side.
pub fn classify_spelling(edit: &SpanEdit, source: &[char]) -> bool {
    if edit.etype() != EditType::Substitution || edit.end() > source.len() {
        return false;
    }
    let original = &source[edit.start()..edit.end()];
    let replaced: Vec<char> = edit.replacement().chars().collect();
    original.len() == replaced.len()
        && original.len() <= 2
        && !original.iter().chain(&replaced).any(|&c| is_punctuation(c))
}

/// ASCII punctuation plus the general, CJK and fullwidth punctuation blocks.
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c,
            '\u{00A1}'..='\u{00BF}'
            | '\u{2010}'..='\u{2027}'
            | '\u{2030}'..='\u{205E}'
            | '\u{3001}'..='\u{3003}'
            | '\u{3008}'..='\u{3011}'
            | '\u{3014}'..='\u{301F}'
            | '\u{FE10}'..='\u{FE19}'
            | '\u{FE30}'..='\u{FE4F}'
            | '\u{FE50}'..='\u{FE6B}'
            | '\u{FF01}'..='\u{FF0F}'
            | '\u{FF1A}'..='\u{FF20}'
            | '\u{FF3B}'..='\u{FF40}'
            | '\u{FF5B}'..='\u{FF65}')
}

/// Placeholder for a context-dependent missing component.
pub const MC_TAG: &str = "[MC]";

/// Text with every `[MC]` collapsed to a single placeholder code point.
struct Collapsed {
    units: Vec<char>,
    /// offsets[k] is the original index of unit k; one extra entry for the end.
    offsets: Vec<usize>,
}

fn collapse_tags(text: &[char], placeholder: char) -> Collapsed {
    let tag: Vec<char> = MC_TAG.chars().collect();
    let mut units = Vec::with_capacity(text.len());
    let mut offsets = Vec::with_capacity(text.len() + 1);
    let mut i = 0;
    while i < text.len() {
        offsets.push(i);
        if text[i..].starts_with(&tag) {
            units.push(placeholder);
            i += tag.len();
        } else {
            units.push(text[i]);
            i += 1;
        }
    }
    offsets.push(text.len());
    Collapsed { units, offsets }
}

fn placeholder_for(source: &[char], target: &[char]) -> char {
    ('\u{E000}'..='\u{F8FF}')
        .find(|c| !source.contains(c) && !target.contains(c))
        .expect("private use area exhausted")
}

/// Full extraction pipeline: align, merge into spans, detect word order.
///
/// `[MC]` tags are aligned as single units and spans are reported in
/// original code point offsets.
pub fn extract_edits(source: &[char], target: &[char]) -> EditSet {
    let tag: Vec<char> = MC_TAG.chars().collect();
    let has_tag = |t: &[char]| t.windows(tag.len()).any(|w| w == tag.as_slice());

    let spans = if has_tag(source) || has_tag(target) {
        let placeholder = placeholder_for(source, target);
        let src = collapse_tags(source, placeholder);
        let tgt = collapse_tags(target, placeholder);
        merge_edits(&char_align(&src.units, &tgt.units))
            .into_iter()
            .map(|e| {
                let start = src.offsets[e.start()];
                let end = src.offsets[e.end()];
                let replacement = e
                    .replacement()
                    .replace(placeholder, MC_TAG);
                SpanEdit::typed(e.etype(), start, end, replacement, source)
                    .expect("expanded edit keeps its shape")
            })
            .collect::<Vec<_>>()
    } else {
        merge_edits(&char_align(source, target))
    };

    let edits = detect_word_order(&spans, source);
    EditSet::new(source.to_vec(), edits).expect("extracted edits form a valid edit set")
}

/// [`extract_edits`] over string slices.
pub fn extract_edits_str(source: &str, target: &str) -> EditSet {
    let source: Vec<char> = source.chars().collect();
    let target: Vec<char> = target.chars().collect();
    extract_edits(&source, &target)
}
