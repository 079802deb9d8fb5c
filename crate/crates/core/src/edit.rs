//! Span edits over a source sentence and their application.
//!
//! All offsets are Unicode code point indices into the source. A span edit
//! replaces `source[start..end]` with its replacement; an empty span is an
//! insertion point.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four error categories. `WordOrder` is never produced by raw
/// alignment, only by pairing a deletion with a matching insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EditType {
    #[serde(rename = "M")]
    Missing,
    #[serde(rename = "R")]
    Redundant,
    #[serde(rename = "S")]
    Substitution,
    #[serde(rename = "W")]
    WordOrder,
}

impl EditType {
    pub const ALL: [EditType; 4] = [
        EditType::Missing,
        EditType::Redundant,
        EditType::Substitution,
        EditType::WordOrder,
    ];

    /// One-letter code used in M2 files and reports.
    pub fn code(self) -> &'static str {
        match self {
            EditType::Missing => "M",
            EditType::Redundant => "R",
            EditType::Substitution => "S",
            EditType::WordOrder => "W",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "M" => Some(EditType::Missing),
            "R" => Some(EditType::Redundant),
            "S" => Some(EditType::Substitution),
            "W" => Some(EditType::WordOrder),
            _ => None,
        }
    }
}

impl fmt::Display for EditType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// The delete/insert pair behind a word-order edit: `source[moved_start..moved_end]`
/// is removed and re-inserted before source position `insert_at`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transposition {
    pub moved_start: usize,
    pub moved_end: usize,
    pub insert_at: usize,
}

impl Transposition {
    pub fn moved_len(&self) -> usize {
        self.moved_end - self.moved_start
    }
}

/// Identity of an edit for matching and voting: the span and what it becomes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EditKey {
    pub start: usize,
    pub end: usize,
    pub replacement: String,
}

/// A typed replacement of a source span.
///
/// Word-order edits are stored as a rewrite of the smallest region covering
/// both halves of the move, so they behave like any other span edit for
/// overlap checks and matching, and additionally carry their [`Transposition`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpanEdit {
    start: usize,
    end: usize,
    replacement: String,
    etype: EditType,
    transposition: Option<Transposition>,
}

impl SpanEdit {
    /// Insert `replacement` before source position `at`.
    pub fn missing(at: usize, replacement: impl Into<String>) -> Result<Self> {
        let replacement = replacement.into();
        if replacement.is_empty() {
            return Err(Error::MalformedEditSet(format!(
                "missing edit at {at} has an empty replacement"
            )));
        }
        Ok(SpanEdit {
            start: at,
            end: at,
            replacement,
            etype: EditType::Missing,
            transposition: None,
        })
    }

    /// Delete `source[start..end]`.
    pub fn redundant(start: usize, end: usize) -> Result<Self> {
        if end <= start {
            return Err(Error::MalformedEditSet(format!(
                "redundant edit ({start},{end}) has an empty span"
            )));
        }
        Ok(SpanEdit {
            start,
            end,
            replacement: String::new(),
            etype: EditType::Redundant,
            transposition: None,
        })
    }

    pub fn substitution(start: usize, end: usize, replacement: impl Into<String>) -> Result<Self> {
        let replacement = replacement.into();
        if end <= start || replacement.is_empty() {
            return Err(Error::MalformedEditSet(format!(
                "substitution ({start},{end},{replacement:?}) needs a non-empty span and replacement"
            )));
        }
        Ok(SpanEdit {
            start,
            end,
            replacement,
            etype: EditType::Substitution,
            transposition: None,
        })
    }

    /// Move `source[moved_start..moved_end]` to just before `insert_at`.
    ///
    /// The resulting edit is canonical: the same textual move always yields
    /// the same transposition regardless of which side was described as moving.
    pub fn transposed(
        source: &[char],
        moved_start: usize,
        moved_end: usize,
        insert_at: usize,
    ) -> Result<Self> {
        if moved_end <= moved_start || moved_end > source.len() || insert_at > source.len() {
            return Err(Error::MalformedEditSet(format!(
                "transposition ({moved_start},{moved_end})->{insert_at} is out of range"
            )));
        }
        if insert_at >= moved_start && insert_at <= moved_end {
            return Err(Error::MalformedEditSet(format!(
                "transposition ({moved_start},{moved_end})->{insert_at} does not move anything"
            )));
        }
        let (start, end) = (moved_start.min(insert_at), moved_end.max(insert_at));
        let rewrite = transpose(source, moved_start, moved_end, insert_at);
        Self::word_order(source, start, end, rewrite.into_iter().collect::<String>())
    }

    /// Build a word-order edit from a region rewrite, recovering the move.
    ///
    /// The replacement must be a non-trivial rotation of `source[start..end]`.
    /// Among the moves producing it, the one moving the fewest code points
    /// wins, preferring a rightward move on ties.
    pub fn word_order(
        source: &[char],
        start: usize,
        end: usize,
        replacement: impl Into<String>,
    ) -> Result<Self> {
        let replacement = replacement.into();
        if end > source.len() || end < start + 2 {
            return Err(Error::MalformedEditSet(format!(
                "word-order edit ({start},{end}) needs a region of at least two characters"
            )));
        }
        let region = &source[start..end];
        let target: Vec<char> = replacement.chars().collect();
        let len = region.len();
        if target.len() != len {
            return Err(Error::MalformedEditSet(format!(
                "word-order replacement {replacement:?} is not a rotation of its span"
            )));
        }
        let mut best: Option<(usize, u8, Transposition)> = None;
        for k in 1..len {
            let rotated = region[k..].iter().chain(&region[..k]);
            if !rotated.eq(target.iter()) {
                continue;
            }
            let rightward = (
                k,
                0u8,
                Transposition {
                    moved_start: start,
                    moved_end: start + k,
                    insert_at: end,
                },
            );
            let leftward = (
                len - k,
                1u8,
                Transposition {
                    moved_start: start + k,
                    moved_end: end,
                    insert_at: start,
                },
            );
            for candidate in [rightward, leftward] {
                if best
                    .as_ref()
                    .is_none_or(|b| (candidate.0, candidate.1) < (b.0, b.1))
                {
                    best = Some(candidate);
                }
            }
        }
        let (_, _, transposition) = best.ok_or_else(|| {
            Error::MalformedEditSet(format!(
                "word-order replacement {replacement:?} is not a rotation of its span"
            ))
        })?;
        Ok(SpanEdit {
            start,
            end,
            replacement,
            etype: EditType::WordOrder,
            transposition: Some(transposition),
        })
    }

    /// Construct an edit of the given type. Word-order edits need the source
    /// to recover their move.
    pub fn typed(
        etype: EditType,
        start: usize,
        end: usize,
        replacement: impl Into<String>,
        source: &[char],
    ) -> Result<Self> {
        let replacement = replacement.into();
        let edit = match etype {
            EditType::Missing if start == end => Self::missing(start, replacement)?,
            EditType::Missing => {
                return Err(Error::MalformedEditSet(format!(
                    "missing edit ({start},{end}) must have an empty span"
                )))
            }
            EditType::Redundant if replacement.is_empty() => Self::redundant(start, end)?,
            EditType::Redundant => {
                return Err(Error::MalformedEditSet(format!(
                    "redundant edit ({start},{end}) must have an empty replacement"
                )))
            }
            EditType::Substitution => Self::substitution(start, end, replacement)?,
            EditType::WordOrder => Self::word_order(source, start, end, replacement)?,
        };
        Ok(edit)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn span_len(&self) -> usize {
        self.end - self.start
    }

    pub fn replacement(&self) -> &str {
        &self.replacement
    }

    pub fn etype(&self) -> EditType {
        self.etype
    }

    pub fn transposition(&self) -> Option<Transposition> {
        self.transposition
    }

    pub fn key(&self) -> EditKey {
        EditKey {
            start: self.start,
            end: self.end,
            replacement: self.replacement.clone(),
        }
    }

    /// True when the two edits cannot both be applied to one source.
    pub fn conflicts_with(&self, other: &SpanEdit) -> bool {
        if self.start == self.end && other.start == other.end {
            return self.start == other.start;
        }
        self.start < other.end && other.start < self.end
    }

    /// The code points that replace the span, re-derived from the move for
    /// word-order edits.
    fn rewrite(&self, source: &[char]) -> Vec<char> {
        match self.transposition {
            Some(t) => transpose(source, t.moved_start, t.moved_end, t.insert_at),
            None => self.replacement.chars().collect(),
        }
    }

    fn span_order(&self, other: &SpanEdit) -> Ordering {
        (self.start, self.end).cmp(&(other.start, other.end))
    }
}

impl fmt::Display for SpanEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({},{},{:?})",
            self.etype, self.start, self.end, self.replacement
        )
    }
}

/// Rewrite of the region spanned by a move: the moved block is deleted and
/// re-inserted at `insert_at`.
fn transpose(source: &[char], moved_start: usize, moved_end: usize, insert_at: usize) -> Vec<char> {
    let moved = &source[moved_start..moved_end];
    if insert_at > moved_end {
        source[moved_end..insert_at].iter().chain(moved).copied().collect()
    } else {
        moved.iter().chain(&source[insert_at..moved_start]).copied().collect()
    }
}

/// A source sentence with sorted, pairwise non-overlapping span edits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditSet {
    source: Vec<char>,
    edits: Vec<SpanEdit>,
}

impl EditSet {
    /// Sorts the edits by span and checks them against the source.
    pub fn new(source: Vec<char>, mut edits: Vec<SpanEdit>) -> Result<Self> {
        edits.sort_by(|a, b| a.span_order(b));
        let mut reach = 0usize;
        for (i, edit) in edits.iter().enumerate() {
            if edit.end > source.len() {
                return Err(Error::MalformedEditSet(format!(
                    "{edit} is beyond the source length {}",
                    source.len()
                )));
            }
            if let Some(t) = edit.transposition {
                let consistent = t.moved_start.min(t.insert_at) == edit.start
                    && t.moved_end.max(t.insert_at) == edit.end
                    && edit.rewrite(&source).into_iter().eq(edit.replacement.chars());
                if !consistent {
                    return Err(Error::MalformedEditSet(format!(
                        "{edit} does not match its transposition on this source"
                    )));
                }
            }
            if i > 0 && (edit.start < reach || edits[i - 1].conflicts_with(edit)) {
                return Err(Error::MalformedEditSet(format!(
                    "{} overlaps {edit}",
                    edits[i - 1]
                )));
            }
            reach = reach.max(edit.end);
        }
        Ok(EditSet { source, edits })
    }

    pub fn empty(source: Vec<char>) -> Self {
        EditSet {
            source,
            edits: Vec::new(),
        }
    }

    pub fn source(&self) -> &[char] {
        &self.source
    }

    pub fn source_string(&self) -> String {
        self.source.iter().collect()
    }

    pub fn edits(&self) -> &[SpanEdit] {
        &self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn into_edits(self) -> Vec<SpanEdit> {
        self.edits
    }

    /// The corrected sentence. Edits are applied right to left so earlier
    /// offsets stay valid.
    pub fn apply(&self) -> Vec<char> {
        let mut out = self.source.clone();
        for edit in self.edits.iter().rev() {
            out.splice(edit.start..edit.end, edit.rewrite(&self.source));
        }
        out
    }
}

/// Apply `edits` to `source`, rejecting overlapping or out-of-range spans.
pub fn apply_edits(source: &[char], edits: &[SpanEdit]) -> Result<Vec<char>> {
    Ok(EditSet::new(source.to_vec(), edits.to_vec())?.apply())
}

/// An identified source sentence with its gold references.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub source: String,
    pub references: Vec<String>,
}

impl SentenceRecord {
    /// Identical references are kept once, in order of first appearance.
    pub fn new(
        id: impl Into<String>,
        source: impl Into<String>,
        references: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let id = id.into();
        let mut unique: Vec<String> = Vec::new();
        for reference in references {
            if !unique.contains(&reference) {
                unique.push(reference);
            }
        }
        if unique.is_empty() {
            return Err(Error::InvalidInput(format!("sentence `{id}` has no references")));
        }
        Ok(SentenceRecord {
            id,
            source: source.into(),
            references: unique,
        })
    }

    /// True when at least one reference differs from the source.
    pub fn is_erroneous(&self) -> bool {
        self.references.iter().any(|r| *r != self.source)
    }
}

pub(crate) fn to_chars(s: &str) -> Vec<char> {
    s.chars().collect()
}
