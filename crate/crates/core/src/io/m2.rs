use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::edit::{to_chars, EditSet, EditType, SpanEdit};
use crate::error::{Error, Result};
use crate::io::numbered_lines;

const NONE: &str = "-NONE-";
const NOOP: &str = "noop";

/// One source sentence with the gold edits of each reference, in
/// annotator order. Offsets are code point indices into the raw source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M2Sentence {
    pub source: String,
    pub references: Vec<EditSet>,
}

impl M2Sentence {
    pub fn new(source: impl Into<String>, references: Vec<EditSet>) -> Result<Self> {
        let source = source.into();
        let chars = to_chars(&source);
        if references.is_empty() {
            return Err(Error::InvalidInput(format!("{source:?} has no references")));
        }
        if references.iter().any(|r| r.source() != chars.as_slice()) {
            return Err(Error::SourceMismatch(format!(
                "a reference edit set does not belong to {source:?}"
            )));
        }
        Ok(M2Sentence { source, references })
    }
}

pub fn write_m2<W: Write>(sentences: &[M2Sentence], mut writer: W) -> Result<()> {
    for sentence in sentences {
        writeln!(writer, "S {}", sentence.source)?;
        for (annotator, reference) in sentence.references.iter().enumerate() {
            if reference.is_empty() {
                writeln!(writer, "A -1 -1|||{NOOP}|||{NONE}|||REQUIRED|||{NONE}|||{annotator}")?;
            }
            for edit in reference.edits() {
                let replacement = match edit.replacement() {
                    "" => NONE,
                    r => r,
                };
                writeln!(
                    writer,
                    "A {} {}|||{}|||{}|||REQUIRED|||{NONE}|||{annotator}",
                    edit.start(),
                    edit.end(),
                    edit.etype(),
                    replacement
                )?;
            }
        }
        writeln!(writer)?;
    }
    Ok(())
}

struct Pending {
    line: usize,
    source: String,
    chars: Vec<char>,
    /// annotator -> (edits, saw a noop line)
    annotators: BTreeMap<usize, (Vec<SpanEdit>, bool)>,
}

impl Pending {
    fn finish(self) -> Result<M2Sentence> {
        let Pending {
            line,
            source,
            chars,
            annotators,
        } = self;
        if annotators.is_empty() {
            return Err(Error::parse(line, "sentence has no annotation lines"));
        }
        let mut references = Vec::with_capacity(annotators.len());
        for (expected, (annotator, (edits, noop))) in annotators.into_iter().enumerate() {
            if annotator != expected {
                return Err(Error::parse(
                    line,
                    format!("annotator {expected} is missing (found {annotator})"),
                ));
            }
            if noop && !edits.is_empty() {
                return Err(Error::parse(
                    line,
                    format!("annotator {annotator} has both a noop and edits"),
                ));
            }
            let set = EditSet::new(chars.clone(), edits)
                .map_err(|e| Error::parse(line, format!("annotator {annotator}: {e}")))?;
            references.push(set);
        }
        Ok(M2Sentence { source, references })
    }
}

/// Inverse of [`write_m2`].
pub fn parse_m2<R: BufRead>(reader: R) -> Result<Vec<M2Sentence>> {
    let mut sentences = Vec::new();
    let mut pending: Option<Pending> = None;
    for line in numbered_lines(reader) {
        let (number, line) = line?;
        if let Some(source) = line.strip_prefix("S ") {
            if let Some(p) = pending.take() {
                sentences.push(p.finish()?);
            }
            pending = Some(Pending {
                line: number,
                source: source.to_string(),
                chars: to_chars(source),
                annotators: BTreeMap::new(),
            });
        } else if let Some(body) = line.strip_prefix("A ") {
            let Some(p) = pending.as_mut() else {
                return Err(Error::parse(number, "annotation line before any source line"));
            };
            let (annotator, edit) = parse_annotation(body, &p.chars, number)?;
            let entry = p.annotators.entry(annotator).or_default();
            match edit {
                Some(edit) => entry.0.push(edit),
                None => entry.1 = true,
            }
        } else {
            return Err(Error::parse(number, "expected a line starting with `S ` or `A `"));
        }
    }
    if let Some(p) = pending {
        sentences.push(p.finish()?);
    }
    Ok(sentences)
}

/// Parse the part of an A-line after `A `. Returns `None` for a noop.
fn parse_annotation(body: &str, source: &[char], line: usize) -> Result<(usize, Option<SpanEdit>)> {
    let fields: Vec<&str> = body.split("|||").collect();
    let [span, etype, replacement, _, _, annotator] = fields.as_slice() else {
        return Err(Error::parse(
            line,
            format!("expected 6 `|||`-separated fields, found {}", fields.len()),
        ));
    };
    let annotator: usize = annotator
        .parse()
        .map_err(|_| Error::parse(line, format!("bad annotator index {annotator:?}")))?;
    let mut bounds = span.split(' ');
    let (Some(start), Some(end), None) = (bounds.next(), bounds.next(), bounds.next()) else {
        return Err(Error::parse(line, format!("bad span {span:?}")));
    };

    if *etype == NOOP {
        if (start, end) != ("-1", "-1") || *replacement != NONE {
            return Err(Error::parse(line, "noop annotation must be `-1 -1` with -NONE-"));
        }
        return Ok((annotator, None));
    }

    let index = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(line, format!("bad offset {s:?}")))
    };
    let (start, end) = (index(start)?, index(end)?);
    if start > end {
        return Err(Error::parse(line, format!("start {start} is after end {end}")));
    }
    if end > source.len() {
        return Err(Error::parse(
            line,
            format!("end {end} is beyond the source length {}", source.len()),
        ));
    }
    let etype = EditType::from_code(etype)
        .ok_or_else(|| Error::parse(line, format!("unknown edit type {etype:?}")))?;
    let replacement = if *replacement == NONE { "" } else { replacement };
    let edit = SpanEdit::typed(etype, start, end, replacement, source)
        .map_err(|e| Error::parse(line, e.to_string()))?;
    Ok((annotator, Some(edit)))
}
