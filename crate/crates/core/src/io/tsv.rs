use std::collections::HashSet;
use std::io::{BufRead, Write};

use crate::edit::SentenceRecord;
use crate::error::{Error, Result};
use crate::io::numbered_lines;
use crate::score::Submission;

/// `id TAB source TAB ref1 [TAB ref2 ...]`, one sentence per line.
pub fn parse_parallel_tsv<R: BufRead>(reader: R) -> Result<Vec<SentenceRecord>> {
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for line in numbered_lines(reader) {
        let (number, line) = line?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(Error::parse(
                number,
                format!("expected id, source and at least one reference, found {} field(s)", fields.len()),
            ));
        }
        let id = fields[0];
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId {
                line: number,
                id: id.to_string(),
            });
        }
        let references = fields[2..].iter().map(|r| r.to_string());
        records.push(SentenceRecord::new(id, fields[1], references)?);
    }
    Ok(records)
}

pub fn write_parallel_tsv<W: Write>(records: &[SentenceRecord], mut writer: W) -> Result<()> {
    for r in records {
        write!(writer, "{}\t{}", r.id, r.source)?;
        for reference in &r.references {
            write!(writer, "\t{reference}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// A system's correction of one source sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisRecord {
    pub id: String,
    pub source: String,
    pub hypothesis: String,
}

/// `id TAB source TAB hypothesis`. An empty hypothesis is legal.
pub fn parse_hypotheses<R: BufRead>(reader: R) -> Result<Vec<HypothesisRecord>> {
    numbered_lines(reader)
        .map(|line| {
            let (number, line) = line?;
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [id, source, hypothesis] => Ok(HypothesisRecord {
                    id: id.to_string(),
                    source: source.to_string(),
                    hypothesis: hypothesis.to_string(),
                }),
                _ => Err(Error::parse(
                    number,
                    format!("expected id, source and hypothesis, found {} field(s)", fields.len()),
                )),
            }
        })
        .collect()
}

pub fn write_hypotheses<W: Write>(records: &[HypothesisRecord], mut writer: W) -> Result<()> {
    for r in records {
        writeln!(writer, "{}\t{}\t{}", r.id, r.source, r.hypothesis)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceRecord {
    pub id: String,
    pub source: String,
}

/// `id TAB source [TAB ...]`; columns past the source are ignored, so a
/// parallel corpus works as a source file.
pub fn parse_sources<R: BufRead>(reader: R) -> Result<Vec<SourceRecord>> {
    let mut seen = HashSet::new();
    numbered_lines(reader)
        .map(|line| {
            let (number, line) = line?;
            let mut fields = line.split('\t');
            let (Some(id), Some(source)) = (fields.next(), fields.next()) else {
                return Err(Error::parse(number, "expected id and source"));
            };
            if !seen.insert(id.to_string()) {
                return Err(Error::DuplicateId {
                    line: number,
                    id: id.to_string(),
                });
            }
            Ok(SourceRecord {
                id: id.to_string(),
                source: source.to_string(),
            })
        })
        .collect()
}

/// `annotator_id TAB sentence_id TAB correction`.
pub fn parse_submissions<R: BufRead>(reader: R) -> Result<Vec<Submission>> {
    numbered_lines(reader)
        .map(|line| {
            let (number, line) = line?;
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [annotator, sentence, correction] => Ok(Submission {
                    annotator_id: annotator.to_string(),
                    sentence_id: sentence.to_string(),
                    correction: correction.to_string(),
                }),
                _ => Err(Error::parse(
                    number,
                    format!(
                        "expected annotator id, sentence id and correction, found {} field(s)",
                        fields.len()
                    ),
                )),
            }
        })
        .collect()
}
