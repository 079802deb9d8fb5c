//! On-disk formats: tab-separated corpora, char-indexed M2 files and
//! sentence split maps.
//!
//! Every format is UTF-8 with one record per line. Parse errors carry
//! 1-based line numbers.

mod m2;
mod split;
mod tsv;

pub use m2::{parse_m2, write_m2, M2Sentence};
pub use split::{merge_pieces, parse_split_maps, split_sentences, write_split_maps, Piece, SplitMap};
pub use tsv::{
    parse_hypotheses, parse_parallel_tsv, parse_sources, parse_submissions, write_hypotheses,
    write_parallel_tsv, HypothesisRecord, SourceRecord,
};

use std::io::BufRead;

use crate::error::{Error, Result};

/// Non-blank lines with their 1-based numbers. A trailing carriage return
/// is dropped.
pub(crate) fn numbered_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let number = i + 1;
        match line {
            Ok(mut line) => {
                if line.ends_with('\r') {
                    line.pop();
                }
                (!line.is_empty()).then_some(Ok((number, line)))
            }
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                Some(Err(Error::parse(number, "invalid UTF-8")))
            }
            Err(e) => Some(Err(e.into())),
        }
    })
}
