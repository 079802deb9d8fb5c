use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::io::numbered_lines;

const TERMINATORS: &[char] = &['。', '！', '？', '；', '…'];
const CLOSERS: &[char] = &[
    '”', '’', '」', '』', '）', '】', '》', '〉', '〕', '］', '｝', ')', ']', '}',
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub text: String,
    /// Code point offset of the piece in the original sentence.
    pub offset: usize,
}

/// A sentence cut into pieces whose concatenation is the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMap {
    pub id: String,
    pub pieces: Vec<Piece>,
}

impl SplitMap {
    pub fn original(&self) -> String {
        self.pieces.iter().map(|p| p.text.as_str()).collect()
    }
}

/// Cut after each run of sentence-final punctuation, keeping any closing
/// quotes or brackets that follow it on the same piece.
pub fn split_sentences(id: impl Into<String>, source: &str) -> SplitMap {
    let chars: Vec<char> = source.chars().collect();
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if TERMINATORS.contains(&chars[i]) {
            i += 1;
            while i < chars.len() && (TERMINATORS.contains(&chars[i]) || CLOSERS.contains(&chars[i])) {
                i += 1;
            }
            pieces.push(piece(&chars, start, i));
            start = i;
        } else {
            i += 1;
        }
    }
    if start < chars.len() {
        pieces.push(piece(&chars, start, chars.len()));
    }
    SplitMap {
        id: id.into(),
        pieces,
    }
}

fn piece(chars: &[char], start: usize, end: usize) -> Piece {
    Piece {
        text: chars[start..end].iter().collect(),
        offset: start,
    }
}

/// Concatenate corrected pieces in order.
pub fn merge_pieces(split: &SplitMap, piece_outputs: &[String]) -> Result<String> {
    if piece_outputs.len() != split.pieces.len() {
        return Err(Error::InvalidInput(format!(
            "sentence `{}` has {} piece(s) but {} output(s) were given",
            split.id,
            split.pieces.len(),
            piece_outputs.len()
        )));
    }
    Ok(piece_outputs.concat())
}

/// One line per sentence: `id TAB source TAB offsets`, offsets
/// comma-separated (empty for an empty sentence).
pub fn write_split_maps<W: Write>(maps: &[SplitMap], mut writer: W) -> Result<()> {
    for map in maps {
        let offsets: Vec<String> = map.pieces.iter().map(|p| p.offset.to_string()).collect();
        writeln!(writer, "{}\t{}\t{}", map.id, map.original(), offsets.join(","))?;
    }
    Ok(())
}

pub fn parse_split_maps<R: BufRead>(reader: R) -> Result<Vec<SplitMap>> {
    numbered_lines(reader)
        .map(|line| {
            let (number, line) = line?;
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, source, offsets] = fields.as_slice() else {
                return Err(Error::parse(number, "expected id, source and offsets"));
            };
            let chars: Vec<char> = source.chars().collect();
            let offsets: Vec<usize> = if offsets.is_empty() {
                Vec::new()
            } else {
                offsets
                    .split(',')
                    .map(|o| {
                        o.parse()
                            .map_err(|_| Error::parse(number, format!("bad offset {o:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            let valid = match offsets.first() {
                None => chars.is_empty(),
                Some(&first) => {
                    first == 0
                        && offsets.windows(2).all(|w| w[0] < w[1])
                        && offsets.last().is_some_and(|&last| last < chars.len())
                }
            };
            if !valid {
                return Err(Error::parse(number, "offsets do not partition the sentence"));
            }
            let ends = offsets.iter().skip(1).copied().chain([chars.len()]);
            let pieces = offsets
                .iter()
                .zip(ends)
                .map(|(&start, end)| piece(&chars, start, end))
                .collect();
            Ok(SplitMap {
                id: id.to_string(),
                pieces,
            })
        })
        .collect()
}
