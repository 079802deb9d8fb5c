//! Corpus statistics over gold references.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::align::extract_edits;
use crate::edit::{to_chars, EditType, SentenceRecord};
use crate::error::{Error, Result};

/// Reference-count buckets: 1, 2, 3, 4 and 5 or more.
pub const HISTOGRAM_LABELS: [&str; 5] = ["1", "2", "3", "4", ">=5"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusStats {
    pub n_sentences: usize,
    pub n_erroneous: usize,
    pub erroneous_proportion: f64,
    pub chars_per_sent: f64,
    pub edits_per_ref: f64,
    pub refs_per_sent: f64,
    /// Proportion of erroneous sentences per reference-count bucket; all
    /// zero when no sentence is erroneous.
    pub ref_count_histogram: [f64; 5],
    /// Share of each edit type among all gold edits; all zero when the
    /// references contain no edits.
    pub type_proportions: BTreeMap<EditType, f64>,
    pub n_edits: usize,
}

pub fn corpus_stats(records: &[SentenceRecord]) -> Result<CorpusStats> {
    if records.is_empty() {
        return Err(Error::InvalidInput("corpus statistics need at least one sentence".into()));
    }
    let per_sentence: Vec<Vec<Vec<EditType>>> = records
        .par_iter()
        .map(|r| {
            let source = to_chars(&r.source);
            r.references
                .iter()
                .map(|reference| {
                    extract_edits(&source, &to_chars(reference))
                        .edits()
                        .iter()
                        .map(|e| e.etype())
                        .collect()
                })
                .collect()
        })
        .collect();

    let n = records.len();
    let chars: usize = records.iter().map(|r| r.source.chars().count()).sum();
    let n_refs: usize = records.iter().map(|r| r.references.len()).sum();

    let mut type_counts: BTreeMap<EditType, usize> = EditType::ALL.iter().map(|&t| (t, 0)).collect();
    for etype in per_sentence.iter().flatten().flatten() {
        *type_counts.get_mut(etype).expect("all types present") += 1;
    }
    let n_edits: usize = type_counts.values().sum();

    let mut buckets = [0usize; 5];
    let mut n_erroneous = 0;
    for r in records.iter().filter(|r| r.is_erroneous()) {
        n_erroneous += 1;
        buckets[r.references.len().clamp(1, 5) - 1] += 1;
    }

    let share = |part: usize, whole: usize| {
        if whole == 0 {
            0.0
        } else {
            part as f64 / whole as f64
        }
    };
    Ok(CorpusStats {
        n_sentences: n,
        n_erroneous,
        erroneous_proportion: share(n_erroneous, n),
        chars_per_sent: share(chars, n),
        edits_per_ref: share(n_edits, n_refs),
        refs_per_sent: share(n_refs, n),
        ref_count_histogram: buckets.map(|b| share(b, n_erroneous)),
        type_proportions: type_counts
            .into_iter()
            .map(|(t, c)| (t, share(c, n_edits)))
            .collect(),
        n_edits,
    })
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentences\t{}", self.n_sentences)?;
        writeln!(
            f,
            "erroneous\t{} ({:.2}%)",
            self.n_erroneous,
            100.0 * self.erroneous_proportion
        )?;
        writeln!(f, "chars/sent\t{:.2}", self.chars_per_sent)?;
        writeln!(f, "edits/ref\t{:.2}", self.edits_per_ref)?;
        writeln!(f, "refs/sent\t{:.2}", self.refs_per_sent)?;
        write!(f, "refs histogram")?;
        for (label, p) in HISTOGRAM_LABELS.iter().zip(self.ref_count_histogram) {
            write!(f, "\t{label}: {:.2}%", 100.0 * p)?;
        }
        writeln!(f)?;
        write!(f, "edit types")?;
        for (etype, p) in &self.type_proportions {
            write!(f, "\t{etype}: {:.2}%", 100.0 * p)?;
        }
        writeln!(f)
    }
}
