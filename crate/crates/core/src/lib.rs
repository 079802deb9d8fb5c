//! Character-based evaluation and system combination for Chinese
//! grammatical error correction.
//!
//! Sentence pairs are turned into span-level edits by minimal edit distance
//! alignment ([`align`]); hypotheses are scored against multiple references
//! with F0.5 ([`score`]); several systems' outputs are combined by edit-wise
//! voting ([`ensemble`]); corpus statistics come from [`stats`]. File formats
//! live in [`io`] and the command-line front end in [`cli`].

pub mod align;
pub mod cli;
pub mod edit;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod metric;
pub mod score;
pub mod stats;

pub use align::{char_align, classify_spelling, detect_word_order, extract_edits, extract_edits_str, merge_edits, CharEdit};
pub use edit::{apply_edits, EditKey, EditSet, EditType, SentenceRecord, SpanEdit, Transposition};
pub use error::{Error, Result};
pub use metric::{f_beta, ScoreCounts, ScoreReport, Tally};
