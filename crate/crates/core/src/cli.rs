//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for parse or validation errors, 2 for usage
//! errors. Diagnostics go to the error stream.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::align::extract_edits;
use crate::edit::{to_chars, EditType, SentenceRecord};
use crate::ensemble::combine;
use crate::error::{Error, Result};
use crate::io::{
    merge_pieces, parse_hypotheses, parse_m2, parse_parallel_tsv, parse_sources, parse_split_maps,
    parse_submissions, split_sentences, write_hypotheses, write_m2, write_split_maps,
    HypothesisRecord, M2Sentence, SplitMap,
};
use crate::metric::{ScoreReport, Tally};
use crate::score::{mean_f_beta, reference_ablation, score_annotators, score_corpus, GoldSentence, Hypothesis};
use crate::stats::corpus_stats;

#[derive(Debug, Parser)]
#[command(
    name = "cgec",
    version,
    about = "Character-based edit extraction, scoring and ensembling for Chinese GEC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract gold edits from a parallel TSV corpus into an M2 file.
    Extract {
        /// Lines of `id TAB source TAB ref1 [TAB ref2 ...]`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score hypotheses against gold M2 edits.
    Score {
        /// Lines of `id TAB source TAB hypothesis`, in the same order as the M2 file.
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        /// Only consider the first K references of each sentence.
        #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
        max_refs: Option<u64>,
        /// Also report scores for each error type.
        #[arg(long)]
        per_type: bool,
        #[arg(long)]
        json: bool,
    },
    /// Combine several systems' hypotheses by edit-wise voting.
    Ensemble {
        /// Lines of `id TAB source [TAB ...]`.
        #[arg(long)]
        source: PathBuf,
        /// Hypothesis files (`id TAB source TAB hypothesis`), one per system.
        #[arg(long, required = true, num_args = 1..)]
        hyp: Vec<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Corpus statistics of a parallel TSV corpus.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Score annotator submissions against gold M2 references.
    Annotators {
        /// Lines of `annotator_id TAB sentence_id TAB correction`; sentence
        /// ids are 1-based positions in the M2 file.
        #[arg(long)]
        subs: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long)]
        json: bool,
    },
    /// Split sentences at sentence-final punctuation.
    Split {
        /// Lines of `id TAB source [TAB ...]`.
        #[arg(long)]
        input: PathBuf,
        /// Split map (`id TAB source TAB offsets`).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write every piece on its own line, for feeding to a system.
        #[arg(long)]
        pieces: Option<PathBuf>,
    },
    /// Reassemble corrected pieces into hypotheses.
    Merge {
        #[arg(long)]
        splitmap: PathBuf,
        /// One corrected piece per line, in split map order.
        #[arg(long)]
        pieces: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                2
            } else {
                let _ = write!(out, "{rendered}");
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Extract { input, output } => {
            let records = parse_parallel_tsv(open(&input)?)?;
            let sentences = records
                .par_iter()
                .map(|r| {
                    let gold = GoldSentence::from_record(r);
                    M2Sentence::new(r.source.clone(), gold.references)
                })
                .collect::<Result<Vec<_>>>()?;
            emit(output.as_deref(), out, |w| write_m2(&sentences, w))
        }
        Command::Score {
            hyp,
            gold,
            beta,
            max_refs,
            per_type,
            json,
        } => {
            let hyps = parse_hypotheses(open(&hyp)?)?;
            let m2 = parse_m2(open(&gold)?)?;
            let (hyps, gold) = pair_with_gold(&hyps, m2)?;
            let report = match max_refs {
                Some(k) => reference_ablation(&hyps, &gold, k as usize, beta)?,
                None => score_corpus(&hyps, &gold, beta)?,
            };
            let summary = ScoreSummary {
                overall: Row::from(&report.overall),
                per_type: per_type.then(|| {
                    report
                        .per_type
                        .iter()
                        .map(|(&t, r)| (t, Row::from(r)))
                        .collect()
                }),
                beta,
                max_refs,
            };
            if json {
                write_json(out, &summary)
            } else {
                write_score_text(out, &summary)
            }
        }
        Command::Ensemble {
            source,
            hyp,
            output,
        } => {
            let sources = parse_sources(open(&source)?)?;
            let systems = hyp
                .iter()
                .map(|path| index_hypotheses(parse_hypotheses(open(path)?)?))
                .collect::<Result<Vec<_>>>()?;
            check_coverage(&sources.iter().map(|s| s.id.clone()).collect::<Vec<_>>(), &systems)?;
            let combined = sources
                .par_iter()
                .map(|s| {
                    let outputs = systems
                        .iter()
                        .map(|system| {
                            let h = &system[&s.id];
                            if h.source != s.source {
                                return Err(Error::SourceMismatch(format!(
                                    "sentence `{}`: hypothesis source {:?} differs from {:?}",
                                    s.id, h.source, s.source
                                )));
                            }
                            Ok(h.hypothesis.clone())
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(HypothesisRecord {
                        id: s.id.clone(),
                        source: s.source.clone(),
                        hypothesis: combine(&s.source, &outputs)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(output.as_deref(), out, |w| write_hypotheses(&combined, w))
        }
        Command::Stats { input, json } => {
            let records = parse_parallel_tsv(open(&input)?)?;
            let stats = corpus_stats(&records)?;
            if json {
                write_json(out, &stats)
            } else {
                write!(out, "{stats}")?;
                Ok(())
            }
        }
        Command::Annotators {
            subs,
            gold,
            beta,
            json,
        } => {
            let submissions = parse_submissions(open(&subs)?)?;
            let records = parse_m2(open(&gold)?)?
                .into_iter()
                .enumerate()
                .map(|(i, s)| {
                    let refs = s.references.iter().map(|r| r.apply().into_iter().collect());
                    SentenceRecord::new((i + 1).to_string(), s.source, refs)
                })
                .collect::<Result<Vec<_>>>()?;
            let reports = score_annotators(&submissions, &records, beta)?;
            let summary = AnnotatorSummary {
                annotators: reports.iter().map(|(a, r)| (a.clone(), Row::from(r))).collect(),
                mean_f_beta: mean_f_beta(&reports),
                beta,
            };
            if json {
                write_json(out, &summary)
            } else {
                let label = f_label(beta);
                writeln!(out, "annotator\tTP\tFP\tFN\tP\tR\t{label}")?;
                for (annotator, row) in &summary.annotators {
                    writeln!(
                        out,
                        "{annotator}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
                        row.tp, row.fp, row.fn_, row.precision, row.recall, row.f_beta
                    )?;
                }
                writeln!(out, "mean {label} {:.4}", summary.mean_f_beta)?;
                Ok(())
            }
        }
        Command::Split {
            input,
            output,
            pieces,
        } => {
            let maps: Vec<SplitMap> = parse_sources(open(&input)?)?
                .iter()
                .map(|s| split_sentences(s.id.clone(), &s.source))
                .collect();
            if let Some(path) = pieces {
                let mut w = create(&path)?;
                for piece in maps.iter().flat_map(|m| &m.pieces) {
                    writeln!(w, "{}", piece.text)?;
                }
                w.flush()?;
            }
            emit(output.as_deref(), out, |w| write_split_maps(&maps, w))
        }
        Command::Merge {
            splitmap,
            pieces,
            output,
        } => {
            let maps = parse_split_maps(open(&splitmap)?)?;
            let mut text = String::new();
            open(&pieces)?.read_to_string(&mut text)?;
            let lines = piece_lines(&text);
            let needed: usize = maps.iter().map(|m| m.pieces.len()).sum();
            if lines.len() != needed {
                return Err(Error::InvalidInput(format!(
                    "split map has {needed} piece(s) but the pieces file has {} line(s)",
                    lines.len()
                )));
            }
            let mut rest = lines.as_slice();
            let mut merged = Vec::with_capacity(maps.len());
            for map in &maps {
                let (mine, tail) = rest.split_at(map.pieces.len());
                rest = tail;
                merged.push(HypothesisRecord {
                    id: map.id.clone(),
                    source: map.original(),
                    hypothesis: merge_pieces(map, mine)?,
                });
            }
            emit(output.as_deref(), out, |w| write_hypotheses(&merged, w))
        }
    }
}

/// Pair hypotheses with M2 sentences by position. Sources must agree and
/// the hypothesis ids name the sentences.
fn pair_with_gold(hyps: &[HypothesisRecord], m2: Vec<M2Sentence>) -> Result<(Vec<Hypothesis>, Vec<GoldSentence>)> {
    let mut seen = HashSet::new();
    let duplicate: Vec<String> = hyps
        .iter()
        .filter(|h| !seen.insert(h.id.as_str()))
        .map(|h| h.id.clone())
        .collect();
    if hyps.len() != m2.len() || !duplicate.is_empty() {
        let missing = (hyps.len() + 1..=m2.len()).map(|i| format!("#{i}")).collect();
        let unknown = hyps.iter().skip(m2.len()).map(|h| h.id.clone()).collect();
        return Err(Error::CorpusAlignment {
            missing,
            duplicate,
            unknown,
        });
    }
    let mut gold = Vec::with_capacity(m2.len());
    for (h, sentence) in hyps.iter().zip(m2) {
        if h.source != sentence.source {
            return Err(Error::SourceMismatch(format!(
                "hypothesis `{}` has source {:?} but the gold sentence at that position is {:?}",
                h.id, h.source, sentence.source
            )));
        }
        gold.push(GoldSentence {
            id: h.id.clone(),
            references: sentence.references,
        });
    }
    let hyps = hyps
        .par_iter()
        .map(|h| Hypothesis {
            id: h.id.clone(),
            edits: extract_edits(&to_chars(&h.source), &to_chars(&h.hypothesis)),
        })
        .collect();
    Ok((hyps, gold))
}

fn index_hypotheses(records: Vec<HypothesisRecord>) -> Result<HashMap<String, HypothesisRecord>> {
    let mut index = HashMap::with_capacity(records.len());
    let mut duplicate = Vec::new();
    for r in records {
        if index.contains_key(&r.id) {
            duplicate.push(r.id.clone());
        } else {
            index.insert(r.id.clone(), r);
        }
    }
    if !duplicate.is_empty() {
        return Err(Error::CorpusAlignment {
            missing: Vec::new(),
            duplicate,
            unknown: Vec::new(),
        });
    }
    Ok(index)
}

fn check_coverage(ids: &[String], systems: &[HashMap<String, HypothesisRecord>]) -> Result<()> {
    let known: HashSet<&str> = ids.iter().map(String::as_str).collect();
    let mut missing = BTreeMap::new();
    let mut unknown = BTreeMap::new();
    for system in systems {
        for id in ids.iter().filter(|id| !system.contains_key(*id)) {
            missing.insert(id.clone(), ());
        }
        for id in system.keys().filter(|id| !known.contains(id.as_str())) {
            unknown.insert(id.clone(), ());
        }
    }
    if missing.is_empty() && unknown.is_empty() {
        return Ok(());
    }
    Err(Error::CorpusAlignment {
        missing: missing.into_keys().collect(),
        duplicate: Vec::new(),
        unknown: unknown.into_keys().collect(),
    })
}

/// Lines of a pieces file; a final newline does not start another piece.
fn piece_lines(text: &str) -> Vec<String> {
    if text.is_empty() {
        return Vec::new();
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect()
}

#[derive(Debug, Serialize)]
struct Row {
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    precision: f64,
    recall: f64,
    f_beta: f64,
}

impl From<&ScoreReport> for Row {
    fn from(r: &ScoreReport) -> Self {
        let Tally { tp, fp, fn_ } = r.counts.tally();
        Row {
            tp,
            fp,
            fn_,
            precision: r.precision,
            recall: r.recall,
            f_beta: r.f_beta,
        }
    }
}

#[derive(Debug, Serialize)]
struct ScoreSummary {
    overall: Row,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_type: Option<BTreeMap<EditType, Row>>,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_refs: Option<u64>,
}

#[derive(Debug, Serialize)]
struct AnnotatorSummary {
    annotators: BTreeMap<String, Row>,
    mean_f_beta: f64,
    beta: f64,
}

fn f_label(beta: f64) -> String {
    format!("F{beta}")
}

fn write_score_text(out: &mut dyn Write, summary: &ScoreSummary) -> Result<()> {
    let o = &summary.overall;
    let label = f_label(summary.beta);
    writeln!(out, "TP {} FP {} FN {}", o.tp, o.fp, o.fn_)?;
    writeln!(
        out,
        "P {:.4} R {:.4} {label} {:.4}",
        o.precision, o.recall, o.f_beta
    )?;
    if let Some(per_type) = &summary.per_type {
        writeln!(out, "type\tTP\tFP\tFN\tP\tR\t{label}")?;
        for (etype, row) in per_type {
            writeln!(
                out,
                "{etype}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}",
                row.tp,
                row.fp,
                row.fn_,
                100.0 * row.precision,
                100.0 * row.recall,
                100.0 * row.f_beta
            )?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(
    path: Option<&Path>,
    out: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(path) => {
            let mut w = create(path)?;
            write(&mut w)?;
            w.flush()?;
        }
        None => write(out)?,
    }
    Ok(())
}
