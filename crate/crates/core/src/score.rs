//! Multi-reference scoring of hypothesis edits against gold edits.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::align::extract_edits;
use crate::edit::{to_chars, EditKey, EditSet, EditType, SentenceRecord};
use crate::error::{Error, Result};
use crate::metric::{check_beta, f_beta, prf, ScoreCounts, ScoreReport};

/// Gold references of one sentence, already turned into edit sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldSentence {
    pub id: String,
    pub references: Vec<EditSet>,
}

impl GoldSentence {
    pub fn from_record(record: &SentenceRecord) -> Self {
        let source = to_chars(&record.source);
        GoldSentence {
            id: record.id.clone(),
            references: record
                .references
                .iter()
                .map(|r| extract_edits(&source, &to_chars(r)))
                .collect(),
        }
    }
}

/// One system's edits for one sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub id: String,
    pub edits: EditSet,
}

impl Hypothesis {
    pub fn from_text(id: impl Into<String>, source: &str, hypothesis: &str) -> Self {
        Hypothesis {
            id: id.into(),
            edits: extract_edits(&to_chars(source), &to_chars(hypothesis)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentenceScore {
    pub sentence_id: String,
    pub chosen_ref_index: usize,
    pub counts: ScoreCounts,
    pub f_beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    pub overall: ScoreReport,
    pub per_type: BTreeMap<EditType, ScoreReport>,
    pub per_sentence: Vec<SentenceScore>,
}

/// Compare hypothesis edits with gold edits by (start, end, replacement).
///
/// True positives and false negatives are attributed to the gold edit's
/// type, false positives to the hypothesis edit's type.
pub fn match_edits(hyp: &EditSet, gold: &EditSet) -> Result<ScoreCounts> {
    if hyp.source() != gold.source() {
        return Err(Error::SourceMismatch(format!(
            "hypothesis source {:?} differs from gold source {:?}",
            hyp.source_string(),
            gold.source_string()
        )));
    }
    let hyp_keys: HashSet<EditKey> = hyp.edits().iter().map(|e| e.key()).collect();
    let gold_keys: HashSet<EditKey> = gold.edits().iter().map(|e| e.key()).collect();

    let mut counts = ScoreCounts::default();
    for edit in gold.edits() {
        if hyp_keys.contains(&edit.key()) {
            counts.add_tp(edit.etype());
        } else {
            counts.add_fn(edit.etype());
        }
    }
    for edit in hyp.edits() {
        if !gold_keys.contains(&edit.key()) {
            counts.add_fp(edit.etype());
        }
    }
    Ok(counts)
}

/// Score against every reference and keep the one with the highest F.
/// Ties go to more true positives, then fewer false positives, then the
/// earlier reference.
pub fn score_sentence(
    sentence_id: &str,
    hyp: &EditSet,
    refs: &[EditSet],
    beta: f64,
) -> Result<SentenceScore> {
    check_beta(beta)?;
    if refs.is_empty() {
        return Err(Error::InvalidInput(format!(
            "sentence `{sentence_id}` has no references"
        )));
    }
    let mut best: Option<SentenceScore> = None;
    for (index, reference) in refs.iter().enumerate() {
        let counts = match_edits(hyp, reference)?;
        let (_, _, f) = prf(counts.tally(), beta)?;
        let better = match &best {
            None => true,
            Some(b) => {
                f > b.f_beta
                    || (f == b.f_beta
                        && (counts.tp > b.counts.tp
                            || (counts.tp == b.counts.tp && counts.fp < b.counts.fp)))
            }
        };
        if better {
            best = Some(SentenceScore {
                sentence_id: sentence_id.to_string(),
                chosen_ref_index: index,
                counts,
                f_beta: f,
            });
        }
    }
    Ok(best.expect("at least one reference"))
}

/// Corpus-level scores from per-sentence best-reference counts.
pub fn score_corpus(hyps: &[Hypothesis], gold: &[GoldSentence], beta: f64) -> Result<CorpusReport> {
    score_with_cap(hyps, gold, None, beta)
}

/// [`score_corpus`] with each sentence limited to its first `max_refs`
/// references.
pub fn reference_ablation(
    hyps: &[Hypothesis],
    gold: &[GoldSentence],
    max_refs: usize,
    beta: f64,
) -> Result<CorpusReport> {
    if max_refs == 0 {
        return Err(Error::InvalidParameter("max_refs must be at least 1".into()));
    }
    score_with_cap(hyps, gold, Some(max_refs), beta)
}

fn score_with_cap(
    hyps: &[Hypothesis],
    gold: &[GoldSentence],
    max_refs: Option<usize>,
    beta: f64,
) -> Result<CorpusReport> {
    check_beta(beta)?;
    let by_id = align_by_id(hyps, gold)?;

    let per_sentence = gold
        .par_iter()
        .map(|g| {
            let hyp = &hyps[by_id[g.id.as_str()]];
            let cap = max_refs.unwrap_or(usize::MAX).min(g.references.len());
            score_sentence(&g.id, &hyp.edits, &g.references[..cap], beta)
        })
        .collect::<Result<Vec<_>>>()?;

    let total: ScoreCounts = per_sentence.iter().map(|s| &s.counts).sum();
    report_from_counts(total, per_sentence, beta)
}

fn report_from_counts(
    total: ScoreCounts,
    per_sentence: Vec<SentenceScore>,
    beta: f64,
) -> Result<CorpusReport> {
    let per_type = total
        .per_type
        .iter()
        .map(|(&etype, t)| {
            let counts = ScoreCounts::of_type(etype, t.tp, t.fp, t.fn_);
            Ok((etype, f_beta(&counts, beta)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(CorpusReport {
        overall: f_beta(&total, beta)?,
        per_type,
        per_sentence,
    })
}

/// Map each gold id to the index of its unique hypothesis.
fn align_by_id<'a>(hyps: &[Hypothesis], gold: &'a [GoldSentence]) -> Result<HashMap<&'a str, usize>> {
    let mut gold_ids = HashSet::new();
    for g in gold {
        if !gold_ids.insert(g.id.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate gold id `{}`", g.id)));
        }
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut duplicate = Vec::new();
    let mut unknown = Vec::new();
    for (i, h) in hyps.iter().enumerate() {
        if !gold_ids.contains(h.id.as_str()) {
            unknown.push(h.id.clone());
        } else if seen.contains_key(h.id.as_str()) {
            duplicate.push(h.id.clone());
        } else {
            seen.insert(h.id.as_str(), i);
        }
    }
    let missing: Vec<String> = gold
        .iter()
        .filter(|g| !seen.contains_key(g.id.as_str()))
        .map(|g| g.id.clone())
        .collect();
    if gold.is_empty() || !missing.is_empty() || !duplicate.is_empty() || !unknown.is_empty() {
        duplicate.dedup();
        return Err(Error::CorpusAlignment {
            missing,
            duplicate,
            unknown,
        });
    }
    Ok(gold
        .iter()
        .map(|g| (g.id.as_str(), seen[g.id.as_str()]))
        .collect())
}

/// One correction submitted by an annotator for a gold sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submission {
    pub annotator_id: String,
    pub sentence_id: String,
    pub correction: String,
}

/// Score every submission as an independent sample against the gold
/// references and pool the counts per annotator.
pub fn score_annotators(
    submissions: &[Submission],
    gold: &[SentenceRecord],
    beta: f64,
) -> Result<BTreeMap<String, ScoreReport>> {
    check_beta(beta)?;
    let records: HashMap<&str, &SentenceRecord> = gold.iter().map(|r| (r.id.as_str(), r)).collect();
    if let Some(s) = submissions
        .iter()
        .find(|s| !records.contains_key(s.sentence_id.as_str()))
    {
        return Err(Error::UnknownSentence(s.sentence_id.clone()));
    }

    let mut references: HashMap<&str, GoldSentence> = HashMap::new();
    for s in submissions {
        let id = s.sentence_id.as_str();
        references
            .entry(id)
            .or_insert_with(|| GoldSentence::from_record(records[id]));
    }

    let scored = submissions
        .par_iter()
        .map(|s| {
            let record = records[s.sentence_id.as_str()];
            let hyp = extract_edits(&to_chars(&record.source), &to_chars(&s.correction));
            let gold = &references[s.sentence_id.as_str()];
            score_sentence(&s.sentence_id, &hyp, &gold.references, beta)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pooled: BTreeMap<String, ScoreCounts> = BTreeMap::new();
    for (s, score) in submissions.iter().zip(&scored) {
        *pooled.entry(s.annotator_id.clone()).or_default() += &score.counts;
    }
    pooled
        .into_iter()
        .map(|(annotator, counts)| Ok((annotator, f_beta(&counts, beta)?)))
        .collect()
}

/// Unweighted mean of per-annotator F scores; 0 for no annotators.
pub fn mean_f_beta(reports: &BTreeMap<String, ScoreReport>) -> f64 {
    if reports.is_empty() {
        return 0.0;
    }
    reports.values().map(|r| r.f_beta).sum::<f64>() / reports.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::extract_edits_str;
    use crate::edit::SpanEdit;
    use crate::metric::Tally;

    const SRC: &str = "我不知道他何时返回回来。";
    const REF1: &str = "我不知道他何时返回。";
    const REF2: &str = "我不知道他何时回来。";

    fn set(source: &str, edits: Vec<SpanEdit>) -> EditSet {
        EditSet::new(to_chars(source), edits).unwrap()
    }

    #[test]
    fn match_identical_and_empty() {
        let gold = set(SRC, vec![SpanEdit::redundant(9, 11).unwrap()]);
        assert_eq!(match_edits(&gold, &gold).unwrap().tally(), Tally::new(1, 0, 0));
        let none = EditSet::empty(to_chars(SRC));
        assert_eq!(match_edits(&none, &gold).unwrap().tally(), Tally::new(0, 0, 1));
    }

    #[test]
    fn competing_references_do_not_match() {
        let hyp = set(SRC, vec![SpanEdit::redundant(7, 9).unwrap()]);
        let gold = set(SRC, vec![SpanEdit::redundant(9, 11).unwrap()]);
        let c = match_edits(&hyp, &gold).unwrap();
        assert_eq!(c.tally(), Tally::new(0, 1, 1));
        assert_eq!(c.per_type[&EditType::Redundant], Tally::new(0, 1, 1));
    }

    #[test]
    fn match_rejects_different_sources() {
        let a = EditSet::empty(to_chars("abc"));
        let b = EditSet::empty(to_chars("abd"));
        assert!(matches!(match_edits(&a, &b), Err(Error::SourceMismatch(_))));
    }

    #[test]
    fn fp_attributed_to_hypothesis_type() {
        let gold = set("abcd", vec![SpanEdit::redundant(1, 2).unwrap()]);
        let hyp = set("abcd", vec![SpanEdit::substitution(1, 2, "x").unwrap()]);
        let c = match_edits(&hyp, &gold).unwrap();
        assert_eq!(c.per_type[&EditType::Substitution], Tally::new(0, 1, 0));
        assert_eq!(c.per_type[&EditType::Redundant], Tally::new(0, 0, 1));
    }

    #[test]
    fn best_reference_is_chosen() {
        let refs = vec![extract_edits_str(SRC, REF1), extract_edits_str(SRC, REF2)];
        let hyp = extract_edits_str(SRC, REF2);
        let s = score_sentence("1", &hyp, &refs, 0.5).unwrap();
        assert_eq!(s.chosen_ref_index, 1);
        assert_eq!(s.f_beta, 1.0);
    }

    #[test]
    fn untouched_sentence_scores() {
        let refs = vec![extract_edits_str(SRC, REF1), extract_edits_str(SRC, REF2)];
        let hyp = EditSet::empty(to_chars(SRC));
        let s = score_sentence("1", &hyp, &refs, 0.5).unwrap();
        assert_eq!(s.counts.tally(), Tally::new(0, 0, 1));
        assert_eq!(s.f_beta, 0.0);

        let refs = vec![extract_edits_str(SRC, REF1), EditSet::empty(to_chars(SRC))];
        let s = score_sentence("1", &hyp, &refs, 0.5).unwrap();
        assert_eq!(s.chosen_ref_index, 1);
        assert_eq!(s.counts.tally(), Tally::new(0, 0, 0));
        assert_eq!(s.f_beta, 1.0);
    }

    #[test]
    fn ties_prefer_more_true_positives_then_fewer_false_positives() {
        // Both references give F = 0 for an empty hypothesis; the first wins.
        let refs = vec![extract_edits_str(SRC, REF1), extract_edits_str(SRC, REF2)];
        let hyp = EditSet::empty(to_chars(SRC));
        assert_eq!(score_sentence("1", &hyp, &refs, 0.5).unwrap().chosen_ref_index, 0);

        // Hypothesis with two edits: ref A matches one of them (tp 1, fp 1, fn 0),
        // ref B matches the same one but also needs another (tp 1, fp 1, fn 1).
        let src = "abcdef";
        let hyp = set(
            src,
            vec![SpanEdit::redundant(0, 1).unwrap(), SpanEdit::redundant(3, 4).unwrap()],
        );
        let a = set(src, vec![SpanEdit::redundant(0, 1).unwrap()]);
        let b = set(
            src,
            vec![SpanEdit::redundant(0, 1).unwrap(), SpanEdit::redundant(5, 6).unwrap()],
        );
        let s = score_sentence("x", &hyp, &[b, a], 0.5).unwrap();
        assert_eq!(s.chosen_ref_index, 1);
    }

    #[test]
    fn empty_reference_list_is_rejected() {
        let hyp = EditSet::empty(to_chars(SRC));
        assert!(matches!(score_sentence("1", &hyp, &[], 0.5), Err(Error::InvalidInput(_))));
    }

    fn gold(id: &str, source: &str, refs: &[&str]) -> GoldSentence {
        GoldSentence::from_record(
            &SentenceRecord::new(id, source, refs.iter().map(|r| r.to_string())).unwrap(),
        )
    }

    #[test]
    fn corpus_sums_sentence_counts() {
        // Sentence 1: exact match (1,0,0). Sentence 2: one right, one wrong, one missed (1,1,1).
        let g = vec![
            gold("1", SRC, &[REF1]),
            gold("2", "abcdefgh", &["bcdefgX"]),
        ];
        let hyps = vec![
            Hypothesis::from_text("1", SRC, REF1),
            Hypothesis::from_text("2", "abcdefgh", "bcdYfgh"),
        ];
        let r = score_corpus(&hyps, &g, 0.5).unwrap();
        assert_eq!(r.per_sentence[1].counts.tally(), Tally::new(1, 1, 1));
        assert_eq!(r.overall.counts.tally(), Tally::new(2, 1, 1));
        assert!((r.overall.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.overall.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.overall.f_beta - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn corpus_alignment_errors() {
        let g = vec![gold("1", SRC, &[REF1]), gold("2", "abc", &["abd"])];
        let err = score_corpus(&[Hypothesis::from_text("1", SRC, REF1)], &g, 0.5).unwrap_err();
        match err {
            Error::CorpusAlignment { missing, .. } => assert_eq!(missing, vec!["2"]),
            other => panic!("unexpected {other:?}"),
        }
        let hyps = vec![
            Hypothesis::from_text("1", SRC, REF1),
            Hypothesis::from_text("1", SRC, REF1),
            Hypothesis::from_text("2", "abc", "abd"),
        ];
        match score_corpus(&hyps, &g, 0.5).unwrap_err() {
            Error::CorpusAlignment { duplicate, .. } => assert_eq!(duplicate, vec!["1"]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            score_corpus(&[], &[], 0.5),
            Err(Error::CorpusAlignment { .. })
        ));
    }

    #[test]
    fn ablation_caps_references() {
        let g = vec![gold("1", SRC, &[REF1, REF2])];
        let hyps = vec![Hypothesis::from_text("1", SRC, REF2)];
        let full = score_corpus(&hyps, &g, 0.5).unwrap();
        assert_eq!(full.overall.f_beta, 1.0);
        assert_eq!(reference_ablation(&hyps, &g, 2, 0.5).unwrap(), full);
        let capped = reference_ablation(&hyps, &g, 1, 0.5).unwrap();
        assert_eq!(capped.overall.f_beta, 0.0);
        assert!(reference_ablation(&hyps, &g, 0, 0.5).is_err());
    }

    #[test]
    fn annotators_pool_counts() {
        let g = vec![
            SentenceRecord::new("1", SRC, vec![REF1.to_string()]).unwrap(),
            SentenceRecord::new("2", "abcdefgh", vec!["abcdefgX".to_string()]).unwrap(),
        ];
        let subs = vec![
            Submission {
                annotator_id: "a".into(),
                sentence_id: "1".into(),
                correction: REF1.into(),
            },
            Submission {
                annotator_id: "a".into(),
                sentence_id: "2".into(),
                correction: "abcdefgY".into(),
            },
            Submission {
                annotator_id: "b".into(),
                sentence_id: "2".into(),
                correction: "abcdefgX".into(),
            },
        ];
        let reports = score_annotators(&subs, &g, 0.5).unwrap();
        assert_eq!(reports["a"].counts.tally(), Tally::new(1, 1, 1));
        assert!((reports["a"].f_beta - 0.5).abs() < 1e-12);
        assert_eq!(reports["b"].f_beta, 1.0);
        assert!((mean_f_beta(&reports) - 0.75).abs() < 1e-12);

        let unknown = vec![Submission {
            annotator_id: "a".into(),
            sentence_id: "9".into(),
            correction: "x".into(),
        }];
        assert!(matches!(
            score_annotators(&unknown, &g, 0.5),
            Err(Error::UnknownSentence(id)) if id == "9"
        ));
    }
}
