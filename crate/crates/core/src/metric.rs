use std::collections::BTreeMap;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::edit::EditType;
use crate::error::{Error, Result};

/// True positive, false positive and false negative counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Tally {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Tally { tp, fp, fn_ }
    }
}

impl AddAssign for Tally {
    fn add_assign(&mut self, rhs: Tally) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
    }
}

/// Overall counts plus their breakdown by error type. The per-type map
/// always holds all four types.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScoreCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub per_type: BTreeMap<EditType, Tally>,
}

impl Default for ScoreCounts {
    fn default() -> Self {
        ScoreCounts {
            tp: 0,
            fp: 0,
            fn_: 0,
            per_type: EditType::ALL.iter().map(|&t| (t, Tally::default())).collect(),
        }
    }
}

impl ScoreCounts {
    /// Counts attributed entirely to one error type.
    pub fn of_type(etype: EditType, tp: u64, fp: u64, fn_: u64) -> Self {
        let mut counts = ScoreCounts {
            tp,
            fp,
            fn_,
            ..Default::default()
        };
        *counts.entry(etype) = Tally::new(tp, fp, fn_);
        counts
    }

    pub fn tally(&self) -> Tally {
        Tally::new(self.tp, self.fp, self.fn_)
    }

    pub fn add_tp(&mut self, etype: EditType) {
        self.tp += 1;
        self.entry(etype).tp += 1;
    }

    pub fn add_fp(&mut self, etype: EditType) {
        self.fp += 1;
        self.entry(etype).fp += 1;
    }

    pub fn add_fn(&mut self, etype: EditType) {
        self.fn_ += 1;
        self.entry(etype).fn_ += 1;
    }

    fn entry(&mut self, etype: EditType) -> &mut Tally {
        self.per_type.entry(etype).or_default()
    }
}

impl AddAssign<&ScoreCounts> for ScoreCounts {
    fn add_assign(&mut self, rhs: &ScoreCounts) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
        for (&etype, &tally) in &rhs.per_type {
            *self.entry(etype) += tally;
        }
    }
}

impl Add for ScoreCounts {
    type Output = ScoreCounts;

    fn add(mut self, rhs: ScoreCounts) -> ScoreCounts {
        self += &rhs;
        self
    }
}

impl<'a> Sum<&'a ScoreCounts> for ScoreCounts {
    fn sum<I: Iterator<Item = &'a ScoreCounts>>(iter: I) -> Self {
        iter.fold(ScoreCounts::default(), |mut acc, c| {
            acc += c;
            acc
        })
    }
}

/// Precision, recall and F-beta derived from a set of counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreReport {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    pub counts: ScoreCounts,
}

/// Compute P/R/F-beta. Empty denominators count as perfect, so a sentence
/// that needs no edits and receives none scores 1.0.
pub fn f_beta(counts: &ScoreCounts, beta: f64) -> Result<ScoreReport> {
    let (precision, recall, f) = prf(counts.tally(), beta)?;
    Ok(ScoreReport {
        precision,
        recall,
        f_beta: f,
        beta,
        counts: counts.clone(),
    })
}

/// P/R/F-beta for a bare tally.
pub fn prf(tally: Tally, beta: f64) -> Result<(f64, f64, f64)> {
    check_beta(beta)?;
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    let p = ratio(tally.tp, tally.tp + tally.fp);
    let r = ratio(tally.tp, tally.tp + tally.fn_);
    let b2 = beta * beta;
    let den = b2 * p + r;
    let f = if den > 0.0 { (1.0 + b2) * p * r / den } else { 0.0 };
    Ok((p, r, f))
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta must be a positive finite number, got {beta}"
        )))
    }
}
