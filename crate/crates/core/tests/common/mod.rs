//! Reference implementations used as test oracles. Nothing here calls into
//! the alignment code under test.

#![allow(dead_code)]

/// Textbook two-row Levenshtein distance with unit costs.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Keep,
    Sub(char),
    Del,
    Ins(char),
}

/// Every minimum-cost alignment of `a` to `b`, as op sequences read left
/// to right. Exponential; only for short strings.
pub fn optimal_scripts(a: &[char], b: &[char]) -> Vec<Vec<Op>> {
    let (n, m) = (a.len(), b.len());
    // d[i][j] = distance between a[..i] and b[..j]
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=m {
            d[i][j] = if i == 0 {
                j
            } else if j == 0 {
                i
            } else {
                let diag = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
                diag.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1)
            };
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(a, b, &d, n, m, &mut path, &mut out);
    out
}

fn walk(
    a: &[char],
    b: &[char],
    d: &[Vec<usize>],
    i: usize,
    j: usize,
    path: &mut Vec<Op>,
    out: &mut Vec<Vec<Op>>,
) {
    if i == 0 && j == 0 {
        out.push(path.iter().rev().copied().collect());
        return;
    }
    if i > 0 && j > 0 {
        let same = a[i - 1] == b[j - 1];
        if d[i - 1][j - 1] + usize::from(!same) == d[i][j] {
            path.push(if same { Op::Keep } else { Op::Sub(b[j - 1]) });
            walk(a, b, d, i - 1, j - 1, path, out);
            path.pop();
        }
    }
    if i > 0 && d[i - 1][j] + 1 == d[i][j] {
        path.push(Op::Del);
        walk(a, b, d, i - 1, j, path, out);
        path.pop();
    }
    if j > 0 && d[i][j - 1] + 1 == d[i][j] {
        path.push(Op::Ins(b[j - 1]));
        walk(a, b, d, i, j - 1, path, out);
        path.pop();
    }
}

/// Number of maximal runs of consecutive identical non-keep op kinds.
pub fn runs(script: &[Op]) -> usize {
    let kind = |op: &Op| match op {
        Op::Keep => 0,
        Op::Sub(_) => 1,
        Op::Del => 2,
        Op::Ins(_) => 3,
    };
    let mut count = 0;
    let mut prev = 0;
    for op in script {
        let k = kind(op);
        if k != 0 && k != prev {
            count += 1;
        }
        prev = k;
    }
    count
}

/// Source positions deleted by a script.
pub fn deleted_positions(script: &[Op]) -> Vec<usize> {
    let mut pos = 0;
    let mut out = Vec::new();
    for op in script {
        match op {
            Op::Keep | Op::Sub(_) => pos += 1,
            Op::Del => {
                out.push(pos);
                pos += 1;
            }
            Op::Ins(_) => {}
        }
    }
    out
}

/// Apply span edits given as (start, end, replacement) by building the
/// output left to right.
pub fn splice(source: &[char], edits: &[(usize, usize, String)]) -> String {
    let mut sorted = edits.to_vec();
    sorted.sort();
    let mut out = String::new();
    let mut pos = 0;
    for (start, end, replacement) in sorted {
        out.extend(&source[pos..start]);
        out.push_str(&replacement);
        pos = end;
    }
    out.extend(&source[pos..]);
    out
}

/// P, R and F-beta straight from the definitions.
pub fn prf(tp: u64, fp: u64, fn_: u64, beta: f64) -> (f64, f64, f64) {
    let p = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
    let r = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
    let b2 = beta * beta;
    let f = if b2 * p + r == 0.0 { 0.0 } else { (1.0 + b2) * p * r / (b2 * p + r) };
    (p, r, f)
}

pub fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}
