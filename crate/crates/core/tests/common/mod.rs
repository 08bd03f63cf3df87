//! Independent reference implementations used as test oracles. They share
//! no code with the library beyond its public data types.

#![allow(dead_code)]

use indictox::data_model::{CommentRecord, Corpus, CorpusRole, Language};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- metric

/// Confusion counts (tp, fp, fn, tn) by direct enumeration.
pub fn confusion(preds: &[u8], labels: &[u8]) -> (u64, u64, u64, u64) {
    let mut c = (0, 0, 0, 0);
    for i in 0..preds.len() {
        match (preds[i] == 1, labels[i] == 1) {
            (true, true) => c.0 += 1,
            (true, false) => c.1 += 1,
            (false, true) => c.2 += 1,
            (false, false) => c.3 += 1,
        }
    }
    c
}

pub fn f1(tp: u64, fp: u64, fn_: u64) -> f64 {
    let d = 2 * tp + fp + fn_;
    if d == 0 {
        0.0
    } else {
        (2 * tp) as f64 / d as f64
    }
}

/// (mean, f1 abusive, f1 not-abusive); the not-abusive class swaps roles.
pub fn macro_f1(preds: &[u8], labels: &[u8]) -> (f64, f64, f64) {
    let (tp, fp, fn_, tn) = confusion(preds, labels);
    let a = f1(tp, fp, fn_);
    let b = f1(tn, fn_, fp);
    ((a + b) / 2.0, a, b)
}

/// Mean F1 as an exact fraction (numerator, denominator), 0/0 := 0.
pub fn macro_f1_exact(preds: &[u8], labels: &[u8]) -> (i128, i128) {
    let (tp, fp, fn_, tn) = confusion(preds, labels);
    let frac = |n: u64, d: u64| if d == 0 { (0i128, 1i128) } else { (n as i128, d as i128) };
    let (a, b) = frac(2 * tp, 2 * tp + fp + fn_);
    let (c, d) = frac(2 * tn, 2 * tn + fp + fn_);
    let (n, m) = (a * d + c * b, 2 * b * d);
    let g = gcd(n, m);
    (n / g, m / g)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs().max(1) } else { gcd(b, a % b) }
}

// ----------------------------------------------------------- calibration

/// Coarse grid in hundredths: 5, 10, …, 95; refine ±5 around the winner in
/// steps of 1, kept inside (0, 100). Highest exact mean F1, then closest to
/// 50, then smallest.
pub fn brute_force_threshold(probs: &[f64], labels: &[u8]) -> u32 {
    let pick = |cands: &[u32]| -> u32 {
        let mut best: Option<(u32, (i128, i128))> = None;
        for &c in cands {
            let t = c as f64 / 100.0;
            let preds: Vec<u8> = probs.iter().map(|&p| u8::from(p >= t)).collect();
            let s = macro_f1_exact(&preds, labels);
            let take = match best {
                None => true,
                Some((bc, bs)) => {
                    let lhs = s.0 * bs.1;
                    let rhs = bs.0 * s.1;
                    lhs > rhs || (lhs == rhs && (c.abs_diff(50), c) < (bc.abs_diff(50), bc))
                }
            };
            if take {
                best = Some((c, s));
            }
        }
        best.unwrap().0
    };
    let coarse: Vec<u32> = (1..20).map(|k| 5 * k).collect();
    let c = pick(&coarse);
    let refine: Vec<u32> = (c.saturating_sub(5)..=c + 5).filter(|&t| t > 0 && t < 100).collect();
    pick(&refine)
}

// ------------------------------------------------------------------ gbdt

#[derive(Debug, Clone, Copy)]
pub struct OracleSplit {
    pub feature: usize,
    pub split: f64,
    pub gain: f64,
}

/// Exhaustive search over every (feature, midpoint between consecutive
/// distinct values) for the first tree's root, gradients at the clipped
/// log-odds prior.
pub fn brute_force_root(rows: &[Vec<f64>], labels: &[u8], lambda: f64, min_child_weight: f64) -> Option<OracleSplit> {
    let n = rows.len();
    let pos = labels.iter().filter(|&&y| y == 1).count() as f64;
    let base = (pos / (n as f64 - pos)).ln().clamp(-10.0, 10.0);
    let p = 1.0 / (1.0 + (-base).exp());
    let g: Vec<f64> = labels.iter().map(|&y| p - y as f64).collect();
    let h = p * (1.0 - p);
    let score = |gs: f64, hs: f64| gs * gs / (hs + lambda);
    let mut best: Option<OracleSplit> = None;
    for f in 0..rows[0].len() {
        let mut vals: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        for w in vals.windows(2) {
            let split = (w[0] + w[1]) / 2.0;
            let (mut gl, mut hl, mut gr, mut hr) = (0.0, 0.0, 0.0, 0.0);
            for i in 0..n {
                if rows[i][f] < split {
                    gl += g[i];
                    hl += h;
                } else {
                    gr += g[i];
                    hr += h;
                }
            }
            if hl < min_child_weight || hr < min_child_weight {
                continue;
            }
            let gain = 0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr));
            if gain <= 0.0 {
                continue;
            }
            if best.is_none_or(|b| gain > b.gain + 1e-12 * b.gain.abs()) {
                best = Some(OracleSplit { feature: f, split, gain });
            }
        }
    }
    best
}

// ---------------------------------------------------------------- corpus

const TRICKY: &[&str] = &[
    "plain", "comma, inside", "quote \"here\"", "new\nline", "crlf\r\nline", "नमस्ते दोस्त", "😀 emoji",
    "  padded  ", "", "tab\tsep", "ಕನ್ನಡ", "a,\"b\",c", "ലോകം", "mixed नम hello",
];

pub fn random_record(rng: &mut ChaCha8Rng, i: usize, labeled: bool) -> CommentRecord {
    let parts = rng.random_range(1..4);
    let text: Vec<&str> = (0..parts).map(|_| TRICKY[rng.random_range(0..TRICKY.len())]).collect();
    CommentRecord {
        comment_id: format!("id{i}_{}", rng.random_range(0..1000)),
        text: text.join(" "),
        language: Language::ALL[rng.random_range(0..13)],
        post_index: rng.random_range(0..50),
        report_count_post: rng.random_range(0..1000),
        like_count_post: rng.random_range(0..100_000),
        report_count_comment: rng.random_range(0..20),
        like_count_comment: rng.random_range(0..500),
        label: labeled.then(|| rng.random_range(0..2)),
    }
}

pub fn random_corpus(rng: &mut ChaCha8Rng, n: usize, role: CorpusRole) -> Corpus {
    let labeled = role == CorpusRole::Train || rng.random_bool(0.5);
    let records = (0..n).map(|i| random_record(rng, i, labeled)).collect();
    Corpus::new(records, role).unwrap()
}
