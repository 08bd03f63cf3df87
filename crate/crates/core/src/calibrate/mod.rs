//! Mean-F1 evaluation and per-language threshold search.
//!
//! "Mean F1" is the unweighted mean of the F1 of the abusive and the
//! not-abusive class. A class with no true and no predicted members has
//! F1 = 0 (with a warning).

mod report;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data_model::{Corpus, Language, ProbabilityColumn};
use crate::ensemble::{apply_threshold, nudge, ThresholdTable};
use crate::error::{invalid_arg, Error, Result};

pub use report::{read_report, read_report_from};

/// Thresholds are searched on an integer grid of this many ticks per unit.
pub const TICKS: i64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn from_pairs(predictions: &[u8], labels: &[u8]) -> Self {
        let mut c = Confusion::default();
        for (&p, &y) in predictions.iter().zip(labels) {
            c.add(p, y);
        }
        c
    }

    pub fn add(&mut self, pred: u8, label: u8) {
        match (pred, label) {
            (1, 1) => self.tp += 1,
            (1, _) => self.fp += 1,
            (_, 1) => self.fn_ += 1,
            _ => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// (numerator, denominator) of F1 for the abusive class.
    fn f1_abusive_frac(&self) -> (u64, u64) {
        (2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }

    fn f1_not_frac(&self) -> (u64, u64) {
        (2 * self.tn, 2 * self.tn + self.fn_ + self.fp)
    }

    pub fn f1_abusive(&self) -> f64 {
        ratio(self.f1_abusive_frac())
    }

    pub fn f1_not_abusive(&self) -> f64 {
        ratio(self.f1_not_frac())
    }

    pub fn mean_f1(&self) -> f64 {
        (self.f1_abusive() + self.f1_not_abusive()) / 2.0
    }

    /// Exact comparison of mean F1 (no rounding).
    pub fn cmp_mean_f1(&self, other: &Confusion) -> Ordering {
        // a/b + c/d with 0/0 := 0, compared by cross multiplication.
        fn sum(c: &Confusion) -> (u128, u128) {
            let (a, b) = c.f1_abusive_frac();
            let (x, y) = c.f1_not_frac();
            let (a, b) = if b == 0 { (0, 1) } else { (a as u128, b as u128) };
            let (x, y) = if y == 0 { (0, 1) } else { (x as u128, y as u128) };
            (a * y + x * b, b * y)
        }
        let (n1, d1) = sum(self);
        let (n2, d2) = sum(other);
        (n1 * d2).cmp(&(n2 * d1))
    }

    fn has_empty_class(&self) -> bool {
        self.f1_abusive_frac().1 == 0 || self.f1_not_frac().1 == 0
    }
}

fn ratio((n, d): (u64, u64)) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub mean_f1: f64,
    pub f1_abusive: f64,
    pub f1_not_abusive: f64,
    pub confusion: Confusion,
}

impl ClassScores {
    fn from_confusion(confusion: Confusion) -> Self {
        ClassScores {
            mean_f1: confusion.mean_f1(),
            f1_abusive: confusion.f1_abusive(),
            f1_not_abusive: confusion.f1_not_abusive(),
            confusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub overall: ClassScores,
    pub per_language: BTreeMap<Language, ClassScores>,
}

impl EvalReport {
    pub fn mean_f1(&self) -> f64 {
        self.overall.mean_f1
    }
}

fn check_binary(name: &str, xs: &[u8]) -> Result<()> {
    match xs.iter().find(|&&x| x > 1) {
        Some(x) => Err(invalid_arg!("{name} contain non-binary value {x}")),
        None => Ok(()),
    }
}

/// Overall scores only.
pub fn mean_f1(predictions: &[u8], labels: &[u8]) -> Result<EvalReport> {
    if predictions.len() != labels.len() {
        return Err(Error::Alignment(format!(
            "{} predictions but {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(invalid_arg!("cannot score an empty prediction list"));
    }
    check_binary("predictions", predictions)?;
    check_binary("labels", labels)?;
    let confusion = Confusion::from_pairs(predictions, labels);
    if confusion.has_empty_class() {
        log::warn!("a class has no true and no predicted members; its F1 is taken as 0");
    }
    Ok(EvalReport { overall: ClassScores::from_confusion(confusion), per_language: BTreeMap::new() })
}

/// Overall scores plus a per-language breakdown.
pub fn evaluate_predictions(predictions: &[u8], labels: &[u8], languages: &[Language]) -> Result<EvalReport> {
    let mut report = mean_f1(predictions, labels)?;
    if languages.len() != labels.len() {
        return Err(Error::Alignment(format!("{} labels but {} languages", labels.len(), languages.len())));
    }
    let mut per: BTreeMap<Language, Confusion> = BTreeMap::new();
    for ((&p, &y), &l) in predictions.iter().zip(labels).zip(languages) {
        per.entry(l).or_default().add(p, y);
    }
    report.per_language = per.into_iter().map(|(l, c)| (l, ClassScores::from_confusion(c))).collect();
    Ok(report)
}

/// Scores `apply_threshold(nudge(probabilities, delta), languages, thresholds)`.
pub fn evaluate_pipeline(
    corpus: &Corpus,
    probabilities: &ProbabilityColumn,
    thresholds: &ThresholdTable,
    nudge_delta: f64,
) -> Result<EvalReport> {
    probabilities.check_aligned(corpus)?;
    let labels = corpus.labels()?;
    let languages = corpus.languages();
    let nudged = nudge(probabilities, nudge_delta)?;
    let preds = apply_threshold(&nudged, &languages, thresholds)?;
    evaluate_predictions(&preds, &labels, &languages)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSteps {
    pub grid_step: f64,
    pub refine_step: f64,
    pub global_fallback: f64,
}

impl Default for CalibrationSteps {
    fn default() -> Self {
        CalibrationSteps { grid_step: 0.05, refine_step: 0.01, global_fallback: 0.5 }
    }
}

fn to_ticks(name: &str, x: f64) -> Result<i64> {
    if !(x > 0.0 && x <= 0.5) {
        return Err(invalid_arg!("{name} must be in (0, 0.5], got {x}"));
    }
    let t = (x * TICKS as f64).round() as i64;
    if t == 0 {
        return Err(invalid_arg!("{name} {x} is below the 1e-9 grid resolution"));
    }
    Ok(t)
}

pub fn ticks_to_f64(t: i64) -> f64 {
    t as f64 / TICKS as f64
}

/// Coarse candidates `{g, 2g, …}` strictly below 1.
pub fn coarse_candidates(grid: i64) -> Vec<i64> {
    (1..).map(|k| k * grid).take_while(|&t| t <= TICKS - grid).collect()
}

/// Refinement candidates `c ± k·r` within `±g` of `c`, kept inside (0, 1).
pub fn refine_candidates(center: i64, grid: i64, refine: i64) -> Vec<i64> {
    let m = grid / refine;
    (-m..=m)
        .map(|k| center + k * refine)
        .filter(|&t| t > 0 && t < TICKS)
        .collect()
}

fn confusion_at(probs: &[f64], labels: &[u8], t: i64) -> Confusion {
    let thr = ticks_to_f64(t);
    let mut c = Confusion::default();
    for (&p, &y) in probs.iter().zip(labels) {
        c.add(u8::from(p >= thr), y);
    }
    c
}

/// Best threshold among `candidates`: highest mean F1, then closest to 0.5,
/// then smallest.
fn best_threshold(probs: &[f64], labels: &[u8], candidates: &[i64]) -> (i64, Confusion) {
    let half = TICKS / 2;
    let mut best: Option<(i64, Confusion)> = None;
    for &t in candidates {
        let c = confusion_at(probs, labels, t);
        let better = match &best {
            None => true,
            Some((bt, bc)) => match c.cmp_mean_f1(bc) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => ((t - half).abs(), t) < ((bt - half).abs(), *bt),
            },
        };
        if better {
            best = Some((t, c));
        }
    }
    best.expect("non-empty candidate set")
}

/// Threshold (in ticks) chosen for one language's rows.
pub fn calibrate_one(probs: &[f64], labels: &[u8], grid: i64, refine: i64) -> i64 {
    let (coarse, _) = best_threshold(probs, labels, &coarse_candidates(grid));
    best_threshold(probs, labels, &refine_candidates(coarse, grid, refine)).0
}

/// Independent per-language coarse-then-refine search. Languages with a
/// single class (or absent) fall back to `global_fallback`.
pub fn calibrate_thresholds(
    probabilities: &ProbabilityColumn,
    corpus: &Corpus,
    steps: &CalibrationSteps,
) -> Result<ThresholdTable> {
    probabilities.check_aligned(corpus)?;
    let grid = to_ticks("grid_step", steps.grid_step)?;
    let refine = to_ticks("refine_step", steps.refine_step)?;
    let labels = corpus.labels()?;
    let mut table = ThresholdTable::global_only(steps.global_fallback)?;

    let mut rows: BTreeMap<Language, (Vec<f64>, Vec<u8>)> = BTreeMap::new();
    for ((r, &p), &y) in corpus.records().iter().zip(probabilities.values()).zip(&labels) {
        let e = rows.entry(r.language).or_default();
        e.0.push(p);
        e.1.push(y);
    }
    let chosen: Vec<(Language, Option<i64>)> = rows
        .par_iter()
        .map(|(&lang, (p, y))| {
            let single = y.iter().all(|&v| v == y[0]);
            (lang, (!single).then(|| calibrate_one(p, y, grid, refine)))
        })
        .collect();
    for (lang, t) in chosen {
        match t {
            Some(t) => table.set_language(lang, ticks_to_f64(t))?,
            None => log::warn!("{lang}: single-class calibration rows, using the global fallback"),
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{CommentRecord, CorpusRole};

    #[test]
    fn worked_example() {
        let r = mean_f1(&[1, 1, 0, 0], &[1, 0, 0, 0]).unwrap();
        assert!((r.overall.f1_abusive - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.overall.f1_not_abusive - 0.8).abs() < 1e-15);
        assert!((r.mean_f1() - 0.733_333_333_333_333_3).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_all_wrong() {
        assert_eq!(mean_f1(&[1, 0, 1, 0], &[1, 0, 1, 0]).unwrap().mean_f1(), 1.0);
        assert_eq!(mean_f1(&[0, 1, 0, 1], &[1, 0, 1, 0]).unwrap().mean_f1(), 0.0);
        assert!(mean_f1(&[], &[]).is_err());
        assert!(mean_f1(&[1], &[1, 0]).is_err());
        assert!(mean_f1(&[2], &[1]).is_err());
    }

    #[test]
    fn exact_comparison_agrees_with_floats() {
        let a = Confusion { tp: 1, fp: 1, fn_: 0, tn: 2 };
        let b = Confusion { tp: 1, fp: 0, fn_: 1, tn: 2 };
        assert_eq!(a.cmp_mean_f1(&b), Ordering::Equal);
        let c = Confusion { tp: 2, fp: 0, fn_: 0, tn: 2 };
        assert_eq!(c.cmp_mean_f1(&a), Ordering::Greater);
    }

    fn corpus(labels: &[u8], lang: Language) -> Corpus {
        let recs = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| CommentRecord {
                comment_id: format!("r{i}"),
                text: String::new(),
                language: lang,
                post_index: 0,
                report_count_post: 0,
                like_count_post: 0,
                report_count_comment: 0,
                like_count_comment: 0,
                label: Some(y),
            })
            .collect();
        Corpus::new(recs, CorpusRole::Train).unwrap()
    }

    #[test]
    fn calibration_examples() {
        let c = corpus(&[0, 1, 1], Language::Tamil);
        let p = ProbabilityColumn::for_corpus("p", &c, vec![0.3, 0.6, 0.9]).unwrap();
        let t = calibrate_thresholds(&p, &c, &CalibrationSteps::default()).unwrap();
        assert_eq!(t.language(Language::Tamil), Some(0.5));
        assert_eq!(t.threshold(Language::Hindi), Some(0.5));

        let c = corpus(&[0, 1, 0, 1], Language::Hindi);
        let p = ProbabilityColumn::for_corpus("p", &c, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let t = calibrate_thresholds(&p, &c, &CalibrationSteps::default()).unwrap();
        assert_eq!(t.language(Language::Hindi), Some(0.5));

        let c = corpus(&[1, 1], Language::Odia);
        let p = ProbabilityColumn::for_corpus("p", &c, vec![0.2, 0.9]).unwrap();
        let t = calibrate_thresholds(&p, &c, &CalibrationSteps::default()).unwrap();
        assert_eq!(t.language(Language::Odia), None);
    }

    #[test]
    fn candidate_sets() {
        let g = coarse_candidates(50_000_000);
        assert_eq!(g.len(), 19);
        assert_eq!((g[0], g[18]), (50_000_000, 950_000_000));
        let r = refine_candidates(50_000_000, 50_000_000, 10_000_000);
        assert_eq!(r, vec![10_000_000, 20_000_000, 30_000_000, 40_000_000, 50_000_000,
                           60_000_000, 70_000_000, 80_000_000, 90_000_000, 100_000_000]);
        assert!(to_ticks("g", 0.0).is_err());
        assert!(to_ticks("g", 0.6).is_err());
    }

    #[test]
    fn evaluate_pipeline_examples() {
        let c = corpus(&[1, 0], Language::Hindi);
        let t = ThresholdTable::global_only(0.55).unwrap();
        let half = ProbabilityColumn::for_corpus("p", &c, vec![0.5, 0.5]).unwrap();
        let r = evaluate_pipeline(&c, &half, &t, 0.0).unwrap();
        assert_eq!((r.overall.confusion.tp, r.overall.confusion.fp), (0, 0));
        let near = ProbabilityColumn::for_corpus("p", &c, vec![0.545, 0.545]).unwrap();
        let r = evaluate_pipeline(&c, &near, &t, 0.01).unwrap();
        assert_eq!((r.overall.confusion.tp, r.overall.confusion.fp), (1, 1));
    }
}
