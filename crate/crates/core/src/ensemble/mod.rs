//! Probability fusion, weighted averaging, the additive nudge, and
//! per-language thresholding.

mod thresholds;

use rayon::prelude::*;

use crate::data_model::{Language, ProbabilityColumn};
use crate::error::{invalid_arg, Error, Result};
use crate::util::lerp;

pub use thresholds::{EnsembleSpec, ThresholdTable, SHIPPED_LANGUAGE_THRESHOLDS};

pub const DEFAULT_FUSION_WEIGHT: f64 = 0.7;
pub const DEFAULT_NUDGE: f64 = 0.01;
pub const DEFAULT_GLOBAL_THRESHOLD: f64 = 0.55;

fn check_weight(name: &str, w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(invalid_arg!("{name} must be in [0, 1], got {w}"))
    }
}

/// `w·p_original + (1−w)·p_transliterated` per row.
pub fn fuse_translit(
    p_original: &ProbabilityColumn,
    p_transliterated: &ProbabilityColumn,
    w_original: f64,
) -> Result<ProbabilityColumn> {
    check_weight("fusion weight", w_original)?;
    p_original.check_same_ids(p_transliterated)?;
    let values: Vec<f64> = p_original
        .values()
        .par_iter()
        .zip(p_transliterated.values())
        .map(|(&a, &b)| lerp(a, b, w_original))
        .collect();
    p_original.with_values(format!("{}+translit", p_original.model_id), values)
}

/// Weighted mean of the member columns: `Σ wᵢpᵢ / Σ wᵢ`, summed in member
/// order, then clamped to the row's input range so float rounding cannot
/// push it outside the convex hull.
pub fn average_ensemble(columns: &[ProbabilityColumn], spec: &EnsembleSpec) -> Result<ProbabilityColumn> {
    let first = columns.first().ok_or_else(|| invalid_arg!("no probability columns to ensemble"))?;
    let mut ordered = Vec::with_capacity(spec.members().len());
    for (id, w) in spec.members() {
        let mut hits = columns.iter().filter(|c| &c.model_id == id);
        let col = hits
            .next()
            .ok_or_else(|| invalid_arg!("ensemble member {id:?} has no probability column"))?;
        if hits.next().is_some() {
            return Err(invalid_arg!("model id {id:?} supplied twice"));
        }
        col.check_same_ids(first)?;
        ordered.push((col.values(), *w));
    }
    if let Some(extra) = columns.iter().find(|c| !spec.members().iter().any(|(id, _)| id == &c.model_id)) {
        return Err(invalid_arg!("column {:?} is not an ensemble member", extra.model_id));
    }
    let total = if spec.normalize() { spec.total_weight() } else { 1.0 };
    let values: Vec<f64> = (0..first.len())
        .into_par_iter()
        .map(|i| {
            let (mut acc, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
            for &(vals, w) in &ordered {
                let p = vals[i];
                acc += w * p;
                if w > 0.0 {
                    lo = lo.min(p);
                    hi = hi.max(p);
                }
            }
            let mean = acc / total;
            if spec.normalize() {
                mean.clamp(lo, hi)
            } else {
                mean.clamp(0.0, 1.0)
            }
        })
        .collect();
    first.with_values("ensemble", values)
}

/// `min(p + delta, 1)` per row.
pub fn nudge(column: &ProbabilityColumn, delta: f64) -> Result<ProbabilityColumn> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(invalid_arg!("nudge delta must be a non-negative number, got {delta}"));
    }
    let values: Vec<f64> = column.values().par_iter().map(|&p| (p + delta).min(1.0)).collect();
    column.with_values(column.model_id.clone(), values)
}

/// 1 iff `p ≥ threshold(language)`.
pub fn apply_threshold(
    column: &ProbabilityColumn,
    languages: &[Language],
    thresholds: &ThresholdTable,
) -> Result<Vec<u8>> {
    if column.len() != languages.len() {
        return Err(Error::Alignment(format!(
            "{} probabilities but {} languages",
            column.len(),
            languages.len()
        )));
    }
    column
        .values()
        .par_iter()
        .zip(languages)
        .map(|(&p, &lang)| {
            let t = thresholds
                .threshold(lang)
                .ok_or_else(|| invalid_arg!("no threshold for {lang} and no global fallback"))?;
            Ok(u8::from(p >= t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(id: &str, v: &[f64]) -> ProbabilityColumn {
        let ids = (0..v.len()).map(|i| format!("r{i}")).collect();
        ProbabilityColumn::new(id, ids, v.to_vec()).unwrap()
    }

    #[test]
    fn fuse_examples() {
        let f = |a, b| fuse_translit(&col("o", &[a]), &col("t", &[b]), 0.7).unwrap().values()[0];
        assert_eq!(f(0.5, 0.5), 0.5);
        assert!((f(0.8, 0.6) - 0.74).abs() < 1e-15);
        assert_eq!(f(1.0, 0.0), 0.7);
        assert!(fuse_translit(&col("o", &[0.1]), &col("t", &[0.1]), 1.5).is_err());
        assert!(fuse_translit(&col("o", &[0.1]), &col("t", &[0.1, 0.2]), 0.7).is_err());
    }

    #[test]
    fn average_examples() {
        let cols = [col("a", &[0.2]), col("b", &[0.4]), col("c", &[0.6])];
        let spec = EnsembleSpec::equal(["a", "b", "c"]).unwrap();
        let out = average_ensemble(&cols, &spec).unwrap();
        assert!((out.values()[0] - 0.4).abs() < 1e-15);

        let one = EnsembleSpec::equal(["a"]).unwrap();
        assert_eq!(average_ensemble(&cols[..1], &one).unwrap().values(), &[0.2]);

        let unknown = EnsembleSpec::equal(["a", "zzz"]).unwrap();
        assert!(average_ensemble(&cols, &unknown).is_err());
        assert!(average_ensemble(&cols, &one).is_err());
    }

    #[test]
    fn nudge_examples() {
        let out = nudge(&col("m", &[0.5, 0.995, 0.2]), 0.01).unwrap();
        assert_eq!(out.values(), &[0.51, 1.0, 0.21000000000000002]);
        let same = nudge(&col("m", &[0.3]), 0.0).unwrap();
        assert_eq!(same.values(), &[0.3]);
        assert!(nudge(&col("m", &[0.3]), -0.1).is_err());
    }

    #[test]
    fn threshold_examples() {
        let table = ThresholdTable::shipped();
        let p = col("m", &[0.59, 0.54]);
        assert_eq!(apply_threshold(&p, &[Language::Marathi, Language::Hindi], &table).unwrap(), vec![0, 1]);

        let global = ThresholdTable::global_only(0.55).unwrap();
        assert_eq!(apply_threshold(&col("m", &[0.55]), &[Language::Tamil], &global).unwrap(), vec![1]);

        let partial = ThresholdTable::new(vec![(Language::Hindi, 0.5)], None).unwrap();
        assert!(apply_threshold(&col("m", &[0.5]), &[Language::Tamil], &partial).is_err());
    }
}
