use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{gbdt_fit, gbdt_predict, GbdtParams};
use crate::calibrate::mean_f1;
use crate::error::{invalid_arg, Result};
use crate::util::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub fold_of: Vec<usize>,
    /// Mean F1 of each fold's held-out rows at threshold 0.5.
    pub fold_mean_f1: Vec<f64>,
    pub oof: Vec<f64>,
}

impl CvResult {
    pub fn mean(&self) -> f64 {
        self.fold_mean_f1.iter().sum::<f64>() / self.fold_mean_f1.len() as f64
    }
}

/// Per class, rows are shuffled and dealt round-robin into `k` folds.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(invalid_arg!("need at least 2 folds, got {k}"));
    }
    let mut fold_of = vec![0; labels.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "cv-folds"));
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(invalid_arg!("{k} folds but class {class} has only {} rows", idx.len()));
        }
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            fold_of[i] = pos % k;
        }
    }
    Ok(fold_of)
}

/// Stratified k-fold training; every row gets an out-of-fold probability.
/// Fold `f` trains with seed `derive_seed(params.seed, "cv-fold-f")`.
pub fn gbdt_cv(rows: &[Vec<f64>], labels: &[u8], params: &GbdtParams, k: usize, seed: u64) -> Result<CvResult> {
    if rows.len() != labels.len() {
        return Err(invalid_arg!("{} feature rows but {} labels", rows.len(), labels.len()));
    }
    let fold_of = stratified_folds(labels, k, seed)?;
    let mut oof = vec![0.0; rows.len()];
    let mut fold_mean_f1 = Vec::with_capacity(k);
    for f in 0..k {
        let (train, test): (Vec<usize>, Vec<usize>) = (0..rows.len()).partition(|&i| fold_of[i] != f);
        let tr_rows: Vec<Vec<f64>> = train.iter().map(|&i| rows[i].clone()).collect();
        let tr_y: Vec<u8> = train.iter().map(|&i| labels[i]).collect();
        let te_rows: Vec<Vec<f64>> = test.iter().map(|&i| rows[i].clone()).collect();
        let te_y: Vec<u8> = test.iter().map(|&i| labels[i]).collect();
        let p = GbdtParams { seed: derive_seed(params.seed, &format!("cv-fold-{f}")), ..params.clone() };
        let model = gbdt_fit(&tr_rows, &tr_y, &p)?;
        let probs = gbdt_predict(&model, &te_rows)?;
        let preds: Vec<u8> = probs.iter().map(|&q| u8::from(q >= 0.5)).collect();
        fold_mean_f1.push(mean_f1(&preds, &te_y)?.mean_f1());
        for (&i, q) in test.iter().zip(probs) {
            oof[i] = q;
        }
    }
    Ok(CvResult { fold_of, fold_mean_f1, oof })
}
