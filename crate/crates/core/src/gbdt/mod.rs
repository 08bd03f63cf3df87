//! Newton-boosted regression trees on logistic loss, used as the stacker,
//! plus two-model probability blending and stratified cross-validation.

mod cv;
mod io;
mod train;

use rayon::prelude::*;

use crate::error::{invalid_arg, Error, Result};
use crate::util::{lerp, sigmoid};

pub use cv::{gbdt_cv, stratified_folds, CvResult};
pub use io::{load_model, read_model_from, save_model, write_model_to};
pub use train::{gbdt_fit, gbdt_fit_with_report, split_gain, FitReport};

pub const DEFAULT_BLEND_WEIGHT: f64 = 0.6;

#[derive(Debug, Clone, PartialEq)]
pub struct GbdtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_child_weight: f64,
    pub lambda_l2: f64,
    pub subsample_rows: f64,
    pub seed: u64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            n_trees: 200,
            max_depth: 4,
            learning_rate: 0.1,
            min_child_weight: 1.0,
            lambda_l2: 1.0,
            subsample_rows: 1.0,
            seed: 0,
        }
    }
}

impl GbdtParams {
    /// Shallow, faster-learning preset.
    pub fn variant_a() -> Self {
        GbdtParams::default()
    }

    /// Deeper, slower, more regularized preset with row subsampling.
    pub fn variant_b() -> Self {
        GbdtParams {
            max_depth: 6,
            learning_rate: 0.05,
            lambda_l2: 3.0,
            subsample_rows: 0.8,
            ..GbdtParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 {
            return Err(invalid_arg!("max_depth must be positive"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(invalid_arg!("learning_rate must be positive"));
        }
        if !(self.min_child_weight.is_finite() && self.min_child_weight >= 0.0) {
            return Err(invalid_arg!("min_child_weight must be non-negative"));
        }
        if !(self.lambda_l2.is_finite() && self.lambda_l2 >= 0.0) {
            return Err(invalid_arg!("lambda_l2 must be non-negative"));
        }
        if !(self.subsample_rows > 0.0 && self.subsample_rows <= 1.0) {
            return Err(invalid_arg!("subsample_rows must be in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] < split` go left, the rest right.
    Split { feature: usize, split: f64, gain: f64, left: usize, right: usize },
    Leaf { weight: f64 },
}

/// Nodes stored in pre-order; index 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_weight(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { weight } => return weight,
                Node::Split { feature, split, left, right, .. } => {
                    i = if row[feature] < split { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub base_score: f64,
    pub n_features: usize,
    pub trees: Vec<Tree>,
    pub params: GbdtParams,
}

impl GbdtModel {
    /// `base_score + learning_rate · Σ leaf weights`.
    pub fn predict_margin(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.leaf_weight(row)).sum();
        self.base_score + self.params.learning_rate * sum
    }

    fn check_dims(&self, rows: &[Vec<f64>]) -> Result<()> {
        match rows.iter().position(|r| r.len() != self.n_features) {
            Some(i) => Err(Error::InvalidData(format!(
                "row {i} has {} features, model expects {}",
                rows[i].len(),
                self.n_features
            ))),
            None => Ok(()),
        }
    }
}

pub fn gbdt_predict(model: &GbdtModel, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    model.check_dims(rows)?;
    Ok(rows.par_iter().map(|r| sigmoid(model.predict_margin(r))).collect())
}

/// `w_a·p_a + (1−w_a)·p_b` per row.
pub fn blend(p_a: &[f64], p_b: &[f64], w_a: f64) -> Result<Vec<f64>> {
    if p_a.len() != p_b.len() {
        return Err(Error::Alignment(format!("blend inputs have {} and {} rows", p_a.len(), p_b.len())));
    }
    if !(0.0..=1.0).contains(&w_a) {
        return Err(invalid_arg!("blend weight must be in [0, 1], got {w_a}"));
    }
    Ok(p_a.iter().zip(p_b).map(|(&a, &b)| lerp(a, b, w_a)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blend_examples() {
        assert_eq!(blend(&[0.9], &[0.4], 0.6).unwrap(), vec![0.7]);
        assert_eq!(blend(&[0.3, 0.8], &[0.3, 0.8], 0.6).unwrap(), vec![0.3, 0.8]);
        assert_eq!(blend(&[0.123, 0.9], &[0.5, 0.1], 1.0).unwrap(), vec![0.123, 0.9]);
        assert!(blend(&[0.1], &[0.1, 0.2], 0.6).is_err());
        assert!(blend(&[0.1], &[0.1], 1.1).is_err());
    }

    #[test]
    fn presets() {
        let b = GbdtParams::variant_b();
        assert_eq!((b.max_depth, b.learning_rate, b.lambda_l2, b.subsample_rows), (6, 0.05, 3.0, 0.8));
        assert!(GbdtParams { max_depth: 0, ..GbdtParams::default() }.validate().is_err());
        assert!(GbdtParams { subsample_rows: 0.0, ..GbdtParams::default() }.validate().is_err());
    }
}
