//! Hashed character n-gram logistic regression.
//!
//! Stands in for the large pretrained classifiers so the pipeline can run
//! end to end without external probability files.
//!
//! Features: every character n-gram (`n_min..=n_max` Unicode scalars) of
//! `strip_emoji(text)`, padded with one space on each side. Each n-gram is
//! hashed with FNV-1a 64 seeded by `FNV_OFFSET ^ mix64(seed)` and then passed
//! through `mix64`; the low bits pick the bucket, bit 63 picks the sign. Each
//! document vector is scaled to unit L2 norm before bucketing collisions
//! (i.e. every n-gram occurrence contributes `±1/sqrt(count)`).

mod io;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data_model::{Corpus, ProbabilityColumn};
use crate::error::{invalid_arg, Result};
use crate::translit::strip_emoji;
use crate::util::{derive_seed, fnv1a64_from, mix64, sigmoid, FNV_OFFSET};

pub use io::{load_model, read_model_from, save_model, write_model_to, NGLM_MAGIC, NGLM_VERSION};

pub const L2_PENALTY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineParams {
    pub n_min: usize,
    pub n_max: usize,
    pub hash_bits: u32,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            n_min: 3,
            n_max: 5,
            hash_bits: 18,
            epochs: 5,
            learning_rate: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramLinearModel {
    pub n_min: usize,
    pub n_max: usize,
    pub hash_dim: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub seed: u64,
}

/// Sparse document vector: (bucket, signed value) in n-gram order.
pub type SparseVec = Vec<(u32, f64)>;

impl NgramLinearModel {
    pub fn zeros(n_min: usize, n_max: usize, hash_dim: usize, seed: u64) -> Result<Self> {
        check_shape(n_min, n_max, hash_dim)?;
        Ok(NgramLinearModel {
            n_min,
            n_max,
            hash_dim,
            weights: vec![0.0; hash_dim],
            bias: 0.0,
            seed,
        })
    }

    pub fn featurize(&self, text: &str) -> SparseVec {
        featurize(text, self.n_min, self.n_max, self.hash_dim, self.seed)
    }

    pub fn margin(&self, text: &str) -> f64 {
        self.featurize(text)
            .iter()
            .fold(self.bias, |acc, &(i, v)| acc + self.weights[i as usize] * v)
    }

    pub fn predict(&self, text: &str) -> f64 {
        sigmoid(self.margin(text))
    }
}

fn check_shape(n_min: usize, n_max: usize, hash_dim: usize) -> Result<()> {
    if n_min == 0 || n_max < n_min {
        return Err(invalid_arg!("n-gram range {n_min}..={n_max} is empty"));
    }
    if !hash_dim.is_power_of_two() || hash_dim > 1 << 30 {
        return Err(invalid_arg!("hash_dim {hash_dim} must be a power of two ≤ 2^30"));
    }
    Ok(())
}

pub fn featurize(text: &str, n_min: usize, n_max: usize, hash_dim: usize, seed: u64) -> SparseVec {
    let mut chars = vec![' '];
    chars.extend(strip_emoji(text).chars());
    chars.push(' ');
    let state = FNV_OFFSET ^ mix64(seed);
    let mask = (hash_dim - 1) as u64;
    let mut out = Vec::new();
    let mut buf = [0u8; 4];
    for start in 0..chars.len() {
        let mut h = state;
        for (len, &c) in chars[start..].iter().take(n_max).enumerate() {
            h = fnv1a64_from(h, c.encode_utf8(&mut buf).as_bytes());
            if len + 1 >= n_min {
                let z = mix64(h);
                let sign = if z >> 63 == 0 { 1.0 } else { -1.0 };
                out.push(((z & mask) as u32, sign));
            }
        }
    }
    if !out.is_empty() {
        let scale = 1.0 / (out.len() as f64).sqrt();
        for (_, v) in &mut out {
            *v *= scale;
        }
    }
    out
}

/// Per-epoch mean training loss (logistic + L2), measured after each epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
}

fn log_loss(p: f64, y: f64) -> f64 {
    let p = p.clamp(1e-15, 1.0 - 1e-15);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Plain SGD on logistic loss with L2 `L2_PENALTY`, constant-rate schedule
/// decayed as `lr / sqrt(epoch)`. Row order is reshuffled every epoch from a
/// ChaCha8 stream seeded by `derive_seed(seed, "baseline-shuffle")`.
pub fn train_baseline(corpus: &Corpus, params: &BaselineParams) -> Result<(NgramLinearModel, TrainReport)> {
    check_shape(params.n_min, params.n_max, 1usize << params.hash_bits.min(31))?;
    if params.epochs == 0 {
        return Err(invalid_arg!("epochs must be positive"));
    }
    if !(params.learning_rate.is_finite() && params.learning_rate > 0.0) {
        return Err(invalid_arg!("learning rate must be positive"));
    }
    if corpus.is_empty() {
        return Err(invalid_arg!("cannot train on an empty corpus"));
    }
    let labels = corpus.labels()?;
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(invalid_arg!("training corpus has a single class"));
    }

    let mut model = NgramLinearModel::zeros(params.n_min, params.n_max, 1 << params.hash_bits, params.seed)?;
    let docs: Vec<SparseVec> = corpus.records().par_iter().map(|r| model.featurize(&r.text)).collect();
    let ys: Vec<f64> = labels.iter().map(|&y| f64::from(y)).collect();

    // w = scale * v, so the L2 shrink is O(1) per step.
    let mut v = vec![0.0f64; model.hash_dim];
    let mut scale = 1.0f64;
    let mut bias = 0.0f64;
    let mut order: Vec<usize> = (0..docs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, "baseline-shuffle"));
    let mut epoch_losses = Vec::with_capacity(params.epochs);

    for epoch in 1..=params.epochs {
        let lr = params.learning_rate / (epoch as f64).sqrt();
        order.shuffle(&mut rng);
        for &i in &order {
            let doc = &docs[i];
            let z = doc.iter().fold(bias, |acc, &(j, x)| acc + scale * v[j as usize] * x);
            let g = sigmoid(z) - ys[i];
            scale *= 1.0 - lr * L2_PENALTY;
            let step = lr * g / scale;
            for &(j, x) in doc {
                v[j as usize] -= step * x;
            }
            bias -= lr * g;
            if scale < 1e-6 {
                for w in &mut v {
                    *w *= scale;
                }
                scale = 1.0;
            }
        }
        let sq: f64 = v.iter().map(|w| w * w).sum::<f64>() * scale * scale;
        let data_loss: f64 = docs
            .iter()
            .zip(&ys)
            .map(|(doc, &y)| {
                let z = doc.iter().fold(bias, |acc, &(j, x)| acc + scale * v[j as usize] * x);
                log_loss(sigmoid(z), y)
            })
            .sum::<f64>()
            / docs.len() as f64;
        let loss = data_loss + 0.5 * L2_PENALTY * sq;
        log::debug!("baseline epoch {epoch}: loss {loss:.6}");
        epoch_losses.push(loss);
    }

    model.weights = v.into_iter().map(|w| w * scale).collect();
    model.bias = bias;
    Ok((model, TrainReport { epoch_losses }))
}

/// Scores every record; rows are independent, output follows corpus order.
pub fn score_baseline(model: &NgramLinearModel, corpus: &Corpus, model_id: &str) -> Result<ProbabilityColumn> {
    score_texts(model, corpus, model_id, |t| t.to_owned())
}

/// Scores a text transform of every record (e.g. its romanization).
pub fn score_texts<F>(model: &NgramLinearModel, corpus: &Corpus, model_id: &str, transform: F) -> Result<ProbabilityColumn>
where
    F: Fn(&str) -> String + Sync,
{
    let values: Vec<f64> = corpus
        .records()
        .par_iter()
        .map(|r| model.predict(&transform(&r.text)))
        .collect();
    ProbabilityColumn::for_corpus(model_id, corpus, values)
}
