//! Post-transformer stages of a multilingual abusive-comment detector:
//! transliteration augmentation, probability fusion and ensembling, metadata
//! features, gradient-boosted stacking, per-language thresholds and mean-F1
//! evaluation.

pub mod baseline;
pub mod calibrate;
pub mod cli;
pub mod config;
pub mod data_model;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod gbdt;
pub mod pipeline;
mod kv;
pub mod translit;
pub mod util;

pub use error::{Error, Result};
