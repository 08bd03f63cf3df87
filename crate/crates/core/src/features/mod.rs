//! Stacker inputs: post-grouped metadata aggregates, text lengths and the
//! ensemble probability.
//!
//! Counts observed at different times for the same post disagree, so both
//! post-level and comment-level counts are summarized (mean and max) over
//! every row sharing a `post_index`. The raw per-row counts are kept too.

mod io;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::data_model::{Corpus, ProbabilityColumn};
use crate::error::Result;

pub use io::{read_features, read_features_from, write_features, write_features_to};

pub const N_FEATURES: usize = 15;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "mean_report_post",
    "max_report_post",
    "mean_like_post",
    "max_like_post",
    "mean_report_comment",
    "max_report_comment",
    "mean_like_comment",
    "max_like_comment",
    "report_count_post",
    "like_count_post",
    "report_count_comment",
    "like_count_comment",
    "char_length",
    "token_length",
    "ensemble_prob",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub comment_id: String,
    pub mean_report_post: f64,
    pub max_report_post: u64,
    pub mean_like_post: f64,
    pub max_like_post: u64,
    pub mean_report_comment: f64,
    pub max_report_comment: u64,
    pub mean_like_comment: f64,
    pub max_like_comment: u64,
    pub report_count_post: u64,
    pub like_count_post: u64,
    pub report_count_comment: u64,
    pub like_count_comment: u64,
    pub char_length: u64,
    pub token_length: u64,
    pub ensemble_prob: f64,
}

impl FeatureVector {
    /// Values in `FEATURE_NAMES` order.
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.mean_report_post,
            self.max_report_post as f64,
            self.mean_like_post,
            self.max_like_post as f64,
            self.mean_report_comment,
            self.max_report_comment as f64,
            self.mean_like_comment,
            self.max_like_comment as f64,
            self.report_count_post as f64,
            self.like_count_post as f64,
            self.report_count_comment as f64,
            self.like_count_comment as f64,
            self.char_length as f64,
            self.token_length as f64,
            self.ensemble_prob,
        ]
    }
}

pub fn char_length(text: &str) -> u64 {
    text.chars().count() as u64
}

pub fn token_length(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

#[derive(Default, Clone, Copy)]
struct Agg {
    n: u64,
    sum: [f64; 4],
    max: [u64; 4],
}

/// One vector per record in corpus order. Group sums run in corpus order.
pub fn build_features(corpus: &Corpus, ensemble_prob: &ProbabilityColumn) -> Result<Vec<FeatureVector>> {
    ensemble_prob.check_aligned(corpus)?;
    let mut groups: HashMap<u64, Agg> = HashMap::new();
    for r in corpus.records() {
        let g = groups.entry(r.post_index).or_default();
        let counts = [r.report_count_post, r.like_count_post, r.report_count_comment, r.like_count_comment];
        g.n += 1;
        for k in 0..4 {
            g.sum[k] += counts[k] as f64;
            g.max[k] = g.max[k].max(counts[k]);
        }
    }
    Ok(corpus
        .records()
        .par_iter()
        .zip(ensemble_prob.values())
        .map(|(r, &p)| {
            let g = &groups[&r.post_index];
            let mean = |k: usize| g.sum[k] / g.n as f64;
            FeatureVector {
                comment_id: r.comment_id.clone(),
                mean_report_post: mean(0),
                max_report_post: g.max[0],
                mean_like_post: mean(1),
                max_like_post: g.max[1],
                mean_report_comment: mean(2),
                max_report_comment: g.max[2],
                mean_like_comment: mean(3),
                max_like_comment: g.max[3],
                report_count_post: r.report_count_post,
                like_count_post: r.like_count_post,
                report_count_comment: r.report_count_comment,
                like_count_comment: r.like_count_comment,
                char_length: char_length(&r.text),
                token_length: token_length(&r.text),
                ensemble_prob: p,
            }
        })
        .collect())
}

/// Row-major feature matrix for the stacker.
pub fn to_rows(features: &[FeatureVector]) -> Vec<Vec<f64>> {
    features.iter().map(|f| f.to_array().to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{CommentRecord, CorpusRole, Language};

    fn rec(id: &str, post: u64, rp: u64, lp: u64, text: &str) -> CommentRecord {
        CommentRecord {
            comment_id: id.into(),
            text: text.into(),
            language: Language::Hindi,
            post_index: post,
            report_count_post: rp,
            like_count_post: lp,
            report_count_comment: 1,
            like_count_comment: 2,
            label: None,
        }
    }

    #[test]
    fn shared_post_aggregates() {
        let c = Corpus::new(
            vec![rec("a", 1, 10, 5, "x"), rec("b", 1, 20, 10, "y"), rec("c", 2, 3, 4, "z")],
            CorpusRole::Test,
        )
        .unwrap();
        let p = ProbabilityColumn::for_corpus("e", &c, vec![0.1, 0.2, 0.3]).unwrap();
        let f = build_features(&c, &p).unwrap();
        for v in &f[..2] {
            assert_eq!(v.mean_like_post, 7.5);
            assert_eq!(v.max_like_post, 10);
            assert_eq!(v.mean_report_post, 15.0);
            assert_eq!(v.max_report_post, 20);
        }
        assert_eq!((f[2].mean_report_post, f[2].max_report_post), (3.0, 3));
        assert_eq!((f[2].mean_like_post, f[2].max_like_post), (4.0, 4));
        assert_eq!(f[2].ensemble_prob, 0.3);
    }

    #[test]
    fn lengths() {
        assert_eq!(token_length("नमस्ते दोस्त"), 2);
        assert_eq!(char_length("नमस्ते दोस्त"), 12);
        assert_eq!(token_length("  a \t b\n"), 2);
        assert_eq!(token_length(""), 0);
    }

    #[test]
    fn misaligned_column_is_rejected() {
        let c = Corpus::new(vec![rec("a", 1, 1, 1, "x")], CorpusRole::Test).unwrap();
        let p = ProbabilityColumn::new("e", vec!["b".into()], vec![0.5]).unwrap();
        assert!(build_features(&c, &p).is_err());
    }
}
