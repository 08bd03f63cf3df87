//! Corpus-level types and their file formats.
//!
//! A [`Corpus`] is an ordered list of [`CommentRecord`]s. Everything computed
//! downstream (probabilities, features, predictions) is aligned to it both by
//! position and by `comment_id`.

pub(crate) mod io;
mod synthetic;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid_data, Error, Result};

pub use io::{
    read_corpus, read_corpus_from, read_probability_column, read_probability_column_from,
    write_corpus, write_corpus_to, write_predictions, write_predictions_to, write_probability_column,
    write_probability_column_to, CORPUS_COLUMNS, PREDICTION_COLUMNS, PROBABILITY_COLUMNS,
};
pub use synthetic::{generate_synthetic_corpus, generate_synthetic_corpus_with, SyntheticParams};

/// The 13 languages present in the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    Hindi,
    Marathi,
    Malayalam,
    Telugu,
    Tamil,
    Odia,
    Gujarati,
    Bhojpuri,
    Haryanvi,
    Assamese,
    Kannada,
    Rajasthani,
    Bengali,
}

/// Writing system a language is usually typed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Script {
    Devanagari,
    Bengali,
    Gujarati,
    Odia,
    Tamil,
    Telugu,
    Kannada,
    Malayalam,
}

impl Language {
    pub const ALL: [Language; 13] = [
        Language::Hindi,
        Language::Marathi,
        Language::Malayalam,
        Language::Telugu,
        Language::Tamil,
        Language::Odia,
        Language::Gujarati,
        Language::Bhojpuri,
        Language::Haryanvi,
        Language::Assamese,
        Language::Kannada,
        Language::Rajasthani,
        Language::Bengali,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Language::Hindi => "Hindi",
            Language::Marathi => "Marathi",
            Language::Malayalam => "Malayalam",
            Language::Telugu => "Telugu",
            Language::Tamil => "Tamil",
            Language::Odia => "Odia",
            Language::Gujarati => "Gujarati",
            Language::Bhojpuri => "Bhojpuri",
            Language::Haryanvi => "Haryanvi",
            Language::Assamese => "Assamese",
            Language::Kannada => "Kannada",
            Language::Rajasthani => "Rajasthani",
            Language::Bengali => "Bengali",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn script(self) -> Script {
        match self {
            Language::Hindi
            | Language::Marathi
            | Language::Bhojpuri
            | Language::Haryanvi
            | Language::Rajasthani => Script::Devanagari,
            Language::Bengali | Language::Assamese => Script::Bengali,
            Language::Gujarati => Script::Gujarati,
            Language::Odia => Script::Odia,
            Language::Tamil => Script::Tamil,
            Language::Telugu => Script::Telugu,
            Language::Kannada => Script::Kannada,
            Language::Malayalam => Script::Malayalam,
        }
    }

    /// Language mix skewed heavily toward Hindi, roughly like a large
    /// Indic social-media comment dump.
    pub fn default_weights() -> Vec<(Language, f64)> {
        vec![
            (Language::Hindi, 0.38),
            (Language::Marathi, 0.10),
            (Language::Malayalam, 0.05),
            (Language::Telugu, 0.08),
            (Language::Tamil, 0.08),
            (Language::Odia, 0.03),
            (Language::Gujarati, 0.04),
            (Language::Bhojpuri, 0.04),
            (Language::Haryanvi, 0.04),
            (Language::Assamese, 0.02),
            (Language::Kannada, 0.06),
            (Language::Rajasthani, 0.03),
            (Language::Bengali, 0.05),
        ]
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Language::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| invalid_data!("unknown language tag {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusRole {
    Train,
    Test,
}

impl FromStr for CorpusRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(CorpusRole::Train),
            "test" => Ok(CorpusRole::Test),
            _ => Err(invalid_data!("unknown corpus role {s:?} (expected train or test)")),
        }
    }
}

/// One comment with its post/comment metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommentRecord {
    pub comment_id: String,
    pub text: String,
    pub language: Language,
    pub post_index: u64,
    pub report_count_post: u64,
    pub like_count_post: u64,
    pub report_count_comment: u64,
    pub like_count_comment: u64,
    /// 1 = abusive, 0 = not abusive.
    pub label: Option<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    records: Vec<CommentRecord>,
    role: CorpusRole,
    positions: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus, checking id uniqueness and label presence/range.
    pub fn new(records: Vec<CommentRecord>, role: CorpusRole) -> Result<Self> {
        let mut positions = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if let Some(l) = r.label {
                if l > 1 {
                    return Err(invalid_data!(
                        "record {:?}: label {l} outside {{0,1}}",
                        r.comment_id
                    ));
                }
            } else if role == CorpusRole::Train {
                return Err(invalid_data!(
                    "record {:?}: train corpus requires a label",
                    r.comment_id
                ));
            }
            if positions.insert(r.comment_id.clone(), i).is_some() {
                return Err(invalid_data!("duplicate comment_id {:?}", r.comment_id));
            }
        }
        Ok(Corpus {
            records,
            role,
            positions,
        })
    }

    pub fn empty(role: CorpusRole) -> Self {
        Corpus {
            records: Vec::new(),
            role,
            positions: HashMap::new(),
        }
    }

    pub fn records(&self) -> &[CommentRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<CommentRecord> {
        self.records
    }

    pub fn role(&self) -> CorpusRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn position(&self, comment_id: &str) -> Option<usize> {
        self.positions.get(comment_id).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.comment_id.as_str())
    }

    pub fn languages(&self) -> Vec<Language> {
        self.records.iter().map(|r| r.language).collect()
    }

    pub fn has_labels(&self) -> bool {
        self.records.iter().all(|r| r.label.is_some())
    }

    /// All labels, or an error naming the first unlabeled record.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.records
            .iter()
            .map(|r| {
                r.label
                    .ok_or_else(|| invalid_data!("record {:?} has no label", r.comment_id))
            })
            .collect()
    }

    /// Sub-corpus of the given positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> Result<Corpus> {
        let records = positions.iter().map(|&i| self.records[i].clone()).collect();
        Corpus::new(records, self.role)
    }
}

/// Per-comment abusiveness probabilities from one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityColumn {
    pub model_id: String,
    comment_ids: Vec<String>,
    values: Vec<f64>,
}

impl ProbabilityColumn {
    pub fn new(model_id: impl Into<String>, comment_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if comment_ids.len() != values.len() {
            return Err(invalid_data!(
                "{} ids but {} probabilities",
                comment_ids.len(),
                values.len()
            ));
        }
        for (id, &p) in comment_ids.iter().zip(&values) {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(invalid_data!("probability {p} for {id:?} outside [0,1]"));
            }
        }
        Ok(ProbabilityColumn {
            model_id: model_id.into(),
            comment_ids,
            values,
        })
    }

    /// Column aligned to `corpus` by position.
    pub fn for_corpus(model_id: impl Into<String>, corpus: &Corpus, values: Vec<f64>) -> Result<Self> {
        ProbabilityColumn::new(model_id, corpus.ids().map(str::to_owned).collect(), values)
    }

    pub fn comment_ids(&self) -> &[String] {
        &self.comment_ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.comment_ids
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }

    /// Same ids, new values (checked).
    pub fn with_values(&self, model_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        ProbabilityColumn::new(model_id, self.comment_ids.clone(), values)
    }

    /// Checks that position i of this column carries the id of corpus record i.
    pub fn check_aligned(&self, corpus: &Corpus) -> Result<()> {
        if self.len() != corpus.len() {
            return Err(Error::Alignment(format!(
                "column {:?} has {} rows, corpus has {}",
                self.model_id,
                self.len(),
                corpus.len()
            )));
        }
        for (i, (id, r)) in self.comment_ids.iter().zip(corpus.records()).enumerate() {
            if *id != r.comment_id {
                return Err(Error::Alignment(format!(
                    "column {:?} row {i}: id {id:?} but corpus has {:?}",
                    self.model_id, r.comment_id
                )));
            }
        }
        Ok(())
    }

    /// Checks that two columns carry the same ids in the same order.
    pub fn check_same_ids(&self, other: &ProbabilityColumn) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Alignment(format!(
                "columns {:?} and {:?} differ in length ({} vs {})",
                self.model_id,
                other.model_id,
                self.len(),
                other.len()
            )));
        }
        if let Some((i, (a, b))) = self
            .comment_ids
            .iter()
            .zip(&other.comment_ids)
            .enumerate()
            .find(|(_, (a, b))| a != b)
        {
            return Err(Error::Alignment(format!(
                "columns {:?} and {:?} disagree at row {i}: {a:?} vs {b:?}",
                self.model_id, other.model_id
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(id: &str, text: &str, lang: Language, post: u64, label: Option<u8>) -> CommentRecord {
        CommentRecord {
            comment_id: id.into(),
            text: text.into(),
            language: lang,
            post_index: post,
            report_count_post: 1,
            like_count_post: 2,
            report_count_comment: 3,
            like_count_comment: 4,
            label,
        }
    }

    #[test]
    fn language_parse_is_case_insensitive() {
        assert_eq!("hindi".parse::<Language>().unwrap(), Language::Hindi);
        assert_eq!("BENGALI".parse::<Language>().unwrap(), Language::Bengali);
        assert_eq!(" Odia ".parse::<Language>().unwrap(), Language::Odia);
        assert!("klingon".parse::<Language>().is_err());
        assert!("".parse::<Language>().is_err());
        for l in Language::ALL {
            assert_eq!(l.name().parse::<Language>().unwrap(), l);
            assert_eq!(Language::ALL[l.index()], l);
        }
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let r = vec![
            record("a", "x", Language::Hindi, 1, Some(0)),
            record("a", "y", Language::Hindi, 1, Some(1)),
        ];
        assert!(Corpus::new(r, CorpusRole::Train).is_err());
    }

    #[test]
    fn corpus_requires_labels_for_train() {
        let r = vec![record("a", "x", Language::Hindi, 1, None)];
        assert!(Corpus::new(r.clone(), CorpusRole::Train).is_err());
        assert!(Corpus::new(r, CorpusRole::Test).is_ok());
    }

    #[test]
    fn corpus_rejects_bad_label() {
        let r = vec![record("a", "x", Language::Hindi, 1, Some(2))];
        assert!(Corpus::new(r, CorpusRole::Test).is_err());
    }

    #[test]
    fn duplicate_post_index_is_fine() {
        let r = vec![
            record("a", "x", Language::Hindi, 1, Some(0)),
            record("b", "y", Language::Hindi, 1, Some(1)),
        ];
        let c = Corpus::new(r, CorpusRole::Train).unwrap();
        assert_eq!(c.position("b"), Some(1));
    }

    #[test]
    fn probability_range_checked() {
        assert!(ProbabilityColumn::new("m", vec!["a".into()], vec![1.2]).is_err());
        assert!(ProbabilityColumn::new("m", vec!["a".into()], vec![f64::NAN]).is_err());
        assert!(ProbabilityColumn::new("m", vec!["a".into()], vec![-0.1]).is_err());
        assert!(ProbabilityColumn::new("m", vec!["a".into()], vec![1.0]).is_ok());
    }

    #[test]
    fn alignment_detects_reordering() {
        let c = Corpus::new(
            vec![
                record("a", "x", Language::Hindi, 1, Some(0)),
                record("b", "y", Language::Tamil, 2, Some(1)),
            ],
            CorpusRole::Train,
        )
        .unwrap();
        let good = ProbabilityColumn::for_corpus("m", &c, vec![0.1, 0.2]).unwrap();
        good.check_aligned(&c).unwrap();
        let bad = ProbabilityColumn::new("m", vec!["b".into(), "a".into()], vec![0.1, 0.2]).unwrap();
        assert!(bad.check_aligned(&c).is_err());
    }
}
