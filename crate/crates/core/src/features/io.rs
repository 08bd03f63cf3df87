//! Feature CSV: `comment_id` followed by the 15 feature columns. Counts and
//! lengths are integers; means and probabilities use 17 significant digits.

use std::io::{Read, Write};
use std::path::Path;

use super::{FeatureVector, FEATURE_NAMES};
use crate::data_model::io::{create, csv_err, csv_reader, csv_writer, open};
use crate::error::{Error, Result};
use crate::util::fmt_f64;

pub fn write_features_to<W: Write>(features: &[FeatureVector], w: W, path: &Path) -> Result<()> {
    let mut csv = csv_writer(w);
    let mut header = vec!["comment_id"];
    header.extend(FEATURE_NAMES);
    csv.write_record(&header).map_err(|e| csv_err(path, e))?;
    for f in features {
        let row = [
            f.comment_id.clone(),
            fmt_f64(f.mean_report_post),
            f.max_report_post.to_string(),
            fmt_f64(f.mean_like_post),
            f.max_like_post.to_string(),
            fmt_f64(f.mean_report_comment),
            f.max_report_comment.to_string(),
            fmt_f64(f.mean_like_comment),
            f.max_like_comment.to_string(),
            f.report_count_post.to_string(),
            f.like_count_post.to_string(),
            f.report_count_comment.to_string(),
            f.like_count_comment.to_string(),
            f.char_length.to_string(),
            f.token_length.to_string(),
            fmt_f64(f.ensemble_prob),
        ];
        csv.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    csv.flush().map_err(|e| Error::io(path, e))
}

pub fn write_features(features: &[FeatureVector], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_features_to(features, create(path)?, path)
}

pub fn read_features_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<FeatureVector>> {
    let mut csv = csv_reader(rdr);
    let headers = csv.headers().map_err(|e| csv_err(path, e))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let expected: Vec<&str> = std::iter::once("comment_id").chain(FEATURE_NAMES).collect();
    if names != expected {
        let missing: Vec<&str> = expected.iter().copied().filter(|c| !names.contains(c)).collect();
        let msg = if missing.is_empty() {
            format!("columns out of order; expected {}", expected.join(","))
        } else {
            format!("missing column(s) {missing:?}")
        };
        return Err(Error::schema(path, msg));
    }
    let mut out = Vec::new();
    for row in csv.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let float = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .ok_or_else(|| Error::parse(path, line, format!("{}: bad value {:?}", expected[i], &row[i])))
        };
        let int = |i: usize| -> Result<u64> {
            row[i]
                .parse::<u64>()
                .map_err(|_| Error::parse(path, line, format!("{}: bad integer {:?}", expected[i], &row[i])))
        };
        let ensemble_prob = float(15)?;
        if ensemble_prob > 1.0 {
            return Err(Error::parse(path, line, format!("ensemble_prob {ensemble_prob} outside [0,1]")));
        }
        out.push(FeatureVector {
            comment_id: row[0].to_owned(),
            mean_report_post: float(1)?,
            max_report_post: int(2)?,
            mean_like_post: float(3)?,
            max_like_post: int(4)?,
            mean_report_comment: float(5)?,
            max_report_comment: int(6)?,
            mean_like_comment: float(7)?,
            max_like_comment: int(8)?,
            report_count_post: int(9)?,
            like_count_post: int(10)?,
            report_count_comment: int(11)?,
            like_count_comment: int(12)?,
            char_length: int(13)?,
            token_length: int(14)?,
            ensemble_prob,
        });
    }
    Ok(out)
}

pub fn read_features(path: impl AsRef<Path>) -> Result<Vec<FeatureVector>> {
    let path = path.as_ref();
    read_features_from(open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_list_is_header_only() {
        let mut buf = Vec::new();
        write_features_to(&[], &mut buf, Path::new("f")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("comment_id,mean_report_post,"));
        assert!(text.trim_end().ends_with(",ensemble_prob"));
    }

    #[test]
    fn missing_column_is_rejected() {
        let mut header: Vec<&str> = std::iter::once("comment_id").chain(FEATURE_NAMES).collect();
        header.pop();
        let text = format!("{}\n", header.join(","));
        let err = read_features_from(text.as_bytes(), Path::new("f")).unwrap_err();
        assert!(err.to_string().contains("ensemble_prob"));
    }
}
