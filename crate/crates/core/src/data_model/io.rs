use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{CommentRecord, Corpus, CorpusRole, Language, ProbabilityColumn};
use crate::error::{Error, Result};
use crate::util::fmt_f64;

pub const CORPUS_COLUMNS: [&str; 9] = [
    "comment_id",
    "text",
    "language",
    "post_index",
    "report_count_post",
    "like_count_post",
    "report_count_comment",
    "like_count_comment",
    "label",
];

pub const PROBABILITY_COLUMNS: [&str; 2] = ["comment_id", "probability"];

pub(crate) fn csv_reader<R: Read>(rdr: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(rdr)
}

pub(crate) fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(w)
}

pub(crate) fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn parse_count(path: &Path, line: u64, column: &str, raw: &str) -> Result<u64> {
    raw.parse::<u64>().map_err(|_| {
        Error::parse(
            path,
            line,
            format!("column {column}: expected a non-negative integer, got {raw:?}"),
        )
    })
}

/// Reads a corpus file. `path` only labels error messages when reading from
/// an arbitrary reader.
pub fn read_corpus_from<R: Read>(rdr: R, path: &Path, role: CorpusRole) -> Result<Corpus> {
    let mut csv = csv_reader(rdr);
    let headers = csv.headers().map_err(|e| csv_err(path, e))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let has_label = match names.as_slice() {
        h if h == CORPUS_COLUMNS => true,
        h if h == &CORPUS_COLUMNS[..8] => false,
        _ => {
            let missing: Vec<&str> = CORPUS_COLUMNS
                .iter()
                .copied()
                .filter(|c| !names.contains(c))
                .collect();
            let msg = if missing.is_empty() {
                format!("header {names:?} does not match {CORPUS_COLUMNS:?}")
            } else {
                format!("missing column(s) {missing:?}")
            };
            return Err(Error::schema(path, msg));
        }
    };
    if !has_label && role == CorpusRole::Train {
        return Err(Error::schema(path, "train corpus requires a label column"));
    }

    let mut records = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    for row in csv.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let language: Language = row[2].parse().map_err(|_| {
            Error::parse(path, line, format!("unknown language tag {:?}", &row[2]))
        })?;
        let label = if has_label {
            match &row[8] {
                "" if role == CorpusRole::Test => None,
                "0" => Some(0),
                "1" => Some(1),
                other => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("label {other:?} outside {{0,1}}"),
                    ))
                }
            }
        } else {
            None
        };
        let comment_id = row[0].to_owned();
        if let Some(first) = seen.insert(comment_id.clone(), line) {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate comment_id {comment_id:?} (first seen on line {first})"),
            ));
        }
        records.push(CommentRecord {
            comment_id,
            text: row[1].to_owned(),
            language,
            post_index: parse_count(path, line, CORPUS_COLUMNS[3], &row[3])?,
            report_count_post: parse_count(path, line, CORPUS_COLUMNS[4], &row[4])?,
            like_count_post: parse_count(path, line, CORPUS_COLUMNS[5], &row[5])?,
            report_count_comment: parse_count(path, line, CORPUS_COLUMNS[6], &row[6])?,
            like_count_comment: parse_count(path, line, CORPUS_COLUMNS[7], &row[7])?,
            label,
        });
    }
    Corpus::new(records, role).map_err(|e| Error::schema(path, e.to_string()))
}

pub fn read_corpus(path: impl AsRef<Path>, role: CorpusRole) -> Result<Corpus> {
    let path = path.as_ref();
    read_corpus_from(open(path)?, path, role)
}

/// Canonical corpus serialization. The label column is written for train
/// corpora and for test corpora where any record carries a label.
pub fn write_corpus_to<W: Write>(corpus: &Corpus, w: W, path: &Path) -> Result<()> {
    let with_label =
        corpus.role() == CorpusRole::Train || corpus.records().iter().any(|r| r.label.is_some());
    let mut csv = csv_writer(w);
    let ncols = if with_label { 9 } else { 8 };
    csv.write_record(&CORPUS_COLUMNS[..ncols])
        .map_err(|e| csv_err(path, e))?;
    for r in corpus.records() {
        let mut row: Vec<String> = vec![
            r.comment_id.clone(),
            r.text.clone(),
            r.language.name().to_owned(),
            r.post_index.to_string(),
            r.report_count_post.to_string(),
            r.like_count_post.to_string(),
            r.report_count_comment.to_string(),
            r.like_count_comment.to_string(),
        ];
        if with_label {
            row.push(r.label.map(|l| l.to_string()).unwrap_or_default());
        }
        csv.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    csv.flush().map_err(|e| Error::io(path, e))
}

pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_corpus_to(corpus, create(path)?, path)
}

/// Reads a probability file and reorders it to corpus order. Every corpus id
/// must appear exactly once and no other id may appear.
pub fn read_probability_column_from<R: Read>(
    rdr: R,
    path: &Path,
    model_id: &str,
    corpus: &Corpus,
) -> Result<ProbabilityColumn> {
    let mut csv = csv_reader(rdr);
    let headers = csv.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != PROBABILITY_COLUMNS {
        return Err(Error::schema(
            path,
            format!("header must be {:?}", PROBABILITY_COLUMNS.join(",")),
        ));
    }
    let mut values: Vec<Option<f64>> = vec![None; corpus.len()];
    for row in csv.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let id = &row[0];
        let pos = corpus.position(id).ok_or_else(|| {
            Error::parse(path, line, format!("comment_id {id:?} is not in the corpus"))
        })?;
        let p: f64 = row[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad probability {:?}", &row[1])))?;
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::parse(
                path,
                line,
                format!("probability {p} for {id:?} outside [0,1]"),
            ));
        }
        if values[pos].replace(p).is_some() {
            return Err(Error::parse(path, line, format!("duplicate comment_id {id:?}")));
        }
    }
    let values = values
        .into_iter()
        .zip(corpus.records())
        .map(|(v, r)| {
            v.ok_or_else(|| {
                Error::schema(path, format!("missing probability for comment_id {:?}", r.comment_id))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    ProbabilityColumn::for_corpus(model_id, corpus, values)
}

/// The model id is taken from the file stem.
pub fn read_probability_column(path: impl AsRef<Path>, corpus: &Corpus) -> Result<ProbabilityColumn> {
    let path = path.as_ref();
    let model_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_probability_column_from(open(path)?, path, &model_id, corpus)
}

pub fn write_probability_column_to<W: Write>(col: &ProbabilityColumn, w: W, path: &Path) -> Result<()> {
    let mut csv = csv_writer(w);
    csv.write_record(PROBABILITY_COLUMNS)
        .map_err(|e| csv_err(path, e))?;
    for (id, p) in col.iter() {
        csv.write_record([id, fmt_f64(p).as_str()])
            .map_err(|e| csv_err(path, e))?;
    }
    csv.flush().map_err(|e| Error::io(path, e))
}

pub fn write_probability_column(col: &ProbabilityColumn, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_probability_column_to(col, create(path)?, path)
}

pub const PREDICTION_COLUMNS: [&str; 2] = ["comment_id", "prediction"];

pub fn write_predictions_to<W: Write>(ids: &[String], predictions: &[u8], w: W, path: &Path) -> Result<()> {
    if ids.len() != predictions.len() {
        return Err(Error::Alignment(format!("{} ids but {} predictions", ids.len(), predictions.len())));
    }
    let mut csv = csv_writer(w);
    csv.write_record(PREDICTION_COLUMNS).map_err(|e| csv_err(path, e))?;
    for (id, p) in ids.iter().zip(predictions) {
        csv.write_record([id.as_str(), &p.to_string()]).map_err(|e| csv_err(path, e))?;
    }
    csv.flush().map_err(|e| Error::io(path, e))
}

pub fn write_predictions(ids: &[String], predictions: &[u8], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_predictions_to(ids, predictions, create(path)?, path)
}
