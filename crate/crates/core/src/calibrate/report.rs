//! EvalReport as aligned text and as a `key = value` file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use super::{ClassScores, Confusion, EvalReport};
use crate::data_model::Language;
use crate::error::{Error, Result};
use crate::kv::{parse_kv, read_text, write_text};

const HEADER: &str = "# eval v1";

fn push_scores(s: &mut String, prefix: &str, c: &ClassScores) {
    let k = &c.confusion;
    for (name, v) in [("mean_f1", c.mean_f1), ("f1_abusive", c.f1_abusive), ("f1_not_abusive", c.f1_not_abusive)] {
        let _ = writeln!(s, "{prefix}{name} = {v}");
    }
    for (name, v) in [("tp", k.tp), ("fp", k.fp), ("fn", k.fn_), ("tn", k.tn)] {
        let _ = writeln!(s, "{prefix}{name} = {v}");
    }
}

impl EvalReport {
    /// Machine-readable form; `<Language>.` prefixes the per-language keys.
    pub fn to_kv(&self) -> String {
        let mut s = format!("{HEADER}\n");
        push_scores(&mut s, "", &self.overall);
        for (l, c) in &self.per_language {
            push_scores(&mut s, &format!("{l}."), c);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let row = |s: &mut String, name: &str, c: &ClassScores| {
            let k = &c.confusion;
            let _ = writeln!(
                s,
                "{name:<12} {:>8.5} {:>8.5} {:>8.5} {:>7} {:>7} {:>7} {:>7}",
                c.mean_f1, c.f1_abusive, c.f1_not_abusive, k.tp, k.fp, k.fn_, k.tn
            );
        };
        let _ = writeln!(
            s,
            "{:<12} {:>8} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7}",
            "language", "mean_f1", "f1_abus", "f1_not", "tp", "fp", "fn", "tn"
        );
        row(&mut s, "ALL", &self.overall);
        for (l, c) in &self.per_language {
            row(&mut s, l.name(), c);
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_kv())
    }
}

#[derive(Default)]
struct Partial {
    floats: [Option<f64>; 3],
    counts: [Option<u64>; 4],
}

impl Partial {
    fn finish(self, path: &Path, what: &str) -> Result<ClassScores> {
        let missing = || Error::schema(path, format!("incomplete scores for {what}"));
        let [m, a, n] = self.floats;
        let [tp, fp, fn_, tn] = self.counts;
        Ok(ClassScores {
            mean_f1: m.ok_or_else(missing)?,
            f1_abusive: a.ok_or_else(missing)?,
            f1_not_abusive: n.ok_or_else(missing)?,
            confusion: Confusion {
                tp: tp.ok_or_else(missing)?,
                fp: fp.ok_or_else(missing)?,
                fn_: fn_.ok_or_else(missing)?,
                tn: tn.ok_or_else(missing)?,
            },
        })
    }
}

pub fn read_report_from<R: Read>(mut r: R, path: &Path) -> Result<EvalReport> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(|e| Error::io(path, e))?;
    let mut overall = Partial::default();
    let mut per: BTreeMap<Language, Partial> = BTreeMap::new();
    for l in parse_kv(&text, path)? {
        let (slot, field) = match l.key.split_once('.') {
            Some((lang, field)) => {
                let lang: Language = lang.parse().map_err(|e: Error| Error::parse(path, l.line, e.to_string()))?;
                (per.entry(lang).or_default(), field)
            }
            None => (&mut overall, l.key.as_str()),
        };
        let bad = || Error::parse(path, l.line, format!("bad value for {}: {:?}", l.key, l.value));
        let fi = ["mean_f1", "f1_abusive", "f1_not_abusive"].iter().position(|f| *f == field);
        let ci = ["tp", "fp", "fn", "tn"].iter().position(|f| *f == field);
        match (fi, ci) {
            (Some(i), _) => slot.floats[i] = Some(l.value.parse().map_err(|_| bad())?),
            (_, Some(i)) => slot.counts[i] = Some(l.value.parse().map_err(|_| bad())?),
            _ => return Err(Error::parse(path, l.line, format!("unknown key {:?}", l.key))),
        }
    }
    Ok(EvalReport {
        overall: overall.finish(path, "overall")?,
        per_language: per
            .into_iter()
            .map(|(l, p)| Ok((l, p.finish(path, l.name())?)))
            .collect::<Result<_>>()?,
    })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<EvalReport> {
    let path = path.as_ref();
    read_report_from(read_text(path)?.as_bytes(), path)
}

#[cfg(test)]
mod tests {
    use super::super::evaluate_predictions;
    use super::*;

    #[test]
    fn kv_round_trip() {
        let r = evaluate_predictions(
            &[1, 0, 1, 1, 0],
            &[1, 0, 0, 1, 1],
            &[Language::Hindi, Language::Hindi, Language::Tamil, Language::Tamil, Language::Bengali],
        )
        .unwrap();
        let kv = r.to_kv();
        let back = read_report_from(kv.as_bytes(), Path::new("r")).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_kv(), kv);
        assert!(r.to_text().contains("Tamil"));
        assert!(read_report_from("mean_f1 = 1\n".as_bytes(), Path::new("r")).is_err());
    }
}
