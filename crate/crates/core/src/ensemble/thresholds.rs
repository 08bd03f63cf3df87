//! Ensemble-weight and threshold tables, both stored as `key = value` text.

use std::collections::BTreeMap;
use std::path::Path;

use crate::data_model::Language;
use crate::error::{invalid_arg, Error, Result};
use crate::kv::{parse_f64, parse_kv, read_text, write_text};

/// Per-language thresholds tuned on the original challenge leaderboard.
pub const SHIPPED_LANGUAGE_THRESHOLDS: &str = include_str!("../../data/language_thresholds.txt");

const THRESHOLDS_HEADER: &str = "# thresholds v1";
const ENSEMBLE_HEADER: &str = "# ensemble v1";

/// Decision threshold per language, with an optional fallback for languages
/// not listed.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    per_language: BTreeMap<Language, f64>,
    global: Option<f64>,
}

impl Default for ThresholdTable {
    fn default() -> Self {
        ThresholdTable { per_language: BTreeMap::new(), global: Some(0.5) }
    }
}

fn check_threshold(what: &str, t: f64) -> Result<()> {
    if t.is_finite() && (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(invalid_arg!("threshold for {what} must be in [0, 1], got {t}"))
    }
}

impl ThresholdTable {
    pub fn new(per_language: Vec<(Language, f64)>, global: Option<f64>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lang, t) in per_language {
            check_threshold(lang.name(), t)?;
            if map.insert(lang, t).is_some() {
                return Err(invalid_arg!("duplicate threshold for {lang}"));
            }
        }
        if let Some(g) = global {
            check_threshold("global", g)?;
        }
        Ok(ThresholdTable { per_language: map, global })
    }

    pub fn global_only(t: f64) -> Result<Self> {
        Self::new(Vec::new(), Some(t))
    }

    /// The 13 per-language thresholds shipped with the crate (no fallback).
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_LANGUAGE_THRESHOLDS, Path::new("<shipped thresholds>"))
            .expect("shipped threshold table parses")
    }

    pub fn threshold(&self, lang: Language) -> Option<f64> {
        self.per_language.get(&lang).copied().or(self.global)
    }

    pub fn language(&self, lang: Language) -> Option<f64> {
        self.per_language.get(&lang).copied()
    }

    pub fn global(&self) -> Option<f64> {
        self.global
    }

    pub fn set_language(&mut self, lang: Language, t: f64) -> Result<()> {
        check_threshold(lang.name(), t)?;
        self.per_language.insert(lang, t);
        Ok(())
    }

    pub fn set_global(&mut self, t: Option<f64>) -> Result<()> {
        if let Some(g) = t {
            check_threshold("global", g)?;
        }
        self.global = t;
        Ok(())
    }

    pub fn languages(&self) -> impl Iterator<Item = (Language, f64)> + '_ {
        self.per_language.iter().map(|(&l, &t)| (l, t))
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut table = ThresholdTable { per_language: BTreeMap::new(), global: None };
        for l in parse_kv(text, path)? {
            let t = parse_f64(path, &l)?;
            let res = if l.key.eq_ignore_ascii_case("global") {
                table.set_global(Some(t))
            } else {
                let lang: Language = l.key.parse().map_err(|e: Error| Error::parse(path, l.line, e.to_string()))?;
                if table.per_language.contains_key(&lang) {
                    return Err(Error::parse(path, l.line, format!("duplicate threshold for {lang}")));
                }
                table.set_language(lang, t)
            };
            res.map_err(|e| Error::parse(path, l.line, e.to_string()))?;
        }
        Ok(table)
    }

    /// Canonical text: header, `global` (if any), languages in enum order,
    /// values in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = format!("{THRESHOLDS_HEADER}\n");
        if let Some(g) = self.global {
            s.push_str(&format!("global = {g}\n"));
        }
        for (l, t) in &self.per_language {
            s.push_str(&format!("{l} = {t}\n"));
        }
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_text(path)?, path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_text())
    }
}

/// Ensemble members and weights; `normalize` divides by the weight sum.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    members: Vec<(String, f64)>,
    normalize: bool,
}

impl EnsembleSpec {
    pub fn new(members: Vec<(String, f64)>, normalize: bool) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid_arg!("ensemble needs at least one member"));
        }
        for (i, (id, w)) in members.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(invalid_arg!("weight for {id:?} must be non-negative, got {w}"));
            }
            if members[..i].iter().any(|(o, _)| o == id) {
                return Err(invalid_arg!("duplicate ensemble member {id:?}"));
            }
        }
        let spec = EnsembleSpec { members, normalize };
        let total = spec.total_weight();
        if total <= 0.0 {
            return Err(invalid_arg!("ensemble weights sum to zero"));
        }
        if !normalize && total > 1.0 + 1e-12 {
            return Err(invalid_arg!("unnormalized ensemble weights sum to {total} > 1"));
        }
        Ok(spec)
    }

    pub fn equal<S: AsRef<str>>(ids: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(ids.into_iter().map(|s| (s.as_ref().to_string(), 1.0)).collect(), true)
    }

    pub fn members(&self) -> &[(String, f64)] {
        &self.members
    }

    pub fn normalize(&self) -> bool {
        self.normalize
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(_, w)| w).sum()
    }

    /// Weights after normalization (or as given when `normalize` is off).
    pub fn effective_weights(&self) -> Vec<f64> {
        let t = if self.normalize { self.total_weight() } else { 1.0 };
        self.members.iter().map(|(_, w)| w / t).collect()
    }

    /// `model_id = weight` lines; the reserved key `normalize` takes
    /// `true`/`false` (default true).
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut members = Vec::new();
        let mut normalize = true;
        for l in parse_kv(text, path)? {
            if l.key == "normalize" {
                normalize = l
                    .value
                    .parse()
                    .map_err(|_| Error::parse(path, l.line, format!("normalize must be true or false, got {:?}", l.value)))?;
            } else {
                members.push((l.key.clone(), parse_f64(path, &l)?));
            }
        }
        Self::new(members, normalize).map_err(|e| Error::schema(path, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{ENSEMBLE_HEADER}\nnormalize = {}\n", self.normalize);
        for (id, w) in &self.members {
            s.push_str(&format!("{id} = {w}\n"));
        }
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_text(path)?, path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_is_verbatim() {
        let t = ThresholdTable::shipped();
        assert_eq!(t.global(), None);
        assert_eq!(t.languages().count(), 13);
        assert_eq!(t.language(Language::Marathi), Some(0.6));
        assert_eq!(t.language(Language::Hindi), Some(0.54));
        assert_eq!(t.language(Language::Assamese), Some(0.45));
        assert_eq!(t.language(Language::Gujarati), Some(0.4));
    }

    #[test]
    fn threshold_text_round_trip() {
        let p = Path::new("t");
        let t = ThresholdTable::new(vec![(Language::Tamil, 0.35), (Language::Hindi, 0.54)], Some(0.55)).unwrap();
        let text = t.to_text();
        assert_eq!(text, "# thresholds v1\nglobal = 0.55\nHindi = 0.54\nTamil = 0.35\n");
        assert_eq!(ThresholdTable::parse(&text, p).unwrap(), t);
        assert!(ThresholdTable::parse("Klingon = 0.5\n", p).is_err());
        assert!(ThresholdTable::parse("Hindi = 1.5\n", p).is_err());
        assert!(ThresholdTable::parse("hindi = 0.5\nHINDI = 0.4\n", p).is_err());
    }

    #[test]
    fn ensemble_spec_parsing() {
        let p = Path::new("e");
        let s = EnsembleSpec::parse("# weights\nm1 = 1\nm2 = 3\n", p).unwrap();
        assert_eq!(s.effective_weights(), vec![0.25, 0.75]);
        assert_eq!(EnsembleSpec::parse(&s.to_text(), p).unwrap(), s);
        assert!(EnsembleSpec::parse("", p).is_err());
        assert!(EnsembleSpec::parse("m = 0\n", p).is_err());
        assert!(EnsembleSpec::parse("m = -1\nn = 2\n", p).is_err());
        assert!(EnsembleSpec::parse("normalize = false\nm = 0.7\nn = 0.7\n", p).is_err());
    }
}
