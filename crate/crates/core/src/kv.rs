//! `key = value` text files with `#` comments.

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) struct KvLine {
    pub line: u64,
    pub key: String,
    pub value: String,
}

pub(crate) fn parse_kv(text: &str, path: &Path) -> Result<Vec<KvLine>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(path, line, format!("expected `key = value`, found {raw:?}")))?;
        let (key, value) = (k.trim(), v.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::parse(path, line, format!("empty key or value in {raw:?}")));
        }
        if out.iter().any(|l: &KvLine| l.key == key) {
            return Err(Error::parse(path, line, format!("duplicate key {key:?}")));
        }
        out.push(KvLine { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(out)
}

pub(crate) fn parse_f64(path: &Path, l: &KvLine) -> Result<f64> {
    l.value
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::parse(path, l.line, format!("{}: not a finite number: {:?}", l.key, l.value)))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
