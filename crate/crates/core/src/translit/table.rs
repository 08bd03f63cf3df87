//! Per-codepoint romanization data for the eight covered Indic blocks.
//!
//! File format, one entry per line:
//!
//! ```text
//! U+0915<TAB>k<TAB>consonant<TAB>alpha
//! U+0915 U+093C<TAB>q<TAB>consonant<TAB>-
//! ```
//!
//! The first field is one codepoint or a space-separated two-codepoint
//! sequence. `latin` is lowercase ASCII; a leading `+` marks a tail sign
//! (anusvara, visarga, ...) that attaches to the preceding syllable. `class`
//! is one of `consonant`, `vowel_ind`, `vowel_dep`, `virama`, `sign`, `digit`.
//! The optional fourth field is a comma list of `mn` (nonspacing mark),
//! `alpha` (letter), `nukta`, `vocalic`, `common` (not tied to one script),
//! or `-`. Lines starting with `#` are comments.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::data_model::Script;
use crate::error::{invalid_data, Error, Result};
use crate::util::fnv1a64;

pub(crate) const BUILTIN_TABLE: &str = include_str!("../../data/romanization.tsv");

/// FNV-1a 64 of `data/romanization.tsv`.
pub const BUILTIN_TABLE_CHECKSUM: u64 = 0x879a_8515_400c_e9b8;

const BLOCKS: [(Script, u32); 8] = [
    (Script::Devanagari, 0x0900),
    (Script::Bengali, 0x0980),
    (Script::Gujarati, 0x0A80),
    (Script::Odia, 0x0B00),
    (Script::Tamil, 0x0B80),
    (Script::Telugu, 0x0C00),
    (Script::Kannada, 0x0C80),
    (Script::Malayalam, 0x0D00),
];

/// Script block a codepoint falls in, ignoring the `common` flag.
pub fn block_of(c: char) -> Option<Script> {
    let cp = c as u32;
    if !(0x0900..=0x0D7F).contains(&cp) {
        return None;
    }
    BLOCKS
        .iter()
        .find(|(_, base)| (*base..*base + 0x80).contains(&cp))
        .map(|(s, _)| *s)
}

#[inline]
pub fn in_covered_block(c: char) -> bool {
    block_of(c).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharClass {
    Consonant,
    VowelInd,
    VowelDep,
    Virama,
    Sign,
    Digit,
}

impl FromStr for CharClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "consonant" => CharClass::Consonant,
            "vowel_ind" => CharClass::VowelInd,
            "vowel_dep" => CharClass::VowelDep,
            "virama" => CharClass::Virama,
            "sign" => CharClass::Sign,
            "digit" => CharClass::Digit,
            _ => return Err(invalid_data!("unknown character class {s:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CharFlags {
    pub nonspacing: bool,
    pub alpha: bool,
    pub nukta: bool,
    pub vocalic: bool,
    pub common: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    /// Latin output, without the tail marker.
    pub latin: String,
    pub tail: bool,
    pub class: CharClass,
    pub flags: CharFlags,
}

#[derive(Debug, Clone)]
pub struct RomanizationTable {
    singles: HashMap<char, TableEntry>,
    pairs: HashMap<(char, char), TableEntry>,
    checksum: u64,
}

fn parse_codepoint(tok: &str) -> Option<char> {
    let hex = tok.strip_prefix("U+")?;
    char::from_u32(u32::from_str_radix(hex, 16).ok()?)
}

impl RomanizationTable {
    /// The table shipped with the crate, parsed once.
    pub fn builtin() -> &'static RomanizationTable {
        static TABLE: OnceLock<RomanizationTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            RomanizationTable::parse(BUILTIN_TABLE).expect("built-in romanization table is valid")
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::schema(path, e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut singles = HashMap::new();
        let mut pairs = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(invalid_data!("line {lineno}: expected 3 or 4 tab-separated fields"));
            }
            let cps = fields[0]
                .split(' ')
                .map(parse_codepoint)
                .collect::<Option<Vec<char>>>()
                .ok_or_else(|| invalid_data!("line {lineno}: bad codepoint field {:?}", fields[0]))?;
            let (latin, tail) = match fields[1].strip_prefix('+') {
                Some(rest) => (rest, true),
                None => (fields[1], false),
            };
            if !latin
                .bytes()
                .all(|b| b.is_ascii() && !b.is_ascii_uppercase() && !b.is_ascii_control())
            {
                return Err(invalid_data!("line {lineno}: output {latin:?} is not lowercase ASCII"));
            }
            let class: CharClass = fields[2]
                .parse()
                .map_err(|e: Error| invalid_data!("line {lineno}: {e}"))?;
            let mut flags = CharFlags::default();
            for f in fields.get(3).copied().unwrap_or("-").split(',') {
                match f {
                    "-" | "" => {}
                    "mn" => flags.nonspacing = true,
                    "alpha" => flags.alpha = true,
                    "nukta" => flags.nukta = true,
                    "vocalic" => flags.vocalic = true,
                    "common" => flags.common = true,
                    other => return Err(invalid_data!("line {lineno}: unknown flag {other:?}")),
                }
            }
            if !cps.iter().all(|&c| in_covered_block(c)) {
                return Err(invalid_data!("line {lineno}: codepoint outside the covered blocks"));
            }
            let entry = TableEntry {
                latin: latin.to_owned(),
                tail,
                class,
                flags,
            };
            let dup = match cps.as_slice() {
                [c] => singles.insert(*c, entry).is_some(),
                [a, b] => pairs.insert((*a, *b), entry).is_some(),
                _ => return Err(invalid_data!("line {lineno}: sequences are limited to two codepoints")),
            };
            if dup {
                return Err(invalid_data!("line {lineno}: duplicate entry {:?}", fields[0]));
            }
        }
        Ok(RomanizationTable {
            singles,
            pairs,
            checksum: fnv1a64(text.as_bytes()),
        })
    }

    pub fn checksum(&self) -> u64 {
        self.checksum
    }

    pub fn get(&self, c: char) -> Option<&TableEntry> {
        self.singles.get(&c)
    }

    pub fn get_pair(&self, a: char, b: char) -> Option<&TableEntry> {
        self.pairs.get(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.singles.len() + self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.singles.is_empty() && self.pairs.is_empty()
    }

    /// Script the romanizer attributes to `c`: its block, unless flagged common.
    pub(crate) fn script_of(&self, c: char) -> Option<Script> {
        match self.singles.get(&c) {
            Some(e) if e.flags.common => None,
            _ => block_of(c),
        }
    }

    fn sorted_singles(&self, script: Script, pred: impl Fn(&TableEntry) -> bool) -> Vec<char> {
        let mut out: Vec<char> = self
            .singles
            .iter()
            .filter(|(c, e)| block_of(**c) == Some(script) && !e.flags.common && pred(e))
            .map(|(c, _)| *c)
            .collect();
        out.sort_unstable();
        out
    }

    /// Plain consonant letters of a script (no nukta forms), in codepoint order.
    pub fn consonants(&self, script: Script) -> Vec<char> {
        self.sorted_singles(script, |e| {
            e.class == CharClass::Consonant && e.flags.alpha && !e.latin.is_empty() && !e.flags.nukta
        })
    }

    /// Dependent vowel signs of a script, in codepoint order.
    pub fn vowel_signs(&self, script: Script) -> Vec<char> {
        self.sorted_singles(script, |e| {
            e.class == CharClass::VowelDep && !e.latin.is_empty() && !e.flags.vocalic
        })
    }

    pub fn virama(&self, script: Script) -> Option<char> {
        self.sorted_singles(script, |e| e.class == CharClass::Virama)
            .first()
            .copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses_and_checksum_is_pinned() {
        let t = RomanizationTable::builtin();
        assert!(t.len() > 700);
        assert_eq!(
            t.checksum(),
            BUILTIN_TABLE_CHECKSUM,
            "table changed: update BUILTIN_TABLE_CHECKSUM to {:#018x}",
            t.checksum()
        );
    }

    #[test]
    fn outputs_are_lowercase_ascii() {
        let t = RomanizationTable::builtin();
        for e in t.singles.values().chain(t.pairs.values()) {
            assert!(e.latin.is_ascii());
            assert!(!e.latin.bytes().any(|b| b.is_ascii_uppercase()));
        }
    }

    #[test]
    fn letters_signs_and_digits_are_covered() {
        let t = RomanizationTable::builtin();
        // Consonant rows shared by all eight blocks (KA, TA, NA, PA, MA, YA, RA, HA).
        for (_, base) in BLOCKS {
            for off in [0x15, 0x24, 0x28, 0x2A, 0x2E, 0x2F, 0x30, 0x39] {
                let c = char::from_u32(base + off).unwrap();
                let e = t.get(c).unwrap_or_else(|| panic!("missing {:04X}", base + off));
                assert_eq!(e.class, CharClass::Consonant, "{:04X}", base + off);
            }
            for off in 0x66..=0x6F {
                let c = char::from_u32(base + off).unwrap();
                let e = t.get(c).unwrap();
                assert_eq!(e.class, CharClass::Digit);
                assert_eq!(e.latin, (off - 0x66).to_string());
            }
            let virama = char::from_u32(base + 0x4D).unwrap();
            assert_eq!(t.get(virama).unwrap().class, CharClass::Virama);
        }
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(RomanizationTable::parse("U+0915\tK\tconsonant\n").is_err());
        assert!(RomanizationTable::parse("U+0041\ta\tconsonant\n").is_err());
        assert!(RomanizationTable::parse("U+0915\tk\tweird\n").is_err());
        assert!(RomanizationTable::parse("U+0915\tk\n").is_err());
        assert!(RomanizationTable::parse("U+0915\tk\tconsonant\nU+0915\tk\tconsonant\n").is_err());
        assert!(RomanizationTable::parse("# only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn generator_helpers() {
        let t = RomanizationTable::builtin();
        let cons = t.consonants(Script::Devanagari);
        assert!(cons.contains(&'क') && cons.contains(&'ह'));
        assert!(t.vowel_signs(Script::Tamil).contains(&'ா'));
        assert_eq!(t.virama(Script::Malayalam), Some('്'));
    }
}
