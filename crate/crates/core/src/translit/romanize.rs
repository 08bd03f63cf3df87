//! Context rules layered over [`RomanizationTable`].
//!
//! The output is built on a small lattice: each position gets candidate
//! edges from single-codepoint and two-codepoint table entries, and the path
//! takes the longest edge at each step. A consonant's inherent vowel depends
//! on its neighbours:
//!
//! * dropped before a dependent vowel sign or a virama;
//! * kept after a virama (second member of a cluster) and at word start;
//! * dropped word-finally in Devanagari, kept word-finally elsewhere;
//! * kept when the neighbours belong to a different script, or the next
//!   codepoint is in the same script.
//!
//! A virama directly after a non-empty edge is absorbed into that edge, and
//! tail signs (anusvara, visarga, candrabindu) never take the vowel.

use super::table::{in_covered_block, CharClass, RomanizationTable, TableEntry};
use crate::data_model::Script;

const ZWNJ: char = '\u{200C}';
const ZWJ: char = '\u{200D}';

struct Edge {
    end: usize,
    text: String,
}

/// Splits a Latin form into (consonant base, base + inherent vowel) if it
/// is a bare consonant cluster, optionally already carrying the vowel.
fn consonant_base(rom: &str) -> Option<(String, String)> {
    let b = rom.as_bytes();
    let is_cons = |c: u8| b"bcdfghjklmnpqrstvwxyz".contains(&c);
    // ([cfghkmnqrstxy]?y)(a+)
    if let Some(y) = b.iter().position(|&c| c == b'y') {
        let head_ok = y == 0 || (y == 1 && b"cfghkmnqrstxy".contains(&b[0]));
        let tail = &b[y + 1..];
        if head_ok && !tail.is_empty() && tail.iter().all(|&c| c == b'a') {
            return Some((rom[..=y].to_owned(), rom.to_owned()));
        }
    }
    // ([consonants]+)a
    if b.len() >= 2 && b[b.len() - 1] == b'a' && b[..b.len() - 1].iter().all(|&c| is_cons(c)) {
        let base = &rom[..rom.len() - 1];
        return Some((base.to_owned(), rom.to_owned()));
    }
    if !b.is_empty() && b.iter().all(|&c| is_cons(c)) {
        return Some((rom.to_owned(), format!("{rom}a")));
    }
    None
}

fn has_r_vowel(rom: &str) -> bool {
    rom.as_bytes()
        .windows(2)
        .any(|w| w[0] == b'r' && b"aeiou".contains(&w[1]))
}

struct Ctx<'a> {
    table: &'a RomanizationTable,
    chars: &'a [char],
    /// alpha_end[p]: some edge ending at p has text ending in a letter.
    alpha_end: Vec<bool>,
}

impl Ctx<'_> {
    fn entry(&self, i: usize) -> Option<&TableEntry> {
        self.chars.get(i).and_then(|&c| self.table.get(c))
    }

    fn is_class(&self, i: usize, class: CharClass) -> bool {
        self.entry(i).is_some_and(|e| e.class == class)
    }

    fn is_nonspacing(&self, i: usize) -> bool {
        self.entry(i).is_some_and(|e| e.flags.nonspacing)
    }

    fn is_letter(&self, i: usize) -> bool {
        match self.chars.get(i) {
            None => false,
            Some(&c) if in_covered_block(c) => self.entry(i).is_some_and(|e| e.flags.alpha),
            Some(&c) => c.is_alphabetic(),
        }
    }

    fn script(&self, i: usize) -> Option<Script> {
        self.chars.get(i).and_then(|&c| self.table.script_of(c))
    }

    fn at_word_start(&self, pos: usize) -> bool {
        if pos == 0 {
            return true;
        }
        !(self.is_letter(pos - 1) || self.alpha_end[pos])
    }

    fn at_word_end(&self, pos: usize) -> bool {
        let n = self.chars.len();
        if pos >= n {
            return true;
        }
        if self.is_letter(pos) {
            return false;
        }
        let mut p = pos;
        while p + 1 < n && self.entry(p).is_some_and(|e| e.flags.nonspacing && e.flags.nukta) {
            p += 1;
        }
        let has_letter = |e: &TableEntry| e.latin.bytes().any(|b| b.is_ascii_alphabetic());
        if let Some(e) = self.entry(p) {
            if has_letter(e) {
                return false;
            }
        }
        if let (Some(&a), Some(&b)) = (self.chars.get(p), self.chars.get(p + 1)) {
            if self.table.get_pair(a, b).is_some_and(has_letter) {
                return false;
            }
        }
        if p < n && !in_covered_block(self.chars[p]) {
            return !self.chars[p].is_alphabetic();
        }
        true
    }

    /// Adds the inherent vowel where the context calls for it.
    fn inherent_vowel(&self, rom: &str, tail: bool, start: usize, end: usize) -> String {
        let Some(script) = self.script(start) else {
            return rom.to_owned();
        };
        let Some((base, with_vowel)) = consonant_base(rom) else {
            return rom.to_owned();
        };
        if tail {
            return rom.to_owned();
        }
        let next = end;
        if self.is_class(next, CharClass::VowelDep)
            || (self.is_nonspacing(next) && self.is_class(next + 1, CharClass::VowelDep))
            || self.is_class(next, CharClass::Virama)
            || (self.is_nonspacing(next) && self.is_class(next + 1, CharClass::Virama))
        {
            return base;
        }
        if start > 0 && self.is_class(start - 1, CharClass::Virama) {
            return with_vowel;
        }
        if self.at_word_start(start) && !has_r_vowel(rom) {
            return with_vowel;
        }
        if self.at_word_end(end) {
            return if script == Script::Devanagari {
                rom.to_owned()
            } else {
                with_vowel
            };
        }
        if start == 0 || self.script(start - 1) != Some(script) {
            return with_vowel;
        }
        if self.entry(end - 1).is_some_and(|e| e.flags.vocalic) {
            return base;
        }
        if self.script(next) == Some(script) {
            return with_vowel;
        }
        rom.to_owned()
    }
}

pub(super) fn romanize_with(table: &RomanizationTable, text: &str) -> String {
    if !text.chars().any(in_covered_block) {
        return text.to_owned();
    }
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut ctx = Ctx {
        table,
        chars: &chars,
        alpha_end: vec![false; n + 1],
    };
    let mut edges: Vec<Vec<Edge>> = (0..n).map(|_| Vec::new()).collect();

    for start in 0..n {
        let c = chars[start];
        if !in_covered_block(c) {
            continue;
        }
        let single = table.get(c).map(|e| (e, start + 1));
        let pair = chars
            .get(start + 1)
            .and_then(|&b| table.get_pair(c, b))
            .map(|e| (e, start + 2));
        let mut any = false;
        for (entry, end) in single.into_iter().chain(pair) {
            any = true;
            let text = ctx.inherent_vowel(&entry.latin, entry.tail, start, end);
            let end = if !text.is_empty() && ctx.is_class(end, CharClass::Virama) {
                end + 1
            } else {
                end
            };
            if text.bytes().last().is_some_and(|b| b.is_ascii_alphabetic()) {
                ctx.alpha_end[end] = true;
            }
            edges[start].push(Edge { end, text });
        }
        if !any {
            // Unassigned codepoint inside a covered block.
            edges[start].push(Edge {
                end: start + 1,
                text: String::new(),
            });
        }
    }

    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    while pos < n {
        let best = edges[pos]
            .iter()
            .fold(None::<&Edge>, |best, e| match best {
                Some(b) if b.end >= e.end => Some(b),
                _ => Some(e),
            });
        match best {
            Some(e) => {
                out.push_str(&e.text);
                pos = e.end;
            }
            None => {
                let c = chars[pos];
                let joiner_after_indic = (c == ZWJ || c == ZWNJ) && pos > 0 && in_covered_block(chars[pos - 1]);
                if !joiner_after_indic {
                    out.push(c);
                }
                pos += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consonant_base_patterns() {
        assert_eq!(consonant_base("k"), Some(("k".into(), "ka".into())));
        assert_eq!(consonant_base("ksh"), Some(("ksh".into(), "ksha".into())));
        assert_eq!(consonant_base("ya"), Some(("y".into(), "ya".into())));
        assert_eq!(consonant_base("ka"), Some(("k".into(), "ka".into())));
        assert_eq!(consonant_base("aa"), None);
        assert_eq!(consonant_base(""), None);
        assert_eq!(consonant_base("."), None);
    }
}
