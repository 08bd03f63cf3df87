//! Emoji stripping, Indic-script romanization and transliteration-based
//! corpus augmentation.

mod romanize;
mod table;

use rayon::prelude::*;

use crate::data_model::{CommentRecord, Corpus, CorpusRole};
use crate::error::{invalid_arg, Result};

pub use table::{
    block_of, in_covered_block, CharClass, CharFlags, RomanizationTable, TableEntry,
    BUILTIN_TABLE_CHECKSUM,
};

/// Suffix appended to the comment id of an augmented (romanized) copy.
pub const TRANSLIT_ID_SUFFIX: &str = "__tr";

const ZWJ: char = '\u{200D}';
const VS16: char = '\u{FE0F}';

/// Emoji codepoints removed by [`strip_emoji`]: the Emoticons,
/// Miscellaneous Symbols and Pictographs (which holds the skin-tone
/// modifiers U+1F3FB..U+1F3FF), Transport and Map, and Supplemental Symbols
/// and Pictographs blocks, plus variation selector 16.
pub fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F300..=0x1F5FF
        | 0x1F600..=0x1F64F
        | 0x1F680..=0x1F6FF
        | 0x1F900..=0x1F9FF
        | 0xFE0F)
}

/// Removes emoji, VS16, skin tones and the zero-width joiners that glue
/// emoji sequences together. A ZWJ between two non-emoji codepoints (as in
/// Indic conjunct shaping) is kept.
pub fn strip_emoji(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if is_emoji(c) || c == VS16 {
            continue;
        }
        if c == ZWJ {
            let prev = i.checked_sub(1).map(|j| chars[j]);
            let next = chars.get(i + 1).copied();
            if prev.is_some_and(is_emoji) || next.is_some_and(is_emoji) {
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// Romanizes the covered Indic blocks with the built-in table. Everything
/// else passes through unchanged, so scripts outside the eight covered
/// blocks (Perso-Arabic, Gurmukhi, ...) survive as-is.
pub fn romanize(text: &str) -> String {
    RomanizationTable::builtin().romanize(text)
}

impl RomanizationTable {
    pub fn romanize(&self, text: &str) -> String {
        romanize::romanize_with(self, text)
    }
}

/// Emoji-free romanized form used for augmentation and transliterated scoring.
pub fn transliterate(text: &str) -> String {
    romanize(&strip_emoji(text))
}

/// Appends a romanized copy of every record whose text changes under
/// romanization. Copies keep label and metadata and get `__tr` appended to
/// their id; originals come first, copies follow in original order.
pub fn augment_corpus(corpus: &Corpus) -> Result<Corpus> {
    if corpus.role() != CorpusRole::Train || !corpus.has_labels() {
        return Err(invalid_arg!("augmentation needs a labeled train corpus"));
    }
    let copies: Vec<Option<CommentRecord>> = corpus
        .records()
        .par_iter()
        .map(|r| {
            let stripped = strip_emoji(&r.text);
            let rom = romanize(&stripped);
            (rom != stripped).then(|| CommentRecord {
                comment_id: format!("{}{TRANSLIT_ID_SUFFIX}", r.comment_id),
                text: rom,
                ..r.clone()
            })
        })
        .collect();
    let mut records = corpus.records().to_vec();
    records.extend(copies.into_iter().flatten());
    Corpus::new(records, CorpusRole::Train)
}
