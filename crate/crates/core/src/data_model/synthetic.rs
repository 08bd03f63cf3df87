//! Deterministic synthetic corpora with learnable text and metadata signal.
//!
//! Generative story, per corpus of `n` comments:
//!
//! * `max(1, n / comments_per_post)` posts. Each post draws a language from
//!   the weights and a propensity `tau ~ Beta(1.2, 1.3)`.
//! * Each comment picks a post uniformly and inherits its language. Its label
//!   is `Bernoulli(clamp(tau + offset(lang), 0.02, 0.98))`, where the
//!   per-language offset is `0.03 * (index mod 5) - 0.06`.
//! * Text is 3–12 words from a per-language neutral lexicon. With
//!   probability `abusive_rate_pos` (label 1) or `abusive_rate_neg` (label
//!   0), one or two words from the language's abusive lexicon are planted.
//!   With probability `romanized_rate` the whole comment is written in Latin
//!   script; with probability `emoji_rate` one or two emoji are appended.
//! * Counts are negative binomial (`Gamma(r = 2)`–Poisson mixture) with mean:
//!   post reports `u * (2 + 30 tau)`, post likes `u * (40 - 20 tau)`, where
//!   `u ~ U(0.3, 1)` is a per-comment snapshot fraction (so comments under
//!   one post see different post-level counts); comment reports
//!   `0.3 + 1.7 label`; comment likes `4 - 2 label`.
//!
//! Lexicons come from a fixed seed and do not depend on the corpus seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, Poisson};

use super::{CommentRecord, Corpus, CorpusRole, Language};
use crate::error::{invalid_arg, Result};
use crate::translit::{romanize, RomanizationTable};
use crate::util::derive_seed;

const LEXICON_SEED: u64 = 0x1d1c_70c5_a6e1_0001;
const NEUTRAL_WORDS: usize = 240;
const ABUSIVE_WORDS: usize = 24;
const NB_SHAPE: f64 = 2.0;
const EMOJI: &[&str] = &["😀", "😂", "🤣", "👍", "🔥", "🙏", "😡", "🤬", "💩", "👎🏽", "🚀", "👨‍👩‍👧"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticParams {
    pub comments_per_post: usize,
    pub abusive_rate_pos: f64,
    pub abusive_rate_neg: f64,
    pub romanized_rate: f64,
    pub emoji_rate: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            comments_per_post: 3,
            abusive_rate_pos: 0.7,
            abusive_rate_neg: 0.15,
            romanized_rate: 0.25,
            emoji_rate: 0.25,
        }
    }
}

struct Lexicon {
    neutral: Vec<String>,
    abusive: Vec<String>,
}

fn build_lexicon(lang: Language) -> Lexicon {
    let table = RomanizationTable::builtin();
    let script = lang.script();
    let cons = table.consonants(script);
    let signs = table.vowel_signs(script);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(LEXICON_SEED, lang.name()));
    let mut seen = std::collections::HashSet::new();
    let mut words = Vec::with_capacity(NEUTRAL_WORDS + ABUSIVE_WORDS);
    while words.len() < NEUTRAL_WORDS + ABUSIVE_WORDS {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push(cons[rng.random_range(0..cons.len())]);
            if rng.random_bool(0.6) {
                w.push(signs[rng.random_range(0..signs.len())]);
            }
        }
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    let abusive = words.split_off(NEUTRAL_WORDS);
    Lexicon { neutral: words, abusive }
}

fn neg_binomial(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let lambda = Gamma::new(NB_SHAPE, mean / NB_SHAPE)
        .expect("valid gamma")
        .sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

fn language_offset(lang: Language) -> f64 {
    0.03 * (lang.index() % 5) as f64 - 0.06
}

/// Generates `n` labeled records with the default parameters.
pub fn generate_synthetic_corpus(n: usize, seed: u64, weights: &[(Language, f64)]) -> Result<Corpus> {
    generate_synthetic_corpus_with(n, seed, weights, &SyntheticParams::default())
}

pub fn generate_synthetic_corpus_with(
    n: usize,
    seed: u64,
    weights: &[(Language, f64)],
    params: &SyntheticParams,
) -> Result<Corpus> {
    if n == 0 {
        return Err(invalid_arg!("synthetic corpus size must be at least 1"));
    }
    if weights.iter().any(|&(_, w)| !(w.is_finite() && w >= 0.0)) {
        return Err(invalid_arg!("language weights must be finite and non-negative"));
    }
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    if total <= 0.0 {
        return Err(invalid_arg!("language weights are all zero"));
    }
    if params.comments_per_post == 0 {
        return Err(invalid_arg!("comments_per_post must be at least 1"));
    }
    for (name, p) in [
        ("abusive_rate_pos", params.abusive_rate_pos),
        ("abusive_rate_neg", params.abusive_rate_neg),
        ("romanized_rate", params.romanized_rate),
        ("emoji_rate", params.emoji_rate),
    ] {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid_arg!("{name} must be in [0, 1], got {p}"));
        }
    }

    let mut lexicons: Vec<Option<Lexicon>> = (0..Language::ALL.len()).map(|_| None).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "synthetic-corpus"));
    let beta = Beta::new(1.2, 1.3).expect("valid beta");

    let n_posts = (n / params.comments_per_post).max(1);
    let posts: Vec<(Language, f64)> = (0..n_posts)
        .map(|_| {
            let mut x = rng.random::<f64>() * total;
            let mut lang = weights.iter().rev().find(|&&(_, w)| w > 0.0).unwrap().0;
            for &(l, w) in weights {
                if x < w {
                    lang = l;
                    break;
                }
                x -= w;
            }
            (lang, beta.sample(&mut rng))
        })
        .collect();

    let width = n.to_string().len().max(6);
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let post_index = rng.random_range(0..n_posts);
        let (lang, tau) = posts[post_index];
        let p_abusive = (tau + language_offset(lang)).clamp(0.02, 0.98);
        let label = u8::from(rng.random_bool(p_abusive));
        let lex = lexicons[lang.index()].get_or_insert_with(|| build_lexicon(lang));

        let len = rng.random_range(3..=12);
        let mut words: Vec<&str> = (0..len)
            .map(|_| lex.neutral[rng.random_range(0..lex.neutral.len())].as_str())
            .collect();
        let plant = if label == 1 { params.abusive_rate_pos } else { params.abusive_rate_neg };
        if rng.random_bool(plant) {
            for _ in 0..rng.random_range(1..=2) {
                let w = lex.abusive[rng.random_range(0..lex.abusive.len())].as_str();
                let at = rng.random_range(0..=words.len());
                words.insert(at, w);
            }
        }
        let mut text = words.join(" ");
        if rng.random_bool(params.romanized_rate) {
            text = romanize(&text);
        }
        if rng.random_bool(params.emoji_rate) {
            for _ in 0..rng.random_range(1..=2) {
                text.push(' ');
                text.push_str(EMOJI[rng.random_range(0..EMOJI.len())]);
            }
        }

        let snapshot = rng.random_range(0.3..1.0);
        let lab = f64::from(label);
        records.push(CommentRecord {
            comment_id: format!("c{i:0width$}"),
            text,
            language: lang,
            post_index: post_index as u64,
            report_count_post: neg_binomial(&mut rng, snapshot * (2.0 + 30.0 * tau)),
            like_count_post: neg_binomial(&mut rng, snapshot * (40.0 - 20.0 * tau)),
            report_count_comment: neg_binomial(&mut rng, 0.3 + 1.7 * lab),
            like_count_comment: neg_binomial(&mut rng, 4.0 - 2.0 * lab),
            label: Some(label),
        });
    }
    Corpus::new(records, CorpusRole::Train)
}
