//! Rule-table suffix stemmer for Swedish and Spanish.
//!
//! A fixed, versioned approximation of Snowball-style suffix stripping:
//! lowercase the token, then repeatedly strip the longest matching suffix
//! from the table as long as at least [`MIN_STEM_CHARS`] characters remain.
//! Unknown languages get the lowercase identity. The same stemmer is applied
//! to every corpus being compared, so absolute values depend on the table but
//! comparisons do not.

use crate::corpus::Language;

/// Bump when a rule table changes; recorded in reports so stored diversity
/// numbers can be traced to the rules that produced them.
pub const STEMMER_VERSION: &str = "stem-v1";

const MIN_STEM_CHARS: usize = 3;

/// Longest-match-first; each table is sorted by suffix length descending so a
/// linear scan finds the longest applicable rule.
const SV_SUFFIXES: &[&str] = &[
    "heterna", "heternas", "heten", "hetens", "erna", "arna", "orna", "ernas", "arnas", "ornas",
    "ande", "ende", "aste", "arne", "aren", "het", "ade", "are", "ast", "ans", "ens", "ern", "en",
    "ar", "or", "er", "at", "na", "et", "as", "es", "a", "e", "s",
];

const ES_SUFFIXES: &[&str] = &[
    "amientos", "imientos", "amiento", "imiento", "aciones", "uciones", "adoras", "adores",
    "ancias", "ación", "ución", "adora", "antes", "ancia", "mente", "idades", "anzas",
    "ismos", "ables", "ibles", "istas", "ador", "ante", "anza", "icos", "icas", "ismo", "able",
    "ible", "ista", "osos", "osas", "idad", "ivas", "ivos", "ados", "idos", "amos", "emos",
    "imos", "aron", "ieron", "ando", "iendo", "ico", "ica", "oso", "osa", "iva", "ivo", "ado",
    "ido", "ias", "ios", "les", "nes", "es", "as", "os", "an", "ar", "er", "ir", "ía", "ó", "a",
    "e", "o", "s",
];

fn table(language: Language) -> Option<&'static [&'static str]> {
    match language {
        Language::Sv => Some(SV_SUFFIXES),
        Language::Es => Some(ES_SUFFIXES),
        Language::Other => None,
    }
}

fn strip_once(word: &str, suffixes: &[&str]) -> Option<usize> {
    let char_count = word.chars().count();
    let mut best: Option<usize> = None;
    for suffix in suffixes {
        if word.ends_with(suffix) {
            let remaining = char_count - suffix.chars().count();
            if remaining >= MIN_STEM_CHARS && best.map_or(true, |b| suffix.len() > b) {
                best = Some(suffix.len());
            }
        }
    }
    best
}

/// Stems a single token. Deterministic; idempotent by construction (stripping
/// runs to a fixed point).
pub fn stem(token: &str, language: Language) -> String {
    let mut word = token.to_lowercase();
    let Some(suffixes) = table(language) else {
        return word;
    };
    while let Some(len) = strip_once(&word, suffixes) {
        word.truncate(word.len() - len);
    }
    word
}
