//! Token feature templates.

pub const FEATURE_TEMPLATE_VERSION: &str = "ft-v1";

pub(crate) const BOS_WORD: &str = "<s>";
pub(crate) const EOS_WORD: &str = "</s>";

/// Word shape: uppercase -> X, lowercase -> x, digit -> d, anything else kept.
/// Runs longer than four characters are truncated, so "Stockholm" -> "Xxxxx".
fn shape(word: &str) -> String {
    let mut out = String::new();
    let mut run_char = '\0';
    let mut run_len = 0;
    for c in word.chars() {
        let mapped = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            c
        };
        if mapped == run_char {
            run_len += 1;
        } else {
            run_char = mapped;
            run_len = 1;
        }
        if run_len <= 4 {
            out.push(mapped);
        }
    }
    out
}

fn affix(chars: &[char], n: usize, suffix: bool) -> Option<String> {
    if chars.len() < n {
        return None;
    }
    let slice = if suffix {
        &chars[chars.len() - n..]
    } else {
        &chars[..n]
    };
    Some(slice.iter().collect())
}

/// Static features of the token at `index`: word identity, lowercase form,
/// shape, prefixes/suffixes of length 1-3, and the neighboring words (with
/// sentinels at the edges). The previous predicted label is added separately
/// during decoding.
pub fn featurize(tokens: &[String], index: usize) -> Vec<String> {
    assert!(index < tokens.len(), "index out of bounds");
    let word = &tokens[index];
    let chars: Vec<char> = word.chars().collect();
    let mut feats = vec![
        format!("w={word}"),
        format!("lw={}", word.to_lowercase()),
        format!("shape={}", shape(word)),
    ];
    for n in 1..=3 {
        if let Some(p) = affix(&chars, n, false) {
            feats.push(format!("pre{n}={p}"));
        }
        if let Some(s) = affix(&chars, n, true) {
            feats.push(format!("suf{n}={s}"));
        }
    }
    let prev = if index == 0 {
        BOS_WORD
    } else {
        &tokens[index - 1]
    };
    let next = if index + 1 == tokens.len() {
        EOS_WORD
    } else {
        &tokens[index + 1]
    };
    feats.push(format!("prev={prev}"));
    feats.push(format!("next={next}"));
    feats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn shape_and_suffix_of_stockholm() {
        let feats = featurize(&toks(&["Stockholm"]), 0);
        assert!(feats.contains(&"shape=Xxxxx".to_string()), "{feats:?}");
        assert!(feats.contains(&"suf3=olm".to_string()));
        assert!(feats.contains(&"w=Stockholm".to_string()));
    }

    #[test]
    fn digit_shapes() {
        assert_eq!(shape("2019-03-14"), "dddd-dd-dd");
        assert_eq!(shape("070-1234567"), "ddd-dddd");
    }

    #[test]
    fn first_token_gets_bos_sentinel() {
        let feats = featurize(&toks(&["Hej", "du"]), 0);
        assert!(feats.contains(&"prev=<s>".to_string()));
        assert!(feats.contains(&"next=du".to_string()));
        let last = featurize(&toks(&["Hej", "du"]), 1);
        assert!(last.contains(&"next=</s>".to_string()));
    }

    #[test]
    fn featurize_is_deterministic() {
        let t = toks(&["a", "bcd", "E9"]);
        assert_eq!(featurize(&t, 1), featurize(&t, 1));
    }
}
