//! Spoken-form modeling of domain names.
//!
//! Screen readers pronounce domains as whole words, so "bankoffamerica"
//! sounds like "bankofamerica". A domain is reduced to a spoken key by
//! collapsing doubled letters and applying a small ordered homophone rewrite
//! table; equal keys mean the text-to-speech output is indistinguishable.
//! The table deliberately stays small: heavier grapheme-to-phoneme models add
//! false positives without changing the attack surface.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhoneticsError {
    #[error("domain {0:?} contains no letters")]
    NoLetters(String),
    #[error("empty domain")]
    EmptyDomain,
}

/// Normalized spoken form of one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpokenKey {
    /// Lowercase letters only.
    pub key: String,
    pub source_domain: String,
}

/// Scheme, path, and subdomains stripped: the last two dot-separated labels.
/// A public-suffix list is deliberately not consulted.
fn registrable_part(domain: &str) -> &str {
    let no_scheme = domain
        .find("://")
        .map(|i| &domain[i + 3..])
        .unwrap_or(domain);
    let host = no_scheme
        .split(['/', '?', '#'])
        .next()
        .unwrap_or(no_scheme);
    let host = host.split('@').next_back().unwrap_or(host);
    let host = host.split(':').next().unwrap_or(host);
    let labels: Vec<&str> = host.split('.').filter(|l| !l.is_empty()).collect();
    if labels.len() <= 2 {
        return host.trim_matches('.');
    }
    let tail_len: usize = labels[labels.len() - 2..]
        .iter()
        .map(|l| l.len())
        .sum::<usize>()
        + 1;
    &host[host.len() - tail_len..]
}

fn collapse_runs(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev = None;
    for c in s.chars() {
        if Some(c) != prev {
            out.push(c);
        }
        prev = Some(c);
    }
    out
}

/// The homophone-cluster rewrites, applied in this fixed order.
fn apply_rewrites(s: &str) -> String {
    let mut cur = s.replace("ph", "f");
    cur = cur.replace("ck", "k");
    cur = cur.replace("qu", "kw");
    cur = cur.replace("x", "ks");
    // c -> s before e/i/y, else c -> k
    let chars: Vec<char> = cur.chars().collect();
    let mut rewritten = String::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        if c == 'c' {
            match chars.get(i + 1) {
                Some('e') | Some('i') | Some('y') => rewritten.push('s'),
                _ => rewritten.push('k'),
            }
        } else {
            rewritten.push(c);
        }
    }
    cur = rewritten.replace("z", "s");
    cur.replace("wh", "w")
}

/// Spoken key of a domain: registrable labels, letters only, runs collapsed,
/// homophone clusters rewritten.
pub fn spoken_key(domain: &str) -> Result<SpokenKey, PhoneticsError> {
    if domain.trim().is_empty() {
        return Err(PhoneticsError::EmptyDomain);
    }
    let letters: String = registrable_part(domain.trim())
        .chars()
        .flat_map(|c| c.to_lowercase())
        .filter(|c| c.is_ascii_lowercase())
        .collect();
    if letters.is_empty() {
        return Err(PhoneticsError::NoLetters(domain.to_string()));
    }
    Ok(SpokenKey {
        key: apply_rewrites(&collapse_runs(&letters)),
        source_domain: domain.trim().to_string(),
    })
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut prev_diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = if ca == cb { 0 } else { 1 };
            let next = (row[j] + 1).min(row[j + 1] + 1).min(prev_diag + cost);
            prev_diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// How alike two domains sound: 1.0 for equal keys, otherwise one minus the
/// normalized edit distance between keys.
pub fn spoken_similarity(d1: &str, d2: &str) -> Result<f64, PhoneticsError> {
    let k1 = spoken_key(d1)?;
    let k2 = spoken_key(d2)?;
    if k1.key == k2.key {
        return Ok(1.0);
    }
    let max_len = k1.key.chars().count().max(k2.key.chars().count());
    Ok(1.0 - levenshtein(&k1.key, &k2.key) as f64 / max_len as f64)
}

/// Trusted domains the candidate sounds like, most similar first.
///
/// A candidate that string-equals a trusted domain is not flagged: it *is*
/// that domain.
pub fn flag_lookalikes(
    candidate: &str,
    trusted: &[String],
    threshold: f64,
) -> Result<Vec<(String, f64)>, PhoneticsError> {
    let mut flags = Vec::new();
    for t in trusted {
        if t == candidate {
            return Ok(Vec::new());
        }
        let s = spoken_similarity(candidate, t)?;
        if s >= threshold {
            flags.push((t.clone(), s));
        }
    }
    flags.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(flags)
}

pub const DEFAULT_LOOKALIKE_THRESHOLD: f64 = 0.9;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubled_letter_domains_share_a_key() {
        let a = spoken_key("bankofamerica.com").unwrap();
        let b = spoken_key("bankoffamerica.com").unwrap();
        assert_eq!(a.key, b.key);
        let a = spoken_key("wellsfargo.com").unwrap();
        let b = spoken_key("wellssfargo.com").unwrap();
        assert_eq!(a.key, b.key);
    }

    #[test]
    fn identity_key() {
        assert_eq!(
            spoken_key("abc.com").unwrap().key,
            spoken_key("abc.com").unwrap().key
        );
    }

    #[test]
    fn scheme_path_and_subdomains_are_stripped() {
        let a = spoken_key("https://www.bankofamerica.com/login?next=1").unwrap();
        let b = spoken_key("bankofamerica.com").unwrap();
        assert_eq!(a.key, b.key);
    }

    #[test]
    fn homophone_rewrites() {
        assert_eq!(spoken_key("phone.com").unwrap().key, "fonekom");
        assert_eq!(spoken_key("quick.com").unwrap().key, "kwikkom");
        assert_eq!(spoken_key("xero.com").unwrap().key, "kserokom");
        assert_eq!(spoken_key("city.com").unwrap().key, "sitykom");
        assert_eq!(spoken_key("zone.com").unwrap().key, "sonekom");
        assert_eq!(spoken_key("white.com").unwrap().key, "witekom");
    }

    #[test]
    fn key_is_lowercase_letters_only() {
        let k = spoken_key("Bank-Of-America123.com").unwrap();
        assert!(k.key.chars().all(|c| c.is_ascii_lowercase()));
    }

    #[test]
    fn no_letter_domain_is_an_error() {
        assert!(matches!(
            spoken_key("123.456"),
            Err(PhoneticsError::NoLetters(_))
        ));
    }

    #[test]
    fn similarity_is_reflexive_and_symmetric() {
        assert_eq!(spoken_similarity("example.com", "example.com").unwrap(), 1.0);
        let ab = spoken_similarity("example.com", "zq.org").unwrap();
        let ba = spoken_similarity("zq.org", "example.com").unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn unrelated_domains_score_low() {
        // keys: eksamplekom vs skorg; oracle edit distance computed by the
        // full-matrix evaluation in the acceptance suite
        let s = spoken_similarity("example.com", "zq.org").unwrap();
        assert!(s < 0.8, "{s}");
    }

    #[test]
    fn doubling_any_letter_never_changes_the_key() {
        let base = "wellsfargo.com";
        let key = spoken_key(base).unwrap().key;
        for (i, c) in base.char_indices() {
            if !c.is_ascii_alphabetic() {
                continue;
            }
            let mut doubled = String::new();
            doubled.push_str(&base[..i]);
            doubled.push(c);
            doubled.push_str(&base[i..]);
            assert_eq!(spoken_key(&doubled).unwrap().key, key, "doubling {c} at {i}");
        }
    }

    #[test]
    fn lookalike_flags() {
        let trusted = vec!["bankofamerica.com".to_string()];
        let flags = flag_lookalikes("bankoffamerica.com", &trusted, 0.9).unwrap();
        assert_eq!(flags, vec![("bankofamerica.com".to_string(), 1.0)]);

        // exact trusted domain is never flagged
        let flags = flag_lookalikes("bankofamerica.com", &trusted, 0.9).unwrap();
        assert!(flags.is_empty());

        let flags = flag_lookalikes("zq.org", &trusted, 0.9).unwrap();
        assert!(flags.is_empty());
    }

    #[test]
    fn flags_are_sorted_and_thresholded() {
        let trusted = vec![
            "wellsfargo.com".to_string(),
            "wellssfargo.com".to_string(),
            "paypal.com".to_string(),
        ];
        let flags = flag_lookalikes("welsfargo.com", &trusted, 0.5).unwrap();
        assert!(flags.len() >= 2);
        assert!(flags.windows(2).all(|w| w[0].1 >= w[1].1));
        assert!(flags.iter().all(|f| f.1 >= 0.5));
    }
}
