//! Lexical comprehensibility scoring: TF-IDF vectors over a two-document
//! corpus plus cosine similarity.
//!
//! The math is pinned so every consumer agrees bit-for-bit:
//! `raw_weight = count(t, d) * (ln((1 + N) / (1 + df(t))) + 1)`, followed by
//! L2 normalization. No stemming, no stop words; the pipeline is lexical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("every document in the corpus is empty")]
    AllDocumentsEmpty,
}

/// Sparse token-weight vector with its Euclidean norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenVector {
    pub weights: BTreeMap<String, f64>,
    pub norm: f64,
}

impl TokenVector {
    pub fn new(weights: BTreeMap<String, f64>) -> Self {
        let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
        TokenVector { weights, norm }
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Comprehensibility score between two texts, stored as a fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    pub score: f64,
    /// Distinct tokens present in both documents.
    pub shared_tokens: usize,
    /// N of the corpus the vectors were built over.
    pub corpus_size: usize,
    /// True only for the both-empty convention case.
    #[serde(default)]
    pub degenerate: bool,
}

/// Lowercase tokens split on any non-alphanumeric character; digit runs stay
/// whole tokens; empty tokens are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            for lc in c.to_lowercase() {
                cur.push(lc);
            }
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

/// TF-IDF vectors for a corpus of tokenized documents, L2-normalized.
pub fn tfidf_vectors(docs: &[Vec<String>]) -> Result<Vec<TokenVector>, SimilarityError> {
    if docs.iter().all(|d| d.is_empty()) {
        return Err(SimilarityError::AllDocumentsEmpty);
    }
    let n = docs.len() as f64;
    let mut df: BTreeMap<&str, f64> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0.0) += 1.0;
        }
    }
    let vectors = docs
        .iter()
        .map(|doc| {
            let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
            for t in doc {
                *counts.entry(t).or_insert(0.0) += 1.0;
            }
            let mut weights = BTreeMap::new();
            for (t, count) in counts {
                let idf = ((1.0 + n) / (1.0 + df[t])).ln() + 1.0;
                weights.insert(t.to_string(), count * idf);
            }
            let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
            if norm > 0.0 {
                for w in weights.values_mut() {
                    *w /= norm;
                }
            }
            TokenVector::new(weights)
        })
        .collect();
    Ok(vectors)
}

/// Cosine of two token vectors, clamped to [0, 1]. Zero-norm vectors score 0.
pub fn cosine(u: &TokenVector, v: &TokenVector) -> f64 {
    if u.norm == 0.0 || v.norm == 0.0 {
        return 0.0;
    }
    // identical weight maps are mathematically cos = 1; avoid fp residue
    if u.weights == v.weights {
        return 1.0;
    }
    let (small, large) = if u.weights.len() <= v.weights.len() {
        (u, v)
    } else {
        (v, u)
    };
    let dot: f64 = small
        .weights
        .iter()
        .filter_map(|(t, w)| large.weights.get(t).map(|x| w * x))
        .sum();
    (dot / (u.norm * v.norm)).clamp(0.0, 1.0)
}

/// Score how much of `original` survives in `generated`, over exactly the
/// two-document corpus {original, generated}.
pub fn comprehensibility(original: &str, generated: &str) -> SimilarityResult {
    let a = tokenize(original);
    let b = tokenize(generated);
    if a.is_empty() && b.is_empty() {
        return SimilarityResult {
            score: 1.0,
            shared_tokens: 0,
            corpus_size: 2,
            degenerate: true,
        };
    }
    let docs = vec![a, b];
    let vectors = tfidf_vectors(&docs).expect("corpus has a non-empty document");
    let shared_tokens = vectors[0]
        .weights
        .keys()
        .filter(|t| vectors[1].weights.contains_key(*t))
        .count();
    SimilarityResult {
        score: cosine(&vectors[0], &vectors[1]),
        shared_tokens,
        corpus_size: 2,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_splits_on_non_alphanumeric() {
        assert_eq!(
            tokenize("Insert your Security-Key!"),
            vec!["insert", "your", "security", "key"]
        );
        assert_eq!(tokenize("code 123 456"), vec!["code", "123", "456"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
    }

    #[test]
    fn single_doc_weights_match_hand_evaluation() {
        // N=1, both idf terms ln(2/2)+1 = 1; pre-norm a:2 b:1; norm sqrt(5)
        let v = tfidf_vectors(&[vec!["a".into(), "a".into(), "b".into()]]).unwrap();
        let a = v[0].weights["a"];
        let b = v[0].weights["b"];
        assert!((a - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((b - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((v[0].norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_docs_get_identical_vectors() {
        let doc = vec!["insert".to_string(), "key".to_string()];
        let v = tfidf_vectors(&[doc.clone(), doc]).unwrap();
        assert_eq!(v[0], v[1]);
    }

    #[test]
    fn single_token_doc_is_a_unit_vector() {
        let v = tfidf_vectors(&[vec!["otp".into()]]).unwrap();
        assert!((v[0].weights["otp"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_empty_corpus_is_an_error() {
        assert_eq!(
            tfidf_vectors(&[vec![], vec![]]).unwrap_err(),
            SimilarityError::AllDocumentsEmpty
        );
    }

    #[test]
    fn cosine_identity_and_disjoint() {
        let v = tfidf_vectors(&[vec!["a".into(), "b".into()], vec!["c".into()]]).unwrap();
        assert_eq!(cosine(&v[0], &v[0]), 1.0);
        assert_eq!(cosine(&v[0], &v[1]), 0.0);
    }

    #[test]
    fn two_doc_cosine_matches_frozen_oracle_value() {
        // docs ["a"], ["a","b"]; independent evaluation of the pinned
        // formulas gives 1/sqrt(1 + (ln(3/2)+1)^2) = 0.57973867153766567
        let v = tfidf_vectors(&[vec!["a".into()], vec!["a".into(), "b".into()]]).unwrap();
        assert!((cosine(&v[0], &v[1]) - 0.579_738_671_537_665_67).abs() < 1e-12);
    }

    #[test]
    fn comprehensibility_endpoints() {
        let r = comprehensibility("verify your identity", "verify your identity");
        assert_eq!(r.score, 1.0);
        assert!(!r.degenerate);
        assert_eq!(r.shared_tokens, 3);

        let r = comprehensibility("alpha beta", "gamma delta");
        assert_eq!(r.score, 0.0);
        assert_eq!(r.shared_tokens, 0);

        let r = comprehensibility("", "");
        assert_eq!(r.score, 1.0);
        assert!(r.degenerate);

        let r = comprehensibility("alpha beta", "");
        assert_eq!(r.score, 0.0);
    }

    #[test]
    fn deleting_half_the_tokens_scores_below_one() {
        let original = "press the login button then enter the six digit code from your phone";
        let generated = "press the login then the six code your";
        let r = comprehensibility(original, generated);
        assert!(r.score < 1.0);
        assert!(r.score > 0.0);
    }

    #[test]
    fn symmetry_and_order_invariance() {
        let a = "insert your security key and touch it";
        let b = "touch it and insert security your key";
        let ab = comprehensibility(a, b).score;
        let ba = comprehensibility(b, a).score;
        assert!((ab - ba).abs() < 1e-12);
        // b is a permutation of a minus nothing: counts equal, score exactly 1
        assert_eq!(ab, 1.0);
    }

    #[test]
    fn scale_invariance_of_cosine() {
        let doc: Vec<String> = ["otp", "code", "code"].iter().map(|s| s.to_string()).collect();
        let doubled: Vec<String> = doc.iter().chain(doc.iter()).cloned().collect();
        let single = tfidf_vectors(&[doc.clone(), vec!["code".into()]]).unwrap();
        let scaled = tfidf_vectors(&[doubled, vec!["code".into()]]).unwrap();
        assert!((cosine(&single[0], &single[1]) - cosine(&scaled[0], &scaled[1])).abs() < 1e-12);
    }
}
