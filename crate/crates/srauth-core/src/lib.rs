//! Evaluation toolkit for screen-reader assisted authentication.
//!
//! The crate scores how comprehensibly screen readers convey authentication
//! workflows (TF-IDF cosine over ground truth vs. transcript), classifies
//! communicability failures from transcripts, flags phonetically
//! indistinguishable phishing domains, and simulates attacks on 2FA/MFA
//! flows under per-reader capability profiles.

pub mod analyzer;
pub mod ingest;
pub mod model;
pub mod numberspeak;
pub mod phonetics;
pub mod report;
pub mod sim;
pub mod similarity;

pub use analyzer::{analyze, AnalyzerConfig, IssueCode, IssueFinding, IssueReport};
pub use model::{
    full_transcript, validate_workflow, AuthCategory, AuthMethod, Channel, CriticalElement,
    ElementKind, ElementLocation, PlatformKind, PlatformSetting, ScreenReaderProfile,
    SessionRecord, SettingKind, TranscriptEvent, Verdict, WorkflowSpec,
};
pub use numberspeak::{
    classify_otp, number_to_digit_words, number_to_numeric_words, words_to_number,
    OtpPronunciation, PronunciationStyle,
};
pub use phonetics::{flag_lookalikes, spoken_key, spoken_similarity, SpokenKey};
pub use sim::{run_attack, run_matrix, AttackKind, AttackOutcome, SimConfig};
pub use similarity::{comprehensibility, cosine, tfidf_vectors, tokenize, SimilarityResult};
