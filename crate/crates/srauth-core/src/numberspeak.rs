//! English cardinal number words: generation, strict parsing, and
//! classification of how an OTP was spoken in a transcript.
//!
//! The parser accepts canonical American cardinals from zero up to
//! 999,999,999,999 ("and" is permitted and ignored). Generation emits the
//! canonical form without "and", so generate-then-parse always round-trips.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Channel, SessionRecord};
use crate::similarity::tokenize;

pub const MAX_SUPPORTED: u64 = 999_999_999_999;

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];
const SCALES: [(&str, u64); 3] = [
    ("billion", 1_000_000_000),
    ("million", 1_000_000),
    ("thousand", 1_000),
];

#[derive(Debug, Error, PartialEq)]
pub enum NumberError {
    #[error("unknown number word {token:?} at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error("unexpected token {token:?} at position {position}: {reason}")]
    UnexpectedToken {
        token: String,
        position: usize,
        reason: String,
    },
    #[error("empty word sequence")]
    Empty,
    #[error("{0} exceeds the supported range (max {MAX_SUPPORTED})")]
    OutOfRange(u64),
    #[error("{0:?} is not a digit string")]
    NotADigitString(String),
}

fn small_value(token: &str) -> Option<u64> {
    if let Some(i) = ONES.iter().position(|w| *w == token) {
        return Some(i as u64);
    }
    TENS.iter()
        .position(|w| !w.is_empty() && *w == token)
        .map(|i| i as u64 * 10)
}

/// Parse a cardinal word sequence into its value.
pub fn words_to_number<S: AsRef<str>>(words: &[S]) -> Result<u64, NumberError> {
    // positions refer to the original sequence, before "and" is dropped
    let kept: Vec<(usize, &str)> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (i, w.as_ref()))
        .filter(|(_, w)| *w != "and")
        .collect();
    if kept.is_empty() {
        return Err(NumberError::Empty);
    }
    if let Some(&(pos, token)) = kept.iter().find(|(_, w)| *w == "zero") {
        if kept.len() == 1 {
            return Ok(0);
        }
        return Err(NumberError::UnexpectedToken {
            token: token.to_string(),
            position: pos,
            reason: "\"zero\" only stands alone".to_string(),
        });
    }

    let unexpected = |token: &str, position: usize, reason: &str| NumberError::UnexpectedToken {
        token: token.to_string(),
        position,
        reason: reason.to_string(),
    };

    let mut total: u64 = 0;
    let mut small: u64 = 0; // value of the group being built
    let mut last_scale: u64 = u64::MAX;
    for (pos, token) in kept {
        if let Some(v) = small_value(token) {
            let tail = small % 100;
            let ok = if v >= 10 {
                tail == 0
            } else {
                tail == 0 || (tail >= 20 && tail % 10 == 0)
            };
            if !ok {
                return Err(unexpected(token, pos, "does not continue the current group"));
            }
            small += v;
        } else if token == "hundred" {
            if !(1..=9).contains(&small) {
                return Err(unexpected(token, pos, "\"hundred\" needs a single leading digit word"));
            }
            small *= 100;
        } else if let Some(&(_, scale)) = SCALES.iter().find(|(w, _)| *w == token) {
            if small == 0 {
                return Err(unexpected(token, pos, "scale word with no leading value"));
            }
            if scale >= last_scale {
                return Err(unexpected(token, pos, "scale words must strictly decrease"));
            }
            total += small * scale;
            small = 0;
            last_scale = scale;
        } else {
            return Err(NumberError::UnknownToken {
                token: token.to_string(),
                position: pos,
            });
        }
    }
    Ok(total + small)
}

fn push_under_thousand(n: u64, out: &mut Vec<String>) {
    debug_assert!(n > 0 && n < 1000);
    let hundreds = n / 100;
    let rem = n % 100;
    if hundreds > 0 {
        out.push(ONES[hundreds as usize].to_string());
        out.push("hundred".to_string());
    }
    if rem == 0 {
        return;
    }
    if rem < 20 {
        out.push(ONES[rem as usize].to_string());
    } else {
        out.push(TENS[(rem / 10) as usize].to_string());
        if rem % 10 > 0 {
            out.push(ONES[(rem % 10) as usize].to_string());
        }
    }
}

/// Canonical American-English cardinal tokens for a value.
pub fn number_to_numeric_words(n: u64) -> Result<Vec<String>, NumberError> {
    if n > MAX_SUPPORTED {
        return Err(NumberError::OutOfRange(n));
    }
    if n == 0 {
        return Ok(vec!["zero".to_string()]);
    }
    let mut out = Vec::new();
    let mut rest = n;
    for (word, scale) in SCALES {
        let group = rest / scale;
        if group > 0 {
            push_under_thousand(group, &mut out);
            out.push(word.to_string());
            rest %= scale;
        }
    }
    if rest > 0 {
        push_under_thousand(rest, &mut out);
    }
    Ok(out)
}

/// Digit-by-digit words for a digit string; group spaces are skipped.
pub fn number_to_digit_words(digits: &str) -> Result<Vec<String>, NumberError> {
    let mut out = Vec::new();
    for c in digits.chars() {
        match c {
            '0'..='9' => out.push(ONES[c as usize - '0' as usize].to_string()),
            ' ' => {}
            _ => return Err(NumberError::NotADigitString(digits.to_string())),
        }
    }
    if out.is_empty() {
        return Err(NumberError::NotADigitString(digits.to_string()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PronunciationStyle {
    DigitByDigit,
    NumericWhole,
    NumericGrouped,
    Absent,
}

/// Where in the expanded token stream of one event a reading matched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSpan {
    pub event: usize,
    pub token_start: usize,
    pub token_end: usize,
}

/// Result of scanning a session for an OTP reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtpPronunciation {
    pub style: PronunciationStyle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_span: Option<MatchSpan>,
}

impl OtpPronunciation {
    fn absent() -> Self {
        OtpPronunciation {
            style: PronunciationStyle::Absent,
            matched_span: None,
        }
    }
}

/// Tokenize one event text, expanding literal digit runs into digit words
/// ("1234" counts as "one two three four").
fn expand_event_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for token in tokenize(text) {
        if !token.is_empty() && token.chars().all(|c| c.is_ascii_digit()) {
            out.extend(number_to_digit_words(&token).expect("ascii digit run"));
        } else {
            out.push(token);
        }
    }
    out
}

fn tokens_match(haystack: &str, needle: &str, allow_oh: bool) -> bool {
    haystack == needle || (allow_oh && needle == "zero" && haystack == "oh")
}

/// Contiguous match of `needle` in `haystack` starting anywhere; returns the
/// start index. "and" in the haystack is skipped when `skip_and` is set.
fn find_sequence(
    haystack: &[String],
    needle: &[String],
    from: usize,
    skip_and: bool,
    allow_oh: bool,
) -> Option<(usize, usize)> {
    if needle.is_empty() {
        return None;
    }
    for start in from..haystack.len() {
        let mut i = start;
        let mut j = 0;
        while i < haystack.len() && j < needle.len() {
            if skip_and && haystack[i] == "and" && j > 0 {
                i += 1;
                continue;
            }
            if tokens_match(&haystack[i], &needle[j], allow_oh) {
                i += 1;
                j += 1;
            } else {
                break;
            }
        }
        if j == needle.len() {
            return Some((start, i));
        }
    }
    None
}

/// Classify how a session's screen-reader output pronounced an OTP.
///
/// Priority when several readings match: digit-by-digit, then the whole
/// concatenated value, then per-group numeric words in group order.
pub fn classify_otp(session: &SessionRecord, otp: &str) -> OtpPronunciation {
    let groups: Vec<&str> = otp.split(' ').filter(|g| !g.is_empty()).collect();
    let all_digits: String = groups.concat();
    if all_digits.is_empty() || !all_digits.chars().all(|c| c.is_ascii_digit()) {
        return OtpPronunciation::absent();
    }

    let events: Vec<(usize, Vec<String>)> = session
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.channel == Channel::ScreenReader)
        .map(|(i, e)| (i, expand_event_tokens(&e.text)))
        .collect();

    // (1) digit-by-digit, "oh" accepted as zero
    let digit_needle = number_to_digit_words(&all_digits).expect("validated digits");
    for (event, tokens) in &events {
        if let Some((start, end)) = find_sequence(tokens, &digit_needle, 0, false, true) {
            return OtpPronunciation {
                style: PronunciationStyle::DigitByDigit,
                matched_span: Some(MatchSpan {
                    event: *event,
                    token_start: start,
                    token_end: end,
                }),
            };
        }
    }

    // (2) whole concatenated value as one cardinal
    if let Ok(value) = all_digits.parse::<u64>() {
        if let Ok(needle) = number_to_numeric_words(value) {
            for (event, tokens) in &events {
                if let Some((start, end)) = find_sequence(tokens, &needle, 0, true, false) {
                    return OtpPronunciation {
                        style: PronunciationStyle::NumericWhole,
                        matched_span: Some(MatchSpan {
                            event: *event,
                            token_start: start,
                            token_end: end,
                        }),
                    };
                }
            }
        }
    }

    // (3) per-group cardinals in group order, gaps allowed between groups
    if groups.len() >= 2 {
        let needles: Option<Vec<Vec<String>>> = groups
            .iter()
            .map(|g| {
                g.parse::<u64>()
                    .ok()
                    .and_then(|v| number_to_numeric_words(v).ok())
            })
            .collect();
        if let Some(needles) = needles {
            for (event, tokens) in &events {
                let mut cursor = 0;
                let mut first_start = None;
                let mut last_end = 0;
                let mut matched = true;
                for needle in &needles {
                    match find_sequence(tokens, needle, cursor, true, false) {
                        Some((start, end)) => {
                            first_start.get_or_insert(start);
                            last_end = end;
                            cursor = end;
                        }
                        None => {
                            matched = false;
                            break;
                        }
                    }
                }
                if matched {
                    return OtpPronunciation {
                        style: PronunciationStyle::NumericGrouped,
                        matched_span: Some(MatchSpan {
                            event: *event,
                            token_start: first_start.unwrap_or(0),
                            token_end: last_end,
                        }),
                    };
                }
            }
        }
    }

    OtpPronunciation::absent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PlatformSetting, TranscriptEvent};

    fn session_with(texts: &[(&str, Channel)]) -> SessionRecord {
        SessionRecord {
            id: "s".into(),
            workflow: "w".into(),
            setting: PlatformSetting::smartphone("voiceover"),
            speech_rate_pct: 50,
            events: texts
                .iter()
                .enumerate()
                .map(|(i, (text, channel))| TranscriptEvent {
                    t_start_s: i as f64,
                    t_end_s: i as f64 + 0.9,
                    channel: *channel,
                    text: (*text).to_string(),
                })
                .collect(),
            headphones_on_terminal: false,
            headphones_on_smartphone: false,
        }
    }

    fn sr_session(text: &str) -> SessionRecord {
        session_with(&[(text, Channel::ScreenReader)])
    }

    #[test]
    fn parses_canonical_cardinals() {
        let words = ["one", "thousand", "two", "hundred", "thirty", "four"];
        assert_eq!(words_to_number(&words).unwrap(), 1234);
        assert_eq!(words_to_number(&["zero"]).unwrap(), 0);
        assert_eq!(
            words_to_number(&["four", "hundred", "fifty", "six"]).unwrap(),
            456
        );
        assert_eq!(
            words_to_number(&["one", "hundred", "and", "five"]).unwrap(),
            105
        );
        assert_eq!(
            words_to_number(&[
                "nine", "hundred", "ninety", "nine", "billion", "nine", "hundred", "ninety",
                "nine", "million", "nine", "hundred", "ninety", "nine", "thousand", "nine",
                "hundred", "ninety", "nine",
            ])
            .unwrap(),
            999_999_999_999
        );
    }

    #[test]
    fn rejects_invalid_sequences_with_position() {
        let err = words_to_number(&["hundred", "thousand", "two", "hundred", "hundred"])
            .unwrap_err();
        assert_eq!(
            err,
            NumberError::UnexpectedToken {
                token: "hundred".into(),
                position: 0,
                reason: "\"hundred\" needs a single leading digit word".into(),
            }
        );
        assert!(matches!(
            words_to_number(&["one", "one"]).unwrap_err(),
            NumberError::UnexpectedToken { position: 1, .. }
        ));
        assert!(matches!(
            words_to_number(&["one", "thousand", "two", "million"]).unwrap_err(),
            NumberError::UnexpectedToken { position: 3, .. }
        ));
        assert!(matches!(
            words_to_number(&["banana"]).unwrap_err(),
            NumberError::UnknownToken { position: 0, .. }
        ));
        assert!(matches!(
            words_to_number(&["zero", "one"]).unwrap_err(),
            NumberError::UnexpectedToken { position: 0, .. }
        ));
        assert_eq!(words_to_number::<&str>(&[]).unwrap_err(), NumberError::Empty);
    }

    #[test]
    fn generates_canonical_words() {
        assert_eq!(
            number_to_numeric_words(1234).unwrap(),
            vec!["one", "thousand", "two", "hundred", "thirty", "four"]
        );
        assert_eq!(number_to_numeric_words(0).unwrap(), vec!["zero"]);
        assert_eq!(
            number_to_numeric_words(456).unwrap(),
            vec!["four", "hundred", "fifty", "six"]
        );
        assert_eq!(
            number_to_numeric_words(1_000_000).unwrap(),
            vec!["one", "million"]
        );
        assert!(matches!(
            number_to_numeric_words(MAX_SUPPORTED + 1),
            Err(NumberError::OutOfRange(_))
        ));
    }

    #[test]
    fn digit_words_map_each_digit() {
        assert_eq!(
            number_to_digit_words("1234").unwrap(),
            vec!["one", "two", "three", "four"]
        );
        assert_eq!(number_to_digit_words("0").unwrap(), vec!["zero"]);
        assert_eq!(
            number_to_digit_words("123 456").unwrap(),
            vec!["one", "two", "three", "four", "five", "six"]
        );
        assert!(number_to_digit_words("12a").is_err());
    }

    #[test]
    fn round_trip_small_values() {
        for n in [0u64, 7, 15, 20, 21, 100, 101, 110, 999, 1000, 1010, 90_125] {
            let words = number_to_numeric_words(n).unwrap();
            assert_eq!(words_to_number(&words).unwrap(), n, "n={n} words={words:?}");
        }
    }

    #[test]
    fn classifies_digit_by_digit() {
        let r = classify_otp(&sr_session("your code is one two three four"), "1234");
        assert_eq!(r.style, PronunciationStyle::DigitByDigit);
        let span = r.matched_span.unwrap();
        assert_eq!(span.event, 0);
        assert_eq!((span.token_start, span.token_end), (3, 7));
    }

    #[test]
    fn classifies_numeric_grouped_from_the_paper_example() {
        let r = classify_otp(
            &sr_session("one hundred twenty-three, four hundred fifty-six"),
            "123 456",
        );
        assert_eq!(r.style, PronunciationStyle::NumericGrouped);
    }

    #[test]
    fn classifies_numeric_whole() {
        let r = classify_otp(
            &sr_session("code one thousand two hundred thirty four expires soon"),
            "1234",
        );
        assert_eq!(r.style, PronunciationStyle::NumericWhole);
    }

    #[test]
    fn absent_when_no_digit_content() {
        let r = classify_otp(&sr_session("please check your phone"), "1234");
        assert_eq!(r.style, PronunciationStyle::Absent);
        assert!(r.matched_span.is_none());
    }

    #[test]
    fn literal_digits_count_as_digit_words() {
        let r = classify_otp(&sr_session("your code is 1234"), "1234");
        assert_eq!(r.style, PronunciationStyle::DigitByDigit);
    }

    #[test]
    fn oh_is_zero_in_digit_matching_only() {
        let r = classify_otp(&sr_session("one oh two"), "102");
        assert_eq!(r.style, PronunciationStyle::DigitByDigit);
        // "oh" does not satisfy numeric matching
        let r = classify_otp(&sr_session("one hundred oh two"), "102");
        assert_eq!(r.style, PronunciationStyle::Absent);
    }

    #[test]
    fn digit_priority_beats_numeric_readings() {
        // "one one one one" also matches grouped readings of "11 11"
        let r = classify_otp(&sr_session("one one one one"), "11 11");
        assert_eq!(r.style, PronunciationStyle::DigitByDigit);
    }

    #[test]
    fn phone_call_digits_do_not_classify() {
        let s = session_with(&[
            ("please answer the call", Channel::ScreenReader),
            ("your code is one two three four", Channel::PhoneCall),
        ]);
        assert_eq!(classify_otp(&s, "1234").style, PronunciationStyle::Absent);
    }
}
