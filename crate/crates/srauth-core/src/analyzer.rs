//! Detection of the five communicability failure codes from a session,
//! its workflow, and the screen-reader profile that produced it.
//!
//! Detectors are pure and independent; `analyze` unions them and attaches
//! the comprehensibility score of the whole traversal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    full_transcript, Channel, ElementKind, ElementLocation, ScreenReaderProfile, SessionRecord,
    WorkflowSpec,
};
use crate::numberspeak::{classify_otp, MatchSpan, PronunciationStyle};
use crate::similarity::{comprehensibility, tokenize, SimilarityResult};

/// Communicability failure codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    /// Conflict Between Instructions: reader output overlaps other audio.
    Cbi,
    /// Numeric Pronunciation of OTP: code read as a quantity.
    Npo,
    /// Unable to Communicate OTP.
    Uco,
    /// Unable to Communicate Security Prompts.
    Ucsp,
    /// Unable to Communicate Elements Outside Browser.
    Uceob,
}

impl std::fmt::Display for IssueCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IssueCode::Cbi => "CBI",
            IssueCode::Npo => "NPO",
            IssueCode::Uco => "UCO",
            IssueCode::Ucsp => "UCSP",
            IssueCode::Uceob => "UCEOB",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueFinding {
    pub code: IssueCode,
    pub evidence: String,
    #[serde(default)]
    pub spans: Vec<MatchSpan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueReport {
    pub session: String,
    pub findings: Vec<IssueFinding>,
    pub comprehensibility: SimilarityResult,
}

impl IssueReport {
    pub fn has(&self, code: IssueCode) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn codes(&self) -> Vec<IssueCode> {
        self.findings.iter().map(|f| f.code).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalyzeError {
    #[error("session {session:?} references workflow {referenced:?}, not {given:?}")]
    WorkflowMismatch {
        session: String,
        referenced: String,
        given: String,
    },
}

/// Detection thresholds; defaults match the shipped configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzerConfig {
    /// Minimum audible overlap, in seconds, for a CBI finding.
    pub epsilon_overlap_s: f64,
    /// Token-set recall below which a security prompt counts as unread.
    pub tau_prompt: f64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            epsilon_overlap_s: 0.5,
            tau_prompt: 0.6,
        }
    }
}

/// Conflict Between Instructions: a SCREEN_READER event overlapping a
/// PHONE_CALL or SYSTEM_AUDIO event by more than the configured epsilon.
pub fn detect_cbi(session: &SessionRecord, config: &AnalyzerConfig) -> Option<IssueFinding> {
    let mut best: Option<(f64, usize, usize)> = None;
    for (i, sr) in session.events.iter().enumerate() {
        if sr.channel != Channel::ScreenReader {
            continue;
        }
        for (j, other) in session.events.iter().enumerate() {
            if other.channel == Channel::ScreenReader {
                continue;
            }
            let overlap = sr.t_end_s.min(other.t_end_s) - sr.t_start_s.max(other.t_start_s);
            if overlap > config.epsilon_overlap_s
                && best.map(|(b, _, _)| overlap > b).unwrap_or(true)
            {
                best = Some((overlap, i, j));
            }
        }
    }
    best.map(|(overlap, i, j)| IssueFinding {
        code: IssueCode::Cbi,
        evidence: format!(
            "screen reader event {i} overlaps {:?} event {j} by {overlap:.1} s",
            session.events[j].channel
        ),
        spans: vec![],
    })
}

fn announceable_otp(workflow: &WorkflowSpec) -> Option<&crate::model::CriticalElement> {
    // OTPs delivered as phone-call audio are not the screen reader's to convey
    workflow
        .otp_element()
        .filter(|e| e.location != ElementLocation::PhoneCallAudio)
}

/// Numeric Pronunciation of OTP: the code was read as one or more numeric
/// quantities rather than digit by digit.
pub fn detect_npo(session: &SessionRecord, workflow: &WorkflowSpec) -> Option<IssueFinding> {
    let otp = announceable_otp(workflow)?;
    let reading = classify_otp(session, &otp.text);
    match reading.style {
        PronunciationStyle::NumericWhole | PronunciationStyle::NumericGrouped => {
            Some(IssueFinding {
                code: IssueCode::Npo,
                evidence: format!(
                    "OTP {:?} pronounced as {}",
                    otp.text,
                    match reading.style {
                        PronunciationStyle::NumericWhole => "one whole numeric value",
                        _ => "numeric values per group",
                    }
                ),
                spans: reading.matched_span.into_iter().collect(),
            })
        }
        _ => None,
    }
}

/// Unable to Communicate OTP: the transcript never conveys the code in any
/// recognized reading.
pub fn detect_uco(session: &SessionRecord, workflow: &WorkflowSpec) -> Option<IssueFinding> {
    let otp = announceable_otp(workflow)?;
    let reading = classify_otp(session, &otp.text);
    if reading.style == PronunciationStyle::Absent {
        Some(IssueFinding {
            code: IssueCode::Uco,
            evidence: format!("OTP {:?} never appears in screen reader output", otp.text),
            spans: vec![],
        })
    } else {
        None
    }
}

/// Token-set recall of an element's text against the full transcript.
pub fn prompt_recall(element_text: &str, transcript: &str) -> f64 {
    let wanted: std::collections::BTreeSet<String> = tokenize(element_text).into_iter().collect();
    if wanted.is_empty() {
        return 1.0;
    }
    let heard: std::collections::BTreeSet<String> = tokenize(transcript).into_iter().collect();
    wanted.iter().filter(|t| heard.contains(*t)).count() as f64 / wanted.len() as f64
}

/// Unable to Communicate Security Prompts: some required SECURITY_PROMPT
/// element has token recall below tau in the transcript.
pub fn detect_ucsp(
    session: &SessionRecord,
    workflow: &WorkflowSpec,
    config: &AnalyzerConfig,
) -> Option<IssueFinding> {
    let transcript = full_transcript(session);
    let mut worst: Option<(f64, &str)> = None;
    for el in &workflow.elements {
        if el.kind != ElementKind::SecurityPrompt || !el.required {
            continue;
        }
        let recall = prompt_recall(&el.text, &transcript);
        if recall < config.tau_prompt && worst.map(|(w, _)| recall < w).unwrap_or(true) {
            worst = Some((recall, &el.text));
        }
    }
    worst.map(|(recall, text)| IssueFinding {
        code: IssueCode::Ucsp,
        evidence: format!(
            "security prompt {text:?} read with token recall {recall:.2} (< {:.2})",
            config.tau_prompt
        ),
        spans: vec![],
    })
}

/// Unable to Communicate Elements Outside Browser: the workflow requires an
/// element outside the browser and the profile cannot reach it. Depends only
/// on (workflow, profile), never on the transcript.
pub fn detect_uceob(
    workflow: &WorkflowSpec,
    profile: &ScreenReaderProfile,
) -> Option<IssueFinding> {
    if profile.reads_outside_browser {
        return None;
    }
    let blocked = workflow
        .elements
        .iter()
        .find(|e| e.required && e.location == ElementLocation::OutsideBrowser)?;
    Some(IssueFinding {
        code: IssueCode::Uceob,
        evidence: format!(
            "required element {:?} is outside the browser; profile {} cannot read it",
            blocked.text, profile.id
        ),
        spans: vec![],
    })
}

/// Run every detector and attach the comprehensibility score.
///
/// When an OTP element itself sits outside the browser and UCEOB fires, the
/// UCO finding is dropped: the root cause is reader scope, not the
/// authenticator interface.
pub fn analyze(
    session: &SessionRecord,
    workflow: &WorkflowSpec,
    profile: &ScreenReaderProfile,
    config: &AnalyzerConfig,
) -> Result<IssueReport, AnalyzeError> {
    if session.workflow != workflow.id {
        return Err(AnalyzeError::WorkflowMismatch {
            session: session.id.clone(),
            referenced: session.workflow.clone(),
            given: workflow.id.clone(),
        });
    }
    let uceob = detect_uceob(workflow, profile);
    let otp_outside = announceable_otp(workflow)
        .map(|e| e.location == ElementLocation::OutsideBrowser)
        .unwrap_or(false);
    let mut findings: Vec<IssueFinding> = Vec::new();
    findings.extend(detect_cbi(session, config));
    findings.extend(detect_npo(session, workflow));
    if !(uceob.is_some() && otp_outside) {
        findings.extend(detect_uco(session, workflow));
    }
    findings.extend(detect_ucsp(session, workflow, config));
    findings.extend(uceob);
    findings.sort_by_key(|f| f.code);

    Ok(IssueReport {
        session: session.id.clone(),
        findings,
        comprehensibility: comprehensibility(&workflow.full_text, &full_transcript(session)),
    })
}
