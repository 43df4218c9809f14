//! Shared domain types for screen-reader assisted authentication evaluation.
//!
//! Everything here is an immutable value after construction and safe to share
//! across analysis workers. Validation never panics: structural problems are
//! reported as violation strings so callers can batch them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Device class a screen reader or authentication method runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlatformKind {
    Terminal,
    Smartphone,
}

/// Authentication factor family, as grouped in the method catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AuthCategory {
    OtpText,
    OtpCall,
    OtpAuthenticator,
    Push,
    PushSelectConfirm,
    FidoMfa,
    PhoneCallKeypress,
}

impl AuthCategory {
    /// One-time-password deliveries: the second factor is a short code the
    /// user must hear and re-enter.
    pub fn is_otp(self) -> bool {
        matches!(
            self,
            AuthCategory::OtpText | AuthCategory::OtpCall | AuthCategory::OtpAuthenticator
        )
    }

    /// Push-approval deliveries (including select-confirm variants).
    pub fn is_push(self) -> bool {
        matches!(self, AuthCategory::Push | AuthCategory::PushSelectConfirm)
    }
}

/// How a method's interface presents its OTP to assistive tech.
///
/// `Masked` covers interfaces that render codes as asterisks or images the
/// reader cannot vocalize; `Grouped` covers split displays like "123 456".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OtpAnnouncement {
    #[default]
    Plain,
    Grouped,
    Numeric,
    Masked,
}

/// One entry of the authentication-method catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthMethod {
    pub id: String,
    pub category: AuthCategory,
    pub vendor: String,
    pub supported_platforms: BTreeSet<PlatformKind>,
    /// Interface behavior flags observed per method; all optional in JSON.
    #[serde(default)]
    pub otp_announcement: OtpAnnouncement,
    /// The factor lives outside the browser (desktop app, OS dialog).
    #[serde(default)]
    pub requires_outside_browser: bool,
    /// Push prompt carries device/city details the user could verify.
    #[serde(default)]
    pub exposes_login_details: bool,
    /// Repeated denied pushes lock the account (administrator threshold).
    #[serde(default)]
    pub enforces_push_lockout: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SettingKind {
    Terminal,
    Smartphone,
    Concurrent,
}

/// Which screen reader(s) drive a test setting.
///
/// `Terminal` requires a terminal reader only, `Smartphone` a smartphone
/// reader only, `Concurrent` both.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlatformSetting {
    pub kind: SettingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_reader: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smartphone_reader: Option<String>,
}

impl PlatformSetting {
    pub fn terminal(reader: impl Into<String>) -> Self {
        PlatformSetting {
            kind: SettingKind::Terminal,
            terminal_reader: Some(reader.into()),
            smartphone_reader: None,
        }
    }

    pub fn smartphone(reader: impl Into<String>) -> Self {
        PlatformSetting {
            kind: SettingKind::Smartphone,
            terminal_reader: None,
            smartphone_reader: Some(reader.into()),
        }
    }

    pub fn concurrent(terminal: impl Into<String>, smartphone: impl Into<String>) -> Self {
        PlatformSetting {
            kind: SettingKind::Concurrent,
            terminal_reader: Some(terminal.into()),
            smartphone_reader: Some(smartphone.into()),
        }
    }

    /// Structural violations of the reader/kind pairing rules.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        match self.kind {
            SettingKind::Terminal => {
                if self.terminal_reader.is_none() {
                    v.push("TERMINAL setting requires terminal_reader".to_string());
                }
                if self.smartphone_reader.is_some() {
                    v.push("TERMINAL setting forbids smartphone_reader".to_string());
                }
            }
            SettingKind::Smartphone => {
                if self.smartphone_reader.is_none() {
                    v.push("SMARTPHONE setting requires smartphone_reader".to_string());
                }
                if self.terminal_reader.is_some() {
                    v.push("SMARTPHONE setting forbids terminal_reader".to_string());
                }
            }
            SettingKind::Concurrent => {
                if self.terminal_reader.is_none() || self.smartphone_reader.is_none() {
                    v.push("CONCURRENT setting requires both terminal_reader and smartphone_reader".to_string());
                }
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PromptReading {
    Full,
    Partial,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OverlayHandling {
    ReadsOverlay,
    ReadsUnderlying,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NotificationOrdering {
    NewestOverrides,
    OldestOnTop,
}

/// Default pronunciation style a reader applies to a plainly displayed OTP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OtpStyle {
    DigitByDigit,
    NumericWhole,
    NumericGrouped,
    Hidden,
}

fn default_speech_rate() -> u8 {
    50
}

/// Capability profile of one screen reader.
///
/// Profiles are data, not code: the engine accepts arbitrary profiles and the
/// six curated ones ship as JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenReaderProfile {
    pub id: String,
    pub platform: PlatformKind,
    pub reads_outside_browser: bool,
    pub reads_security_prompts: PromptReading,
    pub reads_service_name_in_prompt: bool,
    pub overlay_handling: OverlayHandling,
    pub notification_ordering: NotificationOrdering,
    pub otp_pronunciation: OtpStyle,
    #[serde(default = "default_speech_rate")]
    pub default_speech_rate_pct: u8,
}

impl ScreenReaderProfile {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.id.is_empty() {
            v.push("profile id is empty".to_string());
        }
        if !(1..=100).contains(&self.default_speech_rate_pct) {
            v.push(format!(
                "profile {}: default_speech_rate_pct {} outside [1,100]",
                self.id, self.default_speech_rate_pct
            ));
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElementKind {
    Instruction,
    Otp,
    SecurityPrompt,
    Button,
    ServiceName,
    Link,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElementLocation {
    InBrowser,
    OutsideBrowser,
    PhoneCallAudio,
    Notification,
}

/// A piece of the workflow the screen reader must convey for the user to
/// authenticate (OTP, prompt, button label, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalElement {
    pub kind: ElementKind,
    pub text: String,
    pub location: ElementLocation,
    pub required: bool,
}

/// OTP texts are digit groups separated by single spaces: "123 456".
pub fn is_valid_otp_text(text: &str) -> bool {
    if text.is_empty() {
        return false;
    }
    let mut prev_space = true; // leading space would make an empty group
    for c in text.chars() {
        match c {
            '0'..='9' => prev_space = false,
            ' ' if !prev_space => prev_space = true,
            _ => return false,
        }
    }
    !prev_space // no trailing space
}

/// Ground-truth description of one authentication workflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowSpec {
    pub id: String,
    /// AuthMethod id this workflow exercises.
    pub method: String,
    pub setting: PlatformSetting,
    /// Ordered ground-truth text of the whole workflow.
    pub full_text: String,
    pub elements: Vec<CriticalElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification_timeout_s: Option<f64>,
}

impl WorkflowSpec {
    /// The workflow's OTP element, if any (validation enforces at most one).
    pub fn otp_element(&self) -> Option<&CriticalElement> {
        self.elements.iter().find(|e| e.kind == ElementKind::Otp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Channel {
    ScreenReader,
    PhoneCall,
    SystemAudio,
}

/// One timestamped announcement on a named audio channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEvent {
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub channel: Channel,
    pub text: String,
}

impl TranscriptEvent {
    pub fn violations(&self, index: usize) -> Vec<String> {
        let mut v = Vec::new();
        if self.t_start_s < 0.0 {
            v.push(format!("event {index}: t_start_s is negative"));
        }
        if self.t_end_s <= self.t_start_s {
            v.push(format!("event {index}: t_end_s must exceed t_start_s"));
        }
        if self.text.is_empty() {
            v.push(format!("event {index}: text is empty"));
        }
        v
    }
}

/// One recorded traversal of a workflow: timeline of announcements plus the
/// reader and speech-rate metadata needed to interpret it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    /// WorkflowSpec id this session traversed.
    pub workflow: String,
    pub setting: PlatformSetting,
    #[serde(default = "default_speech_rate")]
    pub speech_rate_pct: u8,
    pub events: Vec<TranscriptEvent>,
    #[serde(default)]
    pub headphones_on_terminal: bool,
    #[serde(default)]
    pub headphones_on_smartphone: bool,
}

impl SessionRecord {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.id.is_empty() {
            v.push("session id is empty".to_string());
        }
        if !(1..=100).contains(&self.speech_rate_pct) {
            v.push(format!(
                "session {}: speech_rate_pct {} outside [1,100]",
                self.id, self.speech_rate_pct
            ));
        }
        v.extend(self.setting.violations());
        for (i, e) in self.events.iter().enumerate() {
            v.extend(e.violations(i));
        }
        if self
            .events
            .windows(2)
            .any(|w| w[1].t_start_s < w[0].t_start_s)
        {
            v.push(format!("session {}: events not sorted by t_start_s", self.id));
        }
        v
    }
}

/// Outcome of one simulated attack cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Vulnerable,
    /// The paper's half-filled marker: conditional or fifty-fifty outcomes.
    Partial,
    NotVulnerable,
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Vulnerable => "VULNERABLE",
            Verdict::Partial => "PARTIAL",
            Verdict::NotVulnerable => "NOT_VULNERABLE",
            Verdict::NotApplicable => "NOT_APPLICABLE",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "VULNERABLE" => Ok(Verdict::Vulnerable),
            "PARTIAL" => Ok(Verdict::Partial),
            "NOT_VULNERABLE" => Ok(Verdict::NotVulnerable),
            "NOT_APPLICABLE" => Ok(Verdict::NotApplicable),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

/// Check a workflow against the type invariants and the method catalog.
///
/// Violations are data, not failures: an empty list means the workflow is
/// clean. The result does not depend on catalog ordering.
pub fn validate_workflow(spec: &WorkflowSpec, catalog: &[AuthMethod]) -> Vec<String> {
    let mut v = Vec::new();
    if spec.id.is_empty() {
        v.push("workflow id is empty".to_string());
    }
    v.extend(spec.setting.violations());

    let mut otp_count = 0usize;
    for (i, el) in spec.elements.iter().enumerate() {
        if el.text.is_empty() {
            v.push(format!("element {i}: text is empty"));
            continue;
        }
        if el.kind == ElementKind::Otp {
            otp_count += 1;
            if !is_valid_otp_text(&el.text) {
                v.push(format!(
                    "element {i}: OTP text {:?} must be digits with single-space groups",
                    el.text
                ));
            }
        }
        if el.location != ElementLocation::PhoneCallAudio && !spec.full_text.contains(&el.text) {
            v.push(format!(
                "element {i}: text {:?} does not occur in full_text",
                el.text
            ));
        }
    }
    if otp_count > 1 {
        v.push(format!("workflow has {otp_count} OTP elements; at most one allowed"));
    }
    if let Some(t) = spec.verification_timeout_s {
        if !(t > 0.0) {
            v.push(format!("verification_timeout_s {t} must be positive"));
        }
    }

    match catalog.iter().find(|m| m.id == spec.method) {
        None => v.push(format!("method {:?} not found in catalog", spec.method)),
        Some(m) => {
            let compatible = match spec.setting.kind {
                SettingKind::Terminal => m.supported_platforms.contains(&PlatformKind::Terminal),
                SettingKind::Smartphone => {
                    m.supported_platforms.contains(&PlatformKind::Smartphone)
                }
                SettingKind::Concurrent => !m.supported_platforms.is_empty(),
            };
            if !compatible {
                v.push(format!(
                    "method {:?} does not support setting {:?}",
                    spec.method, spec.setting.kind
                ));
            }
        }
    }
    v
}

/// Violations across a whole method catalog (id uniqueness and field rules).
pub fn validate_catalog(catalog: &[AuthMethod]) -> Vec<String> {
    let mut v = Vec::new();
    let mut seen = BTreeSet::new();
    for m in catalog {
        if m.id.is_empty() {
            v.push("method id is empty".to_string());
        } else if !seen.insert(m.id.clone()) {
            v.push(format!("duplicate method id {:?}", m.id));
        }
        if m.supported_platforms.is_empty() {
            v.push(format!("method {:?}: supported_platforms is empty", m.id));
        }
    }
    v
}

/// SCREEN_READER event texts in timeline order, single-space separated.
pub fn full_transcript(session: &SessionRecord) -> String {
    let mut out = String::new();
    for e in &session.events {
        if e.channel != Channel::ScreenReader {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&e.text);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Vec<AuthMethod> {
        vec![
            AuthMethod {
                id: "google-otp-text".into(),
                category: AuthCategory::OtpText,
                vendor: "Google".into(),
                supported_platforms: [PlatformKind::Smartphone].into(),
                otp_announcement: OtpAnnouncement::Numeric,
                requires_outside_browser: false,
                exposes_login_details: false,
                enforces_push_lockout: false,
            },
            AuthMethod {
                id: "google-fido".into(),
                category: AuthCategory::FidoMfa,
                vendor: "Google".into(),
                supported_platforms: [PlatformKind::Terminal, PlatformKind::Smartphone].into(),
                otp_announcement: OtpAnnouncement::Plain,
                requires_outside_browser: true,
                exposes_login_details: false,
                enforces_push_lockout: false,
            },
        ]
    }

    fn otp_workflow() -> WorkflowSpec {
        WorkflowSpec {
            id: "wf-google-text".into(),
            method: "google-otp-text".into(),
            setting: PlatformSetting::smartphone("voiceover"),
            full_text: "enter the code 123 456 to sign in".into(),
            elements: vec![CriticalElement {
                kind: ElementKind::Otp,
                text: "123 456".into(),
                location: ElementLocation::Notification,
                required: true,
            }],
            verification_timeout_s: Some(60.0),
        }
    }

    #[test]
    fn well_formed_workflow_is_clean() {
        assert!(validate_workflow(&otp_workflow(), &catalog()).is_empty());
    }

    #[test]
    fn otp_not_in_full_text_is_a_violation() {
        let mut wf = otp_workflow();
        wf.elements[0].text = "123456".into();
        wf.elements[0].location = ElementLocation::InBrowser;
        let violations = validate_workflow(&wf, &catalog());
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("123456"), "{violations:?}");
    }

    #[test]
    fn phone_call_audio_elements_skip_substring_check() {
        let mut wf = otp_workflow();
        wf.elements[0].text = "987 654".into();
        wf.elements[0].location = ElementLocation::PhoneCallAudio;
        assert!(validate_workflow(&wf, &catalog()).is_empty());
    }

    #[test]
    fn fido_workflow_supported_on_smartphone() {
        let wf = WorkflowSpec {
            id: "wf-fido".into(),
            method: "google-fido".into(),
            setting: PlatformSetting::smartphone("voiceover"),
            full_text: "insert your security key".into(),
            elements: vec![],
            verification_timeout_s: None,
        };
        assert!(validate_workflow(&wf, &catalog()).is_empty());
    }

    #[test]
    fn validate_is_catalog_order_independent() {
        let wf = otp_workflow();
        let mut cat = catalog();
        let a = validate_workflow(&wf, &cat);
        cat.reverse();
        let b = validate_workflow(&wf, &cat);
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_method_is_reported() {
        let mut wf = otp_workflow();
        wf.method = "nope".into();
        let v = validate_workflow(&wf, &catalog());
        assert!(v.iter().any(|s| s.contains("nope")));
    }

    #[test]
    fn otp_text_grammar() {
        assert!(is_valid_otp_text("123456"));
        assert!(is_valid_otp_text("123 456"));
        assert!(is_valid_otp_text("1 2 3"));
        assert!(!is_valid_otp_text(""));
        assert!(!is_valid_otp_text(" 123"));
        assert!(!is_valid_otp_text("123 "));
        assert!(!is_valid_otp_text("123  456"));
        assert!(!is_valid_otp_text("12a456"));
        assert!(!is_valid_otp_text("123-456"));
    }

    #[test]
    fn full_transcript_joins_screen_reader_events_only() {
        let session = SessionRecord {
            id: "s".into(),
            workflow: "w".into(),
            setting: PlatformSetting::smartphone("voiceover"),
            speech_rate_pct: 50,
            events: vec![
                TranscriptEvent {
                    t_start_s: 0.0,
                    t_end_s: 1.0,
                    channel: Channel::ScreenReader,
                    text: "hello".into(),
                },
                TranscriptEvent {
                    t_start_s: 1.0,
                    t_end_s: 2.0,
                    channel: Channel::PhoneCall,
                    text: "ring".into(),
                },
                TranscriptEvent {
                    t_start_s: 2.0,
                    t_end_s: 3.0,
                    channel: Channel::ScreenReader,
                    text: "world".into(),
                },
            ],
            headphones_on_terminal: false,
            headphones_on_smartphone: false,
        };
        assert_eq!(full_transcript(&session), "hello world");
        let empty = SessionRecord {
            events: vec![],
            ..session
        };
        assert_eq!(full_transcript(&empty), "");
    }

    #[test]
    fn setting_reader_pairing_rules() {
        assert!(PlatformSetting::terminal("jaws").violations().is_empty());
        let bad = PlatformSetting {
            kind: SettingKind::Terminal,
            terminal_reader: Some("jaws".into()),
            smartphone_reader: Some("voiceover".into()),
        };
        assert_eq!(bad.violations().len(), 1);
        let missing = PlatformSetting {
            kind: SettingKind::Concurrent,
            terminal_reader: Some("jaws".into()),
            smartphone_reader: None,
        };
        assert_eq!(missing.violations().len(), 1);
    }

    #[test]
    fn event_time_rules() {
        let e = TranscriptEvent {
            t_start_s: 2.0,
            t_end_s: 2.0,
            channel: Channel::ScreenReader,
            text: "x".into(),
        };
        assert_eq!(e.violations(0).len(), 1);
    }

    #[test]
    fn serde_round_trip_preserves_values() {
        let wf = otp_workflow();
        let json = serde_json::to_string(&wf).unwrap();
        let back: WorkflowSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(wf, back);
        // enum variants serialize in SCREAMING_SNAKE_CASE
        assert!(json.contains("\"SMARTPHONE\""));
        assert!(json.contains("\"OTP\""));
    }
}
