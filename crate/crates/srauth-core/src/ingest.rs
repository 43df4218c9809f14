//! Loading workflows, sessions, and profiles from JSON files, plus building
//! sessions from audio through a pluggable speech-to-text gateway.
//!
//! Two backends ship: a file-replay backend that reads sidecar segment JSON
//! (used in tests and offline runs) and a generic HTTP backend that POSTs
//! raw audio and receives the same segment JSON array back. The toolkit
//! never decodes audio itself.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_workflow, AuthMethod, Channel, PlatformSetting, ScreenReaderProfile, SessionRecord,
    TranscriptEvent, WorkflowSpec,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error in {path}: {detail}")]
    Schema { path: PathBuf, detail: String },
    #[error("validation failed for {path}: {}", violations.join("; "))]
    Validation {
        path: PathBuf,
        violations: Vec<String>,
    },
    #[error("speech-to-text backend failed: {0}")]
    Backend(#[from] SttError),
    #[error("backend returned no segments for any channel")]
    EmptyTranscript,
}

#[derive(Debug, Error)]
pub enum SttError {
    #[error("transport error{}: {detail}", if *retryable { " (retryable)" } else { "" })]
    Transport { detail: String, retryable: bool },
    #[error("unsupported media type {0:?}")]
    UnsupportedMedia(String),
    #[error("malformed segment payload: {0}")]
    MalformedPayload(String),
}

impl SttError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, SttError::Transport { retryable: true, .. })
    }
}

/// One timed hypothesis from a speech-to-text engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SttSegment {
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub text: String,
    pub confidence: f64,
}

/// Gateway to a speech-to-text engine. Implementations must return segments
/// in time order.
pub trait SttBackend {
    fn transcribe(&self, audio: &[u8], media_type: &str) -> Result<Vec<SttSegment>, SttError>;
}

/// Replays a sidecar JSON array of segments. The channel source points at
/// the sidecar file itself; no audio is decoded.
#[derive(Debug, Default)]
pub struct ReplayBackend;

impl SttBackend for ReplayBackend {
    fn transcribe(&self, audio: &[u8], media_type: &str) -> Result<Vec<SttSegment>, SttError> {
        if media_type != "application/json" {
            return Err(SttError::UnsupportedMedia(format!(
                "{media_type} (replay backend reads sidecar segment JSON)"
            )));
        }
        let mut segments: Vec<SttSegment> = serde_json::from_slice(audio)
            .map_err(|e| SttError::MalformedPayload(e.to_string()))?;
        segments.sort_by(|a, b| a.t_start_s.total_cmp(&b.t_start_s));
        Ok(segments)
    }
}

/// POSTs raw audio to a configured endpoint; the response body is the same
/// segment JSON array the replay backend reads.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    pub endpoint: String,
    pub timeout: Duration,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpBackend {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(60),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

impl SttBackend for HttpBackend {
    fn transcribe(&self, audio: &[u8], media_type: &str) -> Result<Vec<SttSegment>, SttError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let response = agent
            .post(&self.endpoint)
            .header("content-type", media_type)
            .send(audio)
            .map_err(|e| SttError::Transport {
                detail: e.to_string(),
                retryable: true,
            })?;
        let body = response
            .into_body()
            .read_to_string()
            .map_err(|e| SttError::Transport {
                detail: e.to_string(),
                retryable: true,
            })?;
        let mut segments: Vec<SttSegment> =
            serde_json::from_str(&body).map_err(|e| SttError::MalformedPayload(e.to_string()))?;
        segments.sort_by(|a, b| a.t_start_s.total_cmp(&b.t_start_s));
        Ok(segments)
    }
}

/// Media type inferred from a file extension; wav and mp3 pass through to
/// the backend untouched, json marks replay sidecars.
pub fn media_type_for(path: &Path) -> Option<&'static str> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("wav") => Some("audio/wav"),
        Some("mp3") => Some("audio/mpeg"),
        Some("json") => Some("application/json"),
        _ => None,
    }
}

/// A value loaded from disk plus any non-fatal warnings produced on the way.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IngestError> {
    let bytes = fs::read(path).map_err(|e| IngestError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_slice(&bytes).map_err(|e| IngestError::Schema {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

/// Load and validate one workflow file.
pub fn load_workflow(path: &Path, catalog: &[AuthMethod]) -> Result<WorkflowSpec, IngestError> {
    let spec: WorkflowSpec = read_json(path)?;
    let violations = validate_workflow(&spec, catalog);
    if violations.is_empty() {
        Ok(spec)
    } else {
        Err(IngestError::Validation {
            path: path.to_path_buf(),
            violations,
        })
    }
}

/// Load one session file. Out-of-order events are re-sorted with a warning;
/// structural violations are errors.
pub fn load_session(path: &Path) -> Result<Loaded<SessionRecord>, IngestError> {
    let mut record: SessionRecord = read_json(path)?;
    let mut warnings = Vec::new();
    if record
        .events
        .windows(2)
        .any(|w| w[1].t_start_s < w[0].t_start_s)
    {
        record
            .events
            .sort_by(|a, b| a.t_start_s.total_cmp(&b.t_start_s));
        warnings.push(format!(
            "{}: events were not sorted by t_start_s; re-sorted",
            path.display()
        ));
    }
    let violations = record.violations();
    if !violations.is_empty() {
        return Err(IngestError::Validation {
            path: path.to_path_buf(),
            violations,
        });
    }
    Ok(Loaded {
        value: record,
        warnings,
    })
}

/// Load one screen-reader profile file.
pub fn load_profile(path: &Path) -> Result<ScreenReaderProfile, IngestError> {
    let profile: ScreenReaderProfile = read_json(path)?;
    let violations = profile.violations();
    if violations.is_empty() {
        Ok(profile)
    } else {
        Err(IngestError::Validation {
            path: path.to_path_buf(),
            violations,
        })
    }
}

/// Load a method catalog (JSON array of methods).
pub fn load_catalog(path: &Path) -> Result<Vec<AuthMethod>, IngestError> {
    let catalog: Vec<AuthMethod> = read_json(path)?;
    let violations = crate::model::validate_catalog(&catalog);
    if violations.is_empty() {
        Ok(catalog)
    } else {
        Err(IngestError::Validation {
            path: path.to_path_buf(),
            violations,
        })
    }
}

/// One audio (or sidecar) file feeding one channel of a session.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSource {
    pub channel: Channel,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub media_type: Option<String>,
}

/// Options for building a session out of transcribed audio.
#[derive(Debug, Clone)]
pub struct TranscribeOptions {
    pub session_id: String,
    pub workflow_id: String,
    pub setting: PlatformSetting,
    pub speech_rate_pct: u8,
    /// Segments below this confidence are kept but flagged in warnings.
    pub confidence_floor: f64,
    pub headphones_on_terminal: bool,
    pub headphones_on_smartphone: bool,
}

impl TranscribeOptions {
    pub fn new(session_id: impl Into<String>, workflow_id: impl Into<String>, setting: PlatformSetting) -> Self {
        TranscribeOptions {
            session_id: session_id.into(),
            workflow_id: workflow_id.into(),
            setting,
            speech_rate_pct: 50,
            confidence_floor: 0.0,
            headphones_on_terminal: false,
            headphones_on_smartphone: false,
        }
    }
}

/// Transcribe one file per channel and merge the per-channel segment lists
/// into a single time-ordered event list (a stable merge by t_start_s).
///
/// Event texts are backend segment texts verbatim; nothing is fabricated.
pub fn transcribe_session(
    sources: &[ChannelSource],
    backend: &dyn SttBackend,
    opts: &TranscribeOptions,
) -> Result<Loaded<SessionRecord>, IngestError> {
    let mut warnings = Vec::new();
    let mut events: Vec<TranscriptEvent> = Vec::new();
    for source in sources {
        let media = match &source.media_type {
            Some(m) => m.as_str(),
            None => media_type_for(&source.path).ok_or_else(|| IngestError::Schema {
                path: source.path.clone(),
                detail: "cannot infer media type; supported extensions: wav, mp3, json".into(),
            })?,
        };
        let bytes = fs::read(&source.path).map_err(|e| IngestError::Io {
            path: source.path.clone(),
            source: e,
        })?;
        let segments = backend.transcribe(&bytes, media)?;
        for seg in segments {
            if seg.confidence < opts.confidence_floor {
                warnings.push(format!(
                    "segment {:?} at {:.3}s kept below confidence floor ({:.2} < {:.2})",
                    seg.text, seg.t_start_s, seg.confidence, opts.confidence_floor
                ));
            }
            events.push(TranscriptEvent {
                t_start_s: seg.t_start_s,
                t_end_s: seg.t_end_s,
                channel: source.channel,
                text: seg.text,
            });
        }
    }
    if events.is_empty() {
        return Err(IngestError::EmptyTranscript);
    }
    // stable sort keeps same-channel order for equal timestamps
    events.sort_by(|a, b| a.t_start_s.total_cmp(&b.t_start_s));

    let record = SessionRecord {
        id: opts.session_id.clone(),
        workflow: opts.workflow_id.clone(),
        setting: opts.setting.clone(),
        speech_rate_pct: opts.speech_rate_pct,
        events,
        headphones_on_terminal: opts.headphones_on_terminal,
        headphones_on_smartphone: opts.headphones_on_smartphone,
    };
    let violations = record.violations();
    if !violations.is_empty() {
        return Err(IngestError::Validation {
            path: PathBuf::from(&opts.session_id),
            violations,
        });
    }
    Ok(Loaded {
        value: record,
        warnings,
    })
}
