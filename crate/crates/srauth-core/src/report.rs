//! Rendering of analysis and simulation results into matrix-shaped reports
//! (JSON, CSV, markdown) and comparison against curated golden verdicts.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::IssueReport;
use crate::model::{Channel, SessionRecord, SettingKind, Verdict, WorkflowSpec};
use crate::sim::{AttackKind, AttackOutcome};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("golden row {row}: {detail}")]
    GoldenRow { row: usize, detail: String },
}

/// Total screen-reader speaking time exceeds the workflow's verification
/// timeout. None when the workflow has no timeout. A report flag, not an
/// issue code.
pub fn exceeded_verification_time(session: &SessionRecord, workflow: &WorkflowSpec) -> Option<bool> {
    let timeout = workflow.verification_timeout_s?;
    let speaking: f64 = session
        .events
        .iter()
        .filter(|e| e.channel == Channel::ScreenReader)
        .map(|e| e.t_end_s - e.t_start_s)
        .sum();
    Some(speaking > timeout)
}

/// One analyzed session, flattened for matrix rendering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session: String,
    pub workflow: String,
    pub method: String,
    /// Column label: the single reader of the setting, or "term+phone".
    pub reader: String,
    pub codes: Vec<String>,
    pub comprehensibility_pct: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceeded_verification_time: Option<bool>,
}

/// Column label for a session's setting.
pub fn reader_label(session: &SessionRecord) -> String {
    let s = &session.setting;
    match s.kind {
        SettingKind::Terminal => s.terminal_reader.clone().unwrap_or_default(),
        SettingKind::Smartphone => s.smartphone_reader.clone().unwrap_or_default(),
        SettingKind::Concurrent => format!(
            "{}+{}",
            s.terminal_reader.clone().unwrap_or_default(),
            s.smartphone_reader.clone().unwrap_or_default()
        ),
    }
}

pub fn summarize(
    session: &SessionRecord,
    workflow: &WorkflowSpec,
    report: &IssueReport,
) -> SessionSummary {
    SessionSummary {
        session: session.id.clone(),
        workflow: workflow.id.clone(),
        method: workflow.method.clone(),
        reader: reader_label(session),
        codes: report.findings.iter().map(|f| f.code.to_string()).collect(),
        comprehensibility_pct: format!("{:.2}", report.comprehensibility.score * 100.0),
        exceeded_verification_time: exceeded_verification_time(session, workflow),
    }
}

/// Method-by-reader matrix of cell strings, with stable row/column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    pub title: String,
    pub columns: Vec<String>,
    /// row label -> column label -> cell text
    pub cells: BTreeMap<String, BTreeMap<String, String>>,
}

impl Matrix {
    fn build(
        title: &str,
        entries: impl Iterator<Item = (String, String, String)>,
    ) -> Matrix {
        let mut cells: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut columns: Vec<String> = Vec::new();
        for (row, col, value) in entries {
            if !columns.contains(&col) {
                columns.push(col.clone());
            }
            cells.entry(row).or_default().insert(col, value);
        }
        columns.sort();
        Matrix {
            title: title.to_string(),
            columns,
            cells,
        }
    }

    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["method".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (row, by_col) in &self.cells {
            let mut record = vec![row.clone()];
            for col in &self.columns {
                record.push(by_col.get(col).cloned().unwrap_or_default());
            }
            w.write_record(&record)?;
        }
        let bytes = w.into_inner().expect("in-memory writer");
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("## {}\n\n", self.title);
        out.push_str("| method |");
        for c in &self.columns {
            out.push_str(&format!(" {c} |"));
        }
        out.push('\n');
        out.push_str("| --- |");
        for _ in &self.columns {
            out.push_str(" --- |");
        }
        out.push('\n');
        for (row, by_col) in &self.cells {
            out.push_str(&format!("| {row} |"));
            for col in &self.columns {
                out.push_str(&format!(
                    " {} |",
                    by_col.get(col).map(String::as_str).unwrap_or("")
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Communicability codes per (method, reader): the Table-1 shape.
pub fn issue_matrix(summaries: &[SessionSummary]) -> Matrix {
    Matrix::build(
        "Communicability issues",
        summaries.iter().map(|s| {
            (
                s.method.clone(),
                s.reader.clone(),
                if s.codes.is_empty() {
                    "-".to_string()
                } else {
                    s.codes.join("+")
                },
            )
        }),
    )
}

/// Comprehensibility percentage per (method, reader): the Table-2 shape.
pub fn comprehensibility_matrix(summaries: &[SessionSummary]) -> Matrix {
    Matrix::build(
        "Comprehensibility (%)",
        summaries.iter().map(|s| {
            (
                s.method.clone(),
                s.reader.clone(),
                s.comprehensibility_pct.clone(),
            )
        }),
    )
}

const MATRIX_HEADER: [&str; 7] = [
    "method",
    "setting",
    "terminal_reader",
    "smartphone_reader",
    "attack",
    "verdict",
    "source_anchor",
];

fn setting_kind_str(kind: SettingKind) -> &'static str {
    match kind {
        SettingKind::Terminal => "TERMINAL",
        SettingKind::Smartphone => "SMARTPHONE",
        SettingKind::Concurrent => "CONCURRENT",
    }
}

/// Simulation outcomes in the golden CSV column layout (anchor left empty).
pub fn outcomes_to_csv(outcomes: &[AttackOutcome]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MATRIX_HEADER)?;
    for o in outcomes {
        w.write_record([
            o.method.as_str(),
            setting_kind_str(o.setting),
            o.terminal_reader.as_deref().unwrap_or(""),
            o.smartphone_reader.as_deref().unwrap_or(""),
            &o.attack.to_string(),
            &o.verdict.to_string(),
            "",
        ])?;
    }
    let bytes = w.into_inner().expect("in-memory writer");
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn outcomes_to_markdown(outcomes: &[AttackOutcome]) -> String {
    let mut out = String::from(
        "## Attack verdicts\n\n| method | setting | terminal | smartphone | attack | verdict | rounds |\n| --- | --- | --- | --- | --- | --- | --- |\n",
    );
    for o in outcomes {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            o.method,
            setting_kind_str(o.setting),
            o.terminal_reader.as_deref().unwrap_or(""),
            o.smartphone_reader.as_deref().unwrap_or(""),
            o.attack,
            o.verdict,
            o.rounds_elapsed,
        ));
    }
    out
}

/// One expected cell of the curated golden matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCell {
    pub method: String,
    pub setting: SettingKind,
    pub terminal_reader: Option<String>,
    pub smartphone_reader: Option<String>,
    pub attack: AttackKind,
    pub verdict: Verdict,
    pub source_anchor: String,
}

fn parse_setting_kind(s: &str) -> Result<SettingKind, String> {
    match s {
        "TERMINAL" => Ok(SettingKind::Terminal),
        "SMARTPHONE" => Ok(SettingKind::Smartphone),
        "CONCURRENT" => Ok(SettingKind::Concurrent),
        other => Err(format!("unknown setting {other:?}")),
    }
}

/// Parse a golden verdict CSV (the shipped file or a user-curated one).
pub fn read_golden_csv(data: &str) -> Result<Vec<GoldenCell>, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(data.as_bytes());
    let mut cells = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2; // header is line 1
        let field = |idx: usize| -> Result<&str, ReportError> {
            record.get(idx).ok_or_else(|| ReportError::GoldenRow {
                row,
                detail: format!("missing column {}", MATRIX_HEADER[idx]),
            })
        };
        let opt = |s: &str| {
            if s.is_empty() {
                None
            } else {
                Some(s.to_string())
            }
        };
        cells.push(GoldenCell {
            method: field(0)?.to_string(),
            setting: parse_setting_kind(field(1)?)
                .map_err(|detail| ReportError::GoldenRow { row, detail })?,
            terminal_reader: opt(field(2)?),
            smartphone_reader: opt(field(3)?),
            attack: AttackKind::from_str(field(4)?)
                .map_err(|detail| ReportError::GoldenRow { row, detail })?,
            verdict: Verdict::from_str(field(5)?)
                .map_err(|detail| ReportError::GoldenRow { row, detail })?,
            source_anchor: record.get(6).unwrap_or("").to_string(),
        });
    }
    Ok(cells)
}

/// A golden cell the matrix missed or contradicted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMismatch {
    pub cell: GoldenCell,
    /// None when the matrix has no outcome for the cell at all.
    pub actual: Option<Verdict>,
}

/// Compare simulated outcomes against golden cells, cell for cell.
pub fn compare_to_golden(outcomes: &[AttackOutcome], golden: &[GoldenCell]) -> Vec<CellMismatch> {
    let mut mismatches = Vec::new();
    for cell in golden {
        let actual = outcomes.iter().find(|o| {
            o.method == cell.method
                && o.setting == cell.setting
                && o.terminal_reader == cell.terminal_reader
                && o.smartphone_reader == cell.smartphone_reader
                && o.attack == cell.attack
        });
        match actual {
            Some(o) if o.verdict == cell.verdict => {}
            other => mismatches.push(CellMismatch {
                cell: cell.clone(),
                actual: other.map(|o| o.verdict),
            }),
        }
    }
    mismatches
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PlatformSetting, TranscriptEvent};

    fn outcome(method: &str, attack: AttackKind, verdict: Verdict) -> AttackOutcome {
        AttackOutcome {
            attack,
            method: method.into(),
            setting: SettingKind::Terminal,
            terminal_reader: Some("jaws".into()),
            smartphone_reader: None,
            verdict,
            trace: vec![],
            rounds_elapsed: 1,
        }
    }

    #[test]
    fn golden_round_trip_and_compare() {
        let outcomes = vec![
            outcome("google-fido", AttackKind::DisplayOverlay, Verdict::Vulnerable),
            outcome("google-fido", AttackKind::Downgrade, Verdict::Vulnerable),
        ];
        let csv = "method,setting,terminal_reader,smartphone_reader,attack,verdict,source_anchor\n\
            google-fido,TERMINAL,jaws,,DISPLAY_OVERLAY,VULNERABLE,\"reading the false information\"\n\
            google-fido,TERMINAL,jaws,,DOWNGRADE,NOT_VULNERABLE,x\n\
            google-fido,TERMINAL,nvda,,DOWNGRADE,VULNERABLE,y\n";
        let golden = read_golden_csv(csv).unwrap();
        assert_eq!(golden.len(), 3);
        let mismatches = compare_to_golden(&outcomes, &golden);
        assert_eq!(mismatches.len(), 2);
        assert_eq!(mismatches[0].actual, Some(Verdict::Vulnerable));
        assert_eq!(mismatches[1].actual, None);
    }

    #[test]
    fn outcome_csv_is_stable_and_parseable() {
        let outcomes = vec![outcome("gauth", AttackKind::PhishingRelay, Verdict::Vulnerable)];
        let a = outcomes_to_csv(&outcomes).unwrap();
        let b = outcomes_to_csv(&outcomes).unwrap();
        assert_eq!(a, b);
        let parsed = read_golden_csv(&a).unwrap();
        assert_eq!(parsed[0].method, "gauth");
        assert_eq!(parsed[0].verdict, Verdict::Vulnerable);
    }

    #[test]
    fn verification_time_flag() {
        let wf = WorkflowSpec {
            id: "w".into(),
            method: "m".into(),
            setting: PlatformSetting::terminal("jaws"),
            full_text: "text".into(),
            elements: vec![],
            verification_timeout_s: Some(5.0),
        };
        let mut session = SessionRecord {
            id: "s".into(),
            workflow: "w".into(),
            setting: PlatformSetting::terminal("jaws"),
            speech_rate_pct: 50,
            events: vec![TranscriptEvent {
                t_start_s: 0.0,
                t_end_s: 4.0,
                channel: Channel::ScreenReader,
                text: "short".into(),
            }],
            headphones_on_terminal: true,
            headphones_on_smartphone: false,
        };
        assert_eq!(exceeded_verification_time(&session, &wf), Some(false));
        session.events.push(TranscriptEvent {
            t_start_s: 4.0,
            t_end_s: 8.0,
            channel: Channel::ScreenReader,
            text: "long".into(),
        });
        assert_eq!(exceeded_verification_time(&session, &wf), Some(true));
        let no_timeout = WorkflowSpec {
            verification_timeout_s: None,
            ..wf
        };
        assert_eq!(exceeded_verification_time(&session, &no_timeout), None);
    }

    #[test]
    fn matrices_have_stable_shape() {
        let summaries = vec![
            SessionSummary {
                session: "s1".into(),
                workflow: "w1".into(),
                method: "winauth".into(),
                reader: "jaws".into(),
                codes: vec!["UCO".into()],
                comprehensibility_pct: "12.08".into(),
                exceeded_verification_time: Some(true),
            },
            SessionSummary {
                session: "s2".into(),
                workflow: "w2".into(),
                method: "winauth".into(),
                reader: "chromevox".into(),
                codes: vec!["UCEOB".into()],
                comprehensibility_pct: "0.00".into(),
                exceeded_verification_time: None,
            },
        ];
        let m = issue_matrix(&summaries);
        assert_eq!(m.columns, vec!["chromevox", "jaws"]);
        assert_eq!(m.cells["winauth"]["jaws"], "UCO");
        let csv = m.to_csv().unwrap();
        assert!(csv.starts_with("method,chromevox,jaws"));
        let md = m.to_markdown();
        assert!(md.contains("| winauth | UCEOB | UCO |"));
        let c = comprehensibility_matrix(&summaries);
        assert_eq!(c.cells["winauth"]["jaws"], "12.08");
    }
}
