//! Report documents and their NDJSON, CSV and table renderings.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

/// One verified claim. `anchor` says in a sentence what is being checked.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReportDoc {
    pub claim_id: String,
    pub anchor: String,
    pub inputs: Value,
    pub verdict: Outcome,
    pub witness: Value,
    pub wall_time_ms: u64,
}

impl ReportDoc {
    pub fn new(claim_id: impl Into<String>, anchor: impl Into<String>, inputs: Value) -> ReportDoc {
        ReportDoc { claim_id: claim_id.into(), anchor: anchor.into(), inputs, verdict: Outcome::Skipped, witness: Value::Null, wall_time_ms: 0 }
    }

    pub fn pass(mut self) -> ReportDoc {
        self.verdict = Outcome::Pass;
        self
    }

    /// A failure always carries a witness; an empty one is replaced by a note.
    pub fn fail(mut self, witness: Value) -> ReportDoc {
        self.verdict = Outcome::Fail;
        self.witness = if witness.is_null() { Value::String("no witness recorded".into()) } else { witness };
        self
    }

    pub fn skip(mut self, why: impl Into<String>) -> ReportDoc {
        self.verdict = Outcome::Skipped;
        self.witness = Value::String(why.into());
        self
    }

    pub fn judge(self, holds: bool, witness: Value) -> ReportDoc {
        if holds {
            let mut d = self.pass();
            d.witness = witness;
            d
        } else {
            self.fail(witness)
        }
    }

    pub fn timed(mut self, start: Instant) -> ReportDoc {
        self.wall_time_ms = start.elapsed().as_millis() as u64;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ndjson,
    Csv,
    Table,
}

pub fn parse_format(s: &str) -> Option<Format> {
    match s {
        "ndjson" => Some(Format::Ndjson),
        "csv" => Some(Format::Csv),
        "table" => Some(Format::Table),
        _ => None,
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn witness_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn verdict_text(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Skipped => "skipped",
    }
}

pub fn write_header(out: &mut dyn Write, format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => writeln!(out, "claim-id,verdict,wall-time-ms,anchor,witness"),
        Format::Table => writeln!(out, "{:<56} {:<8} {:>8}  witness", "claim", "verdict", "ms"),
        Format::Ndjson => Ok(()),
    }
}

pub fn write_doc(out: &mut dyn Write, format: Format, doc: &ReportDoc) -> std::io::Result<()> {
    match format {
        Format::Ndjson => writeln!(out, "{}", serde_json::to_string(doc).expect("report serialises")),
        Format::Csv => writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(&doc.claim_id),
            verdict_text(doc.verdict),
            doc.wall_time_ms,
            csv_field(&doc.anchor),
            csv_field(&witness_text(&doc.witness))
        ),
        Format::Table => {
            let w = witness_text(&doc.witness);
            let w = if w.chars().count() > 100 { format!("{}...", w.chars().take(100).collect::<String>()) } else { w };
            writeln!(out, "{:<56} {:<8} {:>8}  {}", doc.claim_id, verdict_text(doc.verdict), doc.wall_time_ms, w)
        }
    }
}
