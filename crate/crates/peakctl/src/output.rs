//! JSON envelopes and CSV tables. Every artifact embeds the resolved
//! configuration; the only non-reproducible field is the header timestamp.

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub const REPORT_SCHEMA: &str = "peakctl-report/1";

#[derive(Serialize)]
struct Header<'a> {
    schema: &'static str,
    command: &'a str,
    generated_at: String,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    header: Header<'a>,
    config: &'a RunConfig,
    report: &'a T,
}

pub fn envelope_json<T: Serialize>(command: &str, config: &RunConfig, report: &T) -> Result<String, CliError> {
    let env = Envelope {
        header: Header { schema: REPORT_SCHEMA, command, generated_at: chrono::Utc::now().to_rfc3339() },
        config,
        report,
    };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// A CSV table preceded by a `# config: {…}` comment line.
pub fn csv_table<R: Serialize>(config: &RunConfig, rows: &[R]) -> Result<String, CliError> {
    let cfg = serde_json::to_string(config).map_err(|e| CliError::Output(e.to_string()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(format!("# config: {cfg}\n{body}"))
}
