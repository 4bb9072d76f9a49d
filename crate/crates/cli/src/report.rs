use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SCHEMA: &str = "radflow.report.v1";

/// The envelope shared by every subcommand's JSON output.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub seed: u64,
    /// Every tolerance a verdict in `result` was tested against.
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, seed: u64, result: impl Serialize) -> Result<Report, CliError> {
        Ok(Report {
            schema: SCHEMA,
            command: command.to_string(),
            seed,
            tolerances: BTreeMap::new(),
            pass: true,
            result: serde_json::to_value(result)?,
        })
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Report {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn pass(mut self, pass: bool) -> Report {
        self.pass = pass;
        self
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes to `path`, or to standard output when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.to_json()?;
        match path {
            Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::io(p, e)),
            None => write_stdout(&(text + "\n")),
        }
    }
}

/// Prints to standard output; a closed pipe is not an error.
pub fn write_stdout(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io(Path::new("<stdout>"), e)),
        _ => Ok(()),
    }
}
