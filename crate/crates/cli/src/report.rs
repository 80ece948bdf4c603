use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use stablecut::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Optimal,
    NotStableCertificate,
    #[serde(rename = "NOT_4STABLE_CERTIFICATE")]
    NotFourStableCertificate,
    Improved,
    CertifiedStop,
    /// The command ran to completion without solving an optimization
    /// problem (certify, generate, round, bench).
    Completed,
    Error,
}

/// One JSON object per invocation on stdout.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<&'static str>,
    pub instance_digest: Option<String>,
    pub status: Status,
    pub solution: Value,
    pub diagnostics: Value,
    pub seed: u64,
    pub tolerances: Value,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            command,
            mode: None,
            instance_digest: None,
            status: Status::Completed,
            solution: Value::Null,
            diagnostics: Value::Null,
            seed,
            tolerances: Value::Null,
            wall_time_ms: 0.0,
            error: None,
        }
    }

    pub fn fail(&mut self, e: &Error) {
        self.status = Status::Error;
        self.solution = Value::Null;
        self.error = Some(e.to_string());
        if let Error::SolverFailure { residuals, .. } = e {
            self.diagnostics = serde_json::json!({ "residuals": residuals });
        }
    }

    /// Key-value text for `--pretty`.
    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if let Some(mode) = self.mode {
            out += &format!("mode: {mode}\n");
        }
        if let Some(d) = &self.instance_digest {
            out += &format!("instance: {d}\n");
        }
        let status = serde_json::to_value(self.status).unwrap_or(Value::Null);
        out += &format!("status: {}\n", status.as_str().unwrap_or("?"));
        if let Some(e) = &self.error {
            out += &format!("error: {e}\n");
        }
        out += &format!("seed: {}\nwall time: {:.1} ms\n", self.seed, self.wall_time_ms);
        for (name, v) in [("solution", &self.solution), ("diagnostics", &self.diagnostics), ("tolerances", &self.tolerances)] {
            if !v.is_null() {
                out += &format!("{name}:\n{}\n", serde_json::to_string_pretty(v).unwrap_or_default());
            }
        }
        out
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
