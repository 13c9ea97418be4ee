//! Versioned run report written by every subcommand.

use mukai_lab::report::{Check, CheckList};
use mukai_lab::Error;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    pub checks: Vec<Check>,
    /// Wall-clock time per phase; the only field that varies between
    /// identical runs.
    pub timings_ms: BTreeMap<String, f64>,
    pub config_echo: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, config_echo: Value) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            status: Status::Pass,
            first_failure: None,
            checks: Vec::new(),
            timings_ms: BTreeMap::new(),
            config_echo,
            result: Value::Null,
            error: None,
        }
    }

    pub fn add_checks(&mut self, list: CheckList) {
        self.checks.extend(list.checks);
    }

    /// Runs `f` and records its wall-clock time under `phase`.
    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings_ms.insert(phase.to_string(), t.elapsed().as_secs_f64() * 1e3);
        out
    }

    /// Sets the status from the checks.
    pub fn finish(mut self) -> Self {
        if self.error.is_none() {
            self.first_failure = self.checks.iter().find(|c| !c.passed).map(|c| c.name.clone());
            self.status = if self.first_failure.is_some() { Status::Fail } else { Status::Pass };
        }
        self
    }

    pub fn failed_with(mut self, err: &Error) -> Self {
        let kind = match err {
            Error::Input(_) => "input",
            Error::Precondition(_) => "precondition",
            Error::Numerical(_) => "numerical",
        };
        self.status = Status::Error;
        self.error = Some(ErrorInfo { kind, message: err.to_string() });
        self
    }

    /// 0 pass, 1 check failure, 2 input error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match (&self.status, &self.error) {
            (Status::Pass, _) => 0,
            (Status::Fail, _) => 1,
            (Status::Error, Some(e)) if e.kind == "numerical" => 3,
            (Status::Error, _) => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_checks() {
        let mut r = RunReport::new("x", Value::Null);
        r.add_checks(CheckList { checks: vec![Check::exact("a", true), Check::within("b", 2.0, 1.0)] });
        let r = r.finish();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.first_failure.as_deref(), Some("b"));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        let r = RunReport::new("x", Value::Null).failed_with(&Error::numerical("cg stalled")).finish();
        assert_eq!(r.exit_code(), 3);
        let r = RunReport::new("x", Value::Null).failed_with(&Error::input("bad json")).finish();
        assert_eq!(r.exit_code(), 2);
        let r = RunReport::new("x", Value::Null).failed_with(&Error::precondition("zero flux")).finish();
        assert_eq!(r.exit_code(), 2);
        assert_eq!(RunReport::new("x", Value::Null).finish().exit_code(), 0);
    }
}
