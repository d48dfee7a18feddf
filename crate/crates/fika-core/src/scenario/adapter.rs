//! Execution adapter protocol: one subprocess invocation per compile or run
//! request, JSON on stdin, JSON on stdout, exit code zero.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterStatus {
    Ok,
    CompileError,
    RuntimeError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagLevel {
    Error,
    Warn,
    Info,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub level: DiagLevel,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterResponse {
    pub status: AdapterStatus,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lcov: Option<String>,
}

impl AdapterResponse {
    pub fn ok() -> Self {
        AdapterResponse {
            status: AdapterStatus::Ok,
            diagnostics: Vec::new(),
            lcov: None,
        }
    }

    /// Messages of error-level diagnostics, verbatim and in order.
    pub fn error_messages(&self) -> Vec<&str> {
        self.diagnostics
            .iter()
            .filter(|d| d.level == DiagLevel::Error)
            .map(|d| d.message.as_str())
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AdapterRequest {
    pub action: String,
    pub scenario_path: String,
    pub project_root: String,
}

/// Adapter process failure: spawn error, nonzero exit or malformed response.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("adapter error: {message}")]
pub struct AdapterError {
    pub message: String,
}

impl AdapterError {
    pub fn new(message: impl Into<String>) -> Self {
        AdapterError {
            message: message.into(),
        }
    }
}

/// Compiles and runs scenario files against a project.
pub trait ExecutionAdapter: Sync {
    fn compile(&self, scenario_path: &Path, project_root: &Path)
        -> Result<AdapterResponse, AdapterError>;
    fn run(&self, scenario_path: &Path, project_root: &Path)
        -> Result<AdapterResponse, AdapterError>;
}

/// Spawns a configured command per request.
pub struct CommandAdapter {
    pub argv: Vec<String>,
}

impl CommandAdapter {
    pub fn new(argv: Vec<String>) -> Self {
        CommandAdapter { argv }
    }

    fn invoke(
        &self,
        action: &str,
        scenario_path: &Path,
        project_root: &Path,
    ) -> Result<AdapterResponse, AdapterError> {
        let Some(program) = self.argv.first() else {
            return Err(AdapterError::new("adapter command is empty"));
        };
        let request = AdapterRequest {
            action: action.to_string(),
            scenario_path: scenario_path.display().to_string(),
            project_root: project_root.display().to_string(),
        };
        let payload =
            serde_json::to_string(&request).expect("request serialization cannot fail");

        let mut child = Command::new(program)
            .args(&self.argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| AdapterError::new(format!("failed to spawn {program}: {e}")))?;
        // A child that exits without draining stdin closes the pipe early;
        // judge it by its exit status and output rather than the write.
        if let Err(e) = child
            .stdin
            .take()
            .expect("stdin was piped")
            .write_all(payload.as_bytes())
        {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(AdapterError::new(format!("failed to write request: {e}")));
            }
        }
        let output = child
            .wait_with_output()
            .map_err(|e| AdapterError::new(format!("failed to read adapter output: {e}")))?;
        if !output.status.success() {
            let stderr = String::from_utf8_lossy(&output.stderr);
            return Err(AdapterError::new(format!(
                "adapter exited with {}: {}",
                output.status,
                stderr.trim()
            )));
        }
        serde_json::from_slice(&output.stdout)
            .map_err(|e| AdapterError::new(format!("malformed adapter response: {e}")))
    }
}

impl ExecutionAdapter for CommandAdapter {
    fn compile(
        &self,
        scenario_path: &Path,
        project_root: &Path,
    ) -> Result<AdapterResponse, AdapterError> {
        self.invoke("compile", scenario_path, project_root)
    }

    fn run(
        &self,
        scenario_path: &Path,
        project_root: &Path,
    ) -> Result<AdapterResponse, AdapterError> {
        self.invoke("run", scenario_path, project_root)
    }
}
