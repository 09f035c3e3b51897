//! Oracles backed by an external process or a recorded response file.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;

use super::wire::{self, ResponseLine, CODE_UNKNOWN_IMAGE};
use super::{MaskOracle, OracleError, OracleRequest, OracleResponse};

/// Environment variable holding the shell command for [`ProcessOracle`].
pub const ORACLE_CMD_ENV: &str = "SESAM_ORACLE_CMD";

/// Runs a shell command per batch, writing request lines to its stdin and
/// reading response lines from its stdout.
#[derive(Debug, Clone)]
pub struct ProcessOracle {
    command: String,
}

impl ProcessOracle {
    pub fn new(command: impl Into<String>) -> Self {
        ProcessOracle {
            command: command.into(),
        }
    }

    pub fn from_env() -> Result<Self, OracleError> {
        match std::env::var(ORACLE_CMD_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Ok(Self::new(cmd)),
            _ => Err(OracleError::BackendUnavailable(format!("{ORACLE_CMD_ENV} is not set"))),
        }
    }

    pub fn command(&self) -> &str {
        &self.command
    }
}

impl MaskOracle for ProcessOracle {
    fn query(&self, request: &OracleRequest) -> Result<OracleResponse, OracleError> {
        let mut out = self.query_batch(std::slice::from_ref(request))?;
        Ok(out.remove(0))
    }

    fn query_batch(&self, requests: &[OracleRequest]) -> Result<Vec<OracleResponse>, OracleError> {
        if requests.is_empty() {
            return Ok(Vec::new());
        }
        if let Some(r) = requests.iter().find(|r| r.points.is_empty()) {
            return Err(OracleError::EmptyRequest(r.request_id.clone()));
        }
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| OracleError::BackendUnavailable(format!("{}: {e}", self.command)))?;

        let payload: String = requests.iter().map(|r| wire::encode_request(r) + "\n").collect();
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = thread::spawn(move || {
            // a backend that exits early closes the pipe; that surfaces below
            let _ = stdin.write_all(payload.as_bytes());
        });
        let mut stderr = child.stderr.take().expect("piped stderr");
        let err_reader = thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });

        let stdout = child.stdout.take().expect("piped stdout");
        let lines: Vec<String> = BufReader::new(stdout).lines().collect::<Result<_, _>>()?;
        let _ = writer.join();
        let status = child.wait()?;
        let stderr_text = err_reader.join().unwrap_or_default();

        if lines.iter().all(|l| l.trim().is_empty()) && !status.success() {
            return Err(OracleError::BackendUnavailable(format!(
                "`{}` exited with {status}: {}",
                self.command,
                stderr_text.trim()
            )));
        }
        wire::match_responses(requests, lines)
    }
}

/// Serves responses recorded in a JSON-lines file, keyed by request id.
#[derive(Debug, Clone, Default)]
pub struct ReplayOracle {
    responses: HashMap<String, OracleResponse>,
    errors: HashMap<String, (Option<String>, String)>,
}

impl ReplayOracle {
    pub fn from_reader(reader: impl BufRead) -> Result<Self, OracleError> {
        let mut oracle = ReplayOracle::default();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match wire::decode_response_line(&line)? {
                ResponseLine::Header(_) => {}
                ResponseLine::Error {
                    request_id: Some(id),
                    code,
                    message,
                } => {
                    oracle.errors.insert(id, (code, message));
                }
                ResponseLine::Error { message, .. } => {
                    return Err(OracleError::MalformedResponse(format!(
                        "error line without request_id: {message}"
                    )));
                }
                ResponseLine::Response(r) => {
                    if oracle.responses.contains_key(&r.request_id) {
                        return Err(OracleError::MalformedResponse(format!(
                            "duplicate response for `{}`",
                            r.request_id
                        )));
                    }
                    oracle.responses.insert(r.request_id.clone(), r);
                }
            }
        }
        Ok(oracle)
    }

    pub fn open(path: &Path) -> Result<Self, OracleError> {
        let file = std::fs::File::open(path)
            .map_err(|e| OracleError::BackendUnavailable(format!("{}: {e}", path.display())))?;
        Self::from_reader(BufReader::new(file))
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl MaskOracle for ReplayOracle {
    fn query(&self, request: &OracleRequest) -> Result<OracleResponse, OracleError> {
        if let Some((code, message)) = self.errors.get(&request.request_id) {
            if code.as_deref() == Some(CODE_UNKNOWN_IMAGE) {
                return Err(OracleError::UnknownImage(request.image_ref.clone()));
            }
            return Err(OracleError::Backend {
                request_id: request.request_id.clone(),
                message: message.clone(),
            });
        }
        self.responses
            .get(&request.request_id)
            .cloned()
            .ok_or_else(|| OracleError::MalformedResponse(format!("no recorded response for `{}`", request.request_id)))
    }
}
