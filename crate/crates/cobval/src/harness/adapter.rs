//! Subprocess adapter protocol: one JSON request line on stdin, one JSON
//! response line on stdout.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;
use thiserror::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MockFifoEntry {
    pub slot_values: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdapterMockSeq {
    pub seq_id: usize,
    pub fifo: Vec<MockFifoEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdapterRequest {
    pub test_name: String,
    pub program_inputs: BTreeMap<String, String>,
    pub mocks: Vec<AdapterMockSeq>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdapterEvent {
    pub seq_id: usize,
    pub occurrence: usize,
    pub slot_values: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdapterResponse {
    #[serde(default)]
    pub program_outputs: BTreeMap<String, String>,
    #[serde(default)]
    pub resource_output_events: Vec<AdapterEvent>,
    /// `"ok"` on success; anything else is treated as a crash report.
    pub status: String,
}

/// What the harness concluded about one adapter invocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", content = "detail")]
pub enum AdapterStatus {
    Ok,
    Crash(String),
    Timeout,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AdapterResult {
    pub program_outputs: BTreeMap<String, String>,
    pub resource_output_events: Vec<AdapterEvent>,
    pub status: AdapterStatus,
}

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("adapter protocol error: {0}")]
    Protocol(String),
    #[error("failed to spawn adapter: {0}")]
    Spawn(String),
}

/// Split a command string on whitespace, honoring single and double quotes.
pub fn split_command(cmd: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut quote: Option<char> = None;
    for c in cmd.chars() {
        match (c, quote) {
            ('\'', None) | ('"', None) => quote = Some(c),
            (c, Some(q)) if c == q => quote = None,
            (c, None) if c.is_whitespace() => {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            }
            (c, _) => current.push(c),
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// A running adapter process exchanging newline-delimited JSON documents.
pub struct AdapterProcess {
    child: Child,
    stdin: Option<ChildStdin>,
    /// Absent while a timed-out reader thread still owns the real handle.
    reader: Option<BufReader<ChildStdout>>,
}

impl AdapterProcess {
    pub fn spawn(cmd: &[String]) -> Result<AdapterProcess, AdapterError> {
        let (program, args) = cmd
            .split_first()
            .ok_or_else(|| AdapterError::Spawn("empty adapter command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| AdapterError::Spawn(format!("{program}: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child
            .stdout
            .take()
            .ok_or_else(|| AdapterError::Spawn("adapter stdout unavailable".into()))?;
        Ok(AdapterProcess {
            child,
            stdin,
            reader: Some(BufReader::new(stdout)),
        })
    }

    /// Send one request and read one response within the timeout.
    pub fn exchange(
        &mut self,
        request: &AdapterRequest,
        timeout: Duration,
    ) -> Result<AdapterResult, AdapterError> {
        let line = serde_json::to_string(request)
            .map_err(|e| AdapterError::Protocol(e.to_string()))?;
        if let Some(stdin) = self.stdin.as_mut() {
            let write = stdin
                .write_all(line.as_bytes())
                .and_then(|_| stdin.write_all(b"\n"))
                .and_then(|_| stdin.flush());
            if write.is_err() {
                return Ok(crashed("adapter closed stdin"));
            }
        }

        let Some(mut reader) = self.reader.take() else {
            return Ok(crashed("adapter stdout lost after timeout"));
        };
        // read with a timeout on a helper thread
        let (tx, rx) = mpsc::channel();
        let handle = std::thread::spawn(move || {
            let mut line = String::new();
            let n = reader.read_line(&mut line);
            let _ = tx.send((n.map_err(|e| e.to_string()), line));
            reader
        });
        match rx.recv_timeout(timeout) {
            Ok((Ok(0), _)) => {
                self.reader = Some(handle.join().expect("reader thread"));
                Ok(crashed("adapter closed stdout"))
            }
            Ok((Ok(_), line)) => {
                self.reader = Some(handle.join().expect("reader thread"));
                match serde_json::from_str::<AdapterResponse>(line.trim()) {
                    Ok(resp) => {
                        let status = if resp.status == "ok" {
                            AdapterStatus::Ok
                        } else {
                            AdapterStatus::Crash(resp.status.clone())
                        };
                        Ok(AdapterResult {
                            program_outputs: resp.program_outputs,
                            resource_output_events: resp.resource_output_events,
                            status,
                        })
                    }
                    Err(e) => Err(AdapterError::Protocol(format!(
                        "malformed response: {e}: {}",
                        line.trim()
                    ))),
                }
            }
            Ok((Err(e), _)) => {
                self.reader = Some(handle.join().expect("reader thread"));
                Ok(crashed(&e))
            }
            Err(_) => {
                // leave the reader with the stuck thread; the child dies now
                let _ = self.child.kill();
                Ok(AdapterResult {
                    program_outputs: BTreeMap::new(),
                    resource_output_events: Vec::new(),
                    status: AdapterStatus::Timeout,
                })
            }
        }
    }

    pub fn finish(mut self) {
        drop(self.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn crashed(reason: &str) -> AdapterResult {
    AdapterResult {
        program_outputs: BTreeMap::new(),
        resource_output_events: Vec::new(),
        status: AdapterStatus::Crash(reason.to_string()),
    }
}

/// One process invocation per test: spawn, exchange once, reap.
pub fn run_adapter_once(
    cmd: &[String],
    request: &AdapterRequest,
    timeout: Duration,
) -> Result<AdapterResult, AdapterError> {
    let mut proc = AdapterProcess::spawn(cmd)?;
    // close stdin after the single request so simple adapters can read to EOF
    let result = proc.exchange(request, timeout);
    proc.finish();
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_splitting_honors_quotes() {
        assert_eq!(
            split_command("prog --flag 'a b' \"c d\""),
            vec!["prog", "--flag", "a b", "c d"]
        );
        assert_eq!(split_command("  "), Vec::<String>::new());
    }

    #[test]
    fn echo_adapter_round_trip() {
        // `cat` echoes the request line; it fails to parse as a response,
        // which must surface as a protocol error, not a panic
        let req = AdapterRequest {
            test_name: "T001".into(),
            program_inputs: BTreeMap::new(),
            mocks: vec![],
        };
        let err = run_adapter_once(
            &["cat".to_string()],
            &req,
            Duration::from_secs(5),
        );
        assert!(matches!(err, Err(AdapterError::Protocol(_))));
    }

    #[test]
    fn well_formed_response_parses() {
        // a tiny adapter in shell: read a line, answer a fixed response
        let script = r#"read line; echo '{"programOutputs":{"x":"1"},"resourceOutputEvents":[],"status":"ok"}'"#;
        let req = AdapterRequest {
            test_name: "T001".into(),
            program_inputs: BTreeMap::new(),
            mocks: vec![],
        };
        let result = run_adapter_once(
            &["sh".to_string(), "-c".to_string(), script.to_string()],
            &req,
            Duration::from_secs(5),
        )
        .unwrap();
        assert_eq!(result.status, AdapterStatus::Ok);
        assert_eq!(result.program_outputs["x"], "1");
    }

    #[test]
    fn timeout_is_reported() {
        let req = AdapterRequest {
            test_name: "T001".into(),
            program_inputs: BTreeMap::new(),
            mocks: vec![],
        };
        let result = run_adapter_once(
            &["sleep".to_string(), "5".to_string()],
            &req,
            Duration::from_millis(200),
        )
        .unwrap();
        assert_eq!(result.status, AdapterStatus::Timeout);
    }
}
