//! A scriptable bridge child used to exercise the client without any model
//! environment. It runs in-process over pipes or as the
//! `biaseval-mock-shim` binary.

use std::io::{self, BufRead, BufReader, Read, Write};

use super::protocol::{BridgeInfo, Reply, Request};
use super::{Channel, Launcher};

#[derive(Clone, Debug, PartialEq)]
pub enum MockScore {
    Constant(f64),
    /// 1.0 iff hyp == ref.
    Exact,
}

#[derive(Clone, Debug)]
pub struct MockShim {
    pub info: BridgeInfo,
    pub score: MockScore,
    /// Never answer `info`.
    pub silent: bool,
    /// Exit after answering this many score requests.
    pub crash_after: Option<usize>,
    /// Buffer replies and emit each full window in reverse order.
    pub reverse_window: usize,
    /// Never answer score requests whose hyp equals this.
    pub ignore_hyp: Option<String>,
    /// Answer score requests whose hyp equals this with an error.
    pub fail_hyp: Option<String>,
}

impl MockShim {
    pub fn constant(value: f64) -> Self {
        MockShim {
            info: BridgeInfo {
                name: "const".into(),
                symmetric: true,
                score_range: None,
                supports_multi_ref: false,
            },
            score: MockScore::Constant(value),
            silent: false,
            crash_after: None,
            reverse_window: 1,
            ignore_hyp: None,
            fail_hyp: None,
        }
    }

    pub fn exact() -> Self {
        MockShim {
            info: BridgeInfo {
                name: "exact".into(),
                symmetric: true,
                score_range: Some([0.0, 1.0]),
                supports_multi_ref: false,
            },
            score: MockScore::Exact,
            ..Self::constant(0.0)
        }
    }

    fn value(&self, hyp: &str, reference: &str) -> f64 {
        match self.score {
            MockScore::Constant(v) => v,
            MockScore::Exact => f64::from(u8::from(hyp == reference)),
        }
    }

    /// Answers requests until `shutdown`, end of input, or a scripted crash.
    /// Returns the process exit code the shim would use. Held replies are
    /// released early once no further input is buffered.
    pub fn serve(&self, input: impl Read, mut output: impl Write) -> io::Result<i32> {
        let mut input = BufReader::new(input);
        let mut answered = 0usize;
        let mut held: Vec<Reply> = Vec::new();
        let mut line = String::new();
        loop {
            if input.buffer().is_empty() && !held.is_empty() {
                release(&mut held, &mut output)?;
            }
            line.clear();
            if input.read_line(&mut line)? == 0 {
                break;
            }
            if line.trim().is_empty() {
                continue;
            }
            let request: Request = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(_) => continue,
            };
            match request {
                Request::Info => {
                    if !self.silent {
                        output.write_all(Reply::Info(self.info.clone()).to_line().as_bytes())?;
                        output.flush()?;
                    }
                }
                Request::Shutdown => return Ok(0),
                Request::Score { id, hyp, reference } => {
                    if self.crash_after.is_some_and(|n| answered >= n) {
                        return Ok(3);
                    }
                    if self.ignore_hyp.as_deref() == Some(hyp.as_str()) {
                        continue;
                    }
                    let reply = if self.fail_hyp.as_deref() == Some(hyp.as_str()) {
                        Reply::Error {
                            id,
                            message: "scripted failure".into(),
                        }
                    } else {
                        Reply::Score {
                            id,
                            score: self.value(&hyp, &reference),
                        }
                    };
                    answered += 1;
                    held.push(reply);
                    if held.len() >= self.reverse_window.max(1) {
                        release(&mut held, &mut output)?;
                    }
                }
            }
        }
        release(&mut held, &mut output)?;
        Ok(0)
    }
}

fn release(held: &mut Vec<Reply>, output: &mut impl Write) -> io::Result<()> {
    for r in held.drain(..).rev() {
        output.write_all(r.to_line().as_bytes())?;
    }
    output.flush()
}

/// Runs a [`MockShim`] on a thread, connected through OS pipes.
#[derive(Clone, Debug)]
pub struct InProcessLauncher {
    pub shim: MockShim,
}

impl Launcher for InProcessLauncher {
    fn launch(&self) -> io::Result<Channel> {
        let (req_reader, req_writer) = io::pipe()?;
        let (resp_reader, resp_writer) = io::pipe()?;
        let shim = self.shim.clone();
        std::thread::Builder::new()
            .name(format!("mock-{}", shim.info.name))
            .spawn(move || {
                let _ = shim.serve(req_reader, resp_writer);
            })?;
        Ok(Channel {
            writer: Box::new(req_writer),
            reader: Box::new(BufReader::new(resp_reader)),
            child: None,
        })
    }

    fn describe(&self) -> String {
        format!("in-process mock {}", self.shim.info.name)
    }
}
