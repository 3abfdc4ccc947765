//! Child-process bridge for external model-based metrics.
//!
//! The child speaks newline-delimited JSON on stdin/stdout (see
//! [`protocol`]). One writer and one reader thread serve each child;
//! replies are dispatched to waiting callers by request id.

pub mod cache;
pub mod mock;
pub mod protocol;

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use cache::ScoreCache;
pub use protocol::{BridgeInfo, Reply, Request};

use crate::error::Result;
use crate::scorer::{Scorer, ScorerInfo};
use crate::text::Text;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BridgeError {
    #[error("invalid bridge config: {0}")]
    Config(String),
    #[error("failed to start child: {0}")]
    Spawn(String),
    #[error("no info reply within {0:?}")]
    HandshakeTimeout(Duration),
    #[error("malformed reply: {0}")]
    MalformedReply(String),
    #[error("child exited (status {0:?})")]
    ChildExited(Option<i32>),
    #[error("request {0} timed out")]
    RequestTimeout(u64),
    #[error("child crashed with request {0} in flight")]
    Crashed(u64),
    #[error("child reported error for request {id}: {message}")]
    Remote { id: u64, message: String },
    #[error("score {value} for request {id} outside advertised range [{lo}, {hi}]")]
    RangeViolation { id: u64, value: f64, lo: f64, hi: f64 },
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BridgeConfig {
    pub command: Vec<String>,
    pub handshake_timeout: Duration,
    pub request_timeout: Duration,
    pub max_batch: usize,
}

impl BridgeConfig {
    pub fn new(command: Vec<String>) -> Self {
        BridgeConfig {
            command,
            handshake_timeout: Duration::from_secs(60),
            request_timeout: Duration::from_secs(120),
            max_batch: 64,
        }
    }

    /// Splits a command line on whitespace.
    pub fn from_command_line(line: &str) -> Self {
        Self::new(line.split_whitespace().map(str::to_owned).collect())
    }

    pub fn validate(&self) -> Result<(), BridgeError> {
        if self.handshake_timeout.is_zero() || self.request_timeout.is_zero() {
            return Err(BridgeError::Config("timeouts must be positive".into()));
        }
        if self.max_batch == 0 {
            return Err(BridgeError::Config("max_batch must be at least 1".into()));
        }
        Ok(())
    }
}

/// Both ends of a connection to a child.
pub struct Channel {
    pub writer: Box<dyn Write + Send>,
    pub reader: Box<dyn BufRead + Send>,
    pub child: Option<Child>,
}

/// Starts a fresh child.
pub trait Launcher: Send + Sync {
    fn launch(&self) -> io::Result<Channel>;
    fn describe(&self) -> String;
}

#[derive(Clone, Debug)]
pub struct ProcessLauncher {
    pub command: Vec<String>,
}

impl Launcher for ProcessLauncher {
    fn launch(&self) -> io::Result<Channel> {
        let (program, args) = self
            .command
            .split_first()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "empty bridge command"))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let writer = child.stdin.take().expect("piped stdin");
        let reader = io::BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Channel {
            writer: Box::new(writer),
            reader: Box::new(reader),
            child: Some(child),
        })
    }

    fn describe(&self) -> String {
        self.command.join(" ")
    }
}

type Pending = Arc<Mutex<HashMap<u64, Sender<Result<f64, BridgeError>>>>>;

struct Connection {
    writer: Mutex<Box<dyn Write + Send>>,
    pending: Pending,
    info_rx: Mutex<Receiver<Result<BridgeInfo, BridgeError>>>,
    alive: Arc<AtomicBool>,
    child: Mutex<Option<Child>>,
}

impl Connection {
    fn open(launcher: &dyn Launcher) -> Result<Connection, BridgeError> {
        let Channel { writer, reader, child } = launcher
            .launch()
            .map_err(|e| BridgeError::Spawn(format!("{}: {e}", launcher.describe())))?;
        let pending: Pending = Arc::default();
        let alive = Arc::new(AtomicBool::new(true));
        let (info_tx, info_rx) = mpsc::channel();
        {
            let pending = Arc::clone(&pending);
            let alive = Arc::clone(&alive);
            thread::Builder::new()
                .name("bridge-reader".into())
                .spawn(move || read_loop(reader, pending, info_tx, alive))
                .map_err(|e| BridgeError::Spawn(e.to_string()))?;
        }
        Ok(Connection {
            writer: Mutex::new(writer),
            pending,
            info_rx: Mutex::new(info_rx),
            alive,
            child: Mutex::new(child),
        })
    }

    fn send(&self, request: &Request) -> Result<(), BridgeError> {
        let mut w = self.writer.lock().expect("writer lock");
        w.write_all(request.to_line().as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| BridgeError::Io(e.to_string()))
    }

    fn exit_status(&self) -> Option<i32> {
        let mut child = self.child.lock().expect("child lock");
        let child = child.as_mut()?;
        // give a dying child a moment to be reaped
        for _ in 0..50 {
            if let Ok(Some(status)) = child.try_wait() {
                return status.code();
            }
            thread::sleep(Duration::from_millis(10));
        }
        None
    }

    fn handshake(&self, timeout: Duration) -> Result<BridgeInfo, BridgeError> {
        self.send(&Request::Info)?;
        let rx = self.info_rx.lock().expect("info lock");
        match rx.recv_timeout(timeout) {
            Ok(Ok(info)) => Ok(info),
            Ok(Err(BridgeError::ChildExited(_))) | Err(RecvTimeoutError::Disconnected) => {
                Err(BridgeError::ChildExited(self.exit_status()))
            }
            Ok(Err(e)) => Err(e),
            Err(RecvTimeoutError::Timeout) => Err(BridgeError::HandshakeTimeout(timeout)),
        }
    }

    fn shutdown(&self) {
        let _ = self.send(&Request::Shutdown);
        if let Some(mut child) = self.child.lock().expect("child lock").take() {
            let deadline = Instant::now() + Duration::from_secs(2);
            while Instant::now() < deadline {
                if let Ok(Some(_)) = child.try_wait() {
                    return;
                }
                thread::sleep(Duration::from_millis(10));
            }
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

fn read_loop(
    reader: Box<dyn BufRead + Send>,
    pending: Pending,
    info_tx: Sender<Result<BridgeInfo, BridgeError>>,
    alive: Arc<AtomicBool>,
) {
    for line in reader.lines() {
        let Ok(line) = line else { break };
        if line.trim().is_empty() {
            continue;
        }
        match Reply::parse(&line) {
            Ok(Reply::Info(info)) => {
                let _ = info_tx.send(Ok(info));
            }
            Ok(Reply::Score { id, score }) => dispatch(&pending, id, Ok(score)),
            Ok(Reply::Error { id, message }) => dispatch(&pending, id, Err(BridgeError::Remote { id, message })),
            Err(e) => {
                log::warn!("bridge: {e}");
                let _ = info_tx.send(Err(e));
            }
        }
    }
    alive.store(false, Ordering::SeqCst);
    let _ = info_tx.send(Err(BridgeError::ChildExited(None)));
    for (id, tx) in pending.lock().expect("pending lock").drain() {
        let _ = tx.send(Err(BridgeError::Crashed(id)));
    }
}

fn dispatch(pending: &Pending, id: u64, result: Result<f64, BridgeError>) {
    match pending.lock().expect("pending lock").remove(&id) {
        Some(tx) => {
            let _ = tx.send(result);
        }
        None => log::warn!("bridge: reply for unknown or expired id {id}"),
    }
}

/// An external metric reached through a child process.
pub struct BridgeScorer {
    config: BridgeConfig,
    launcher: Box<dyn Launcher>,
    conn: Mutex<Option<Arc<Connection>>>,
    bridge_info: BridgeInfo,
    info: ScorerInfo,
    cache: Arc<ScoreCache>,
    next_id: AtomicU64,
}

impl BridgeScorer {
    /// Spawns `config.command` and performs the handshake.
    pub fn spawn(config: BridgeConfig) -> Result<Self, BridgeError> {
        let launcher = ProcessLauncher {
            command: config.command.clone(),
        };
        Self::with_launcher(config, Box::new(launcher))
    }

    pub fn with_launcher(config: BridgeConfig, launcher: Box<dyn Launcher>) -> Result<Self, BridgeError> {
        config.validate()?;
        let conn = Connection::open(launcher.as_ref())?;
        let bridge_info = match conn.handshake(config.handshake_timeout) {
            Ok(info) => info,
            Err(e) => {
                conn.shutdown();
                return Err(e);
            }
        };
        let mut info = ScorerInfo::new(bridge_info.name.clone())
            .symmetric(bridge_info.symmetric)
            .multi_ref(bridge_info.supports_multi_ref);
        info.score_range = bridge_info.score_range.map(|[lo, hi]| (lo, hi));
        Ok(BridgeScorer {
            config,
            launcher,
            conn: Mutex::new(Some(Arc::new(conn))),
            bridge_info,
            info,
            cache: Arc::new(ScoreCache::in_memory()),
            next_id: AtomicU64::new(1),
        })
    }

    /// Shares `cache` (possibly disk-backed) with this scorer.
    pub fn with_cache(mut self, cache: Arc<ScoreCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn bridge_info(&self) -> &BridgeInfo {
        &self.bridge_info
    }

    fn connection(&self, restarts_left: &mut usize) -> Option<Arc<Connection>> {
        let mut guard = self.conn.lock().expect("conn lock");
        if let Some(c) = guard.as_ref() {
            if c.alive.load(Ordering::SeqCst) {
                return Some(Arc::clone(c));
            }
        }
        if *restarts_left == 0 {
            return None;
        }
        *restarts_left -= 1;
        if let Some(old) = guard.take() {
            old.shutdown();
        }
        log::warn!("bridge: restarting {}", self.launcher.describe());
        let conn = Connection::open(self.launcher.as_ref()).ok()?;
        match conn.handshake(self.config.handshake_timeout) {
            Ok(_) => {
                let conn = Arc::new(conn);
                *guard = Some(Arc::clone(&conn));
                Some(conn)
            }
            Err(e) => {
                log::warn!("bridge: restart failed: {e}");
                conn.shutdown();
                None
            }
        }
    }

    /// Scores `(id, hyp, ref)` triples. Results follow request order and
    /// carry the caller's ids; every id gets exactly one outcome.
    pub fn score_batch(&self, requests: &[(u64, &str, &str)]) -> Vec<(u64, Result<f64, BridgeError>)> {
        let mut out: Vec<(u64, Result<f64, BridgeError>)> = Vec::with_capacity(requests.len());
        let mut restarts_left = 1;
        for chunk in requests.chunks(self.config.max_batch) {
            let Some(conn) = self.connection(&mut restarts_left) else {
                out.extend(
                    chunk
                        .iter()
                        .map(|&(id, _, _)| (id, Err(BridgeError::ChildExited(None)))),
                );
                continue;
            };
            let mut waiting = Vec::with_capacity(chunk.len());
            for &(id, hyp, reference) in chunk {
                let wire_id = self.next_id.fetch_add(1, Ordering::Relaxed);
                let (tx, rx) = mpsc::channel();
                conn.pending.lock().expect("pending lock").insert(wire_id, tx);
                let request = Request::Score {
                    id: wire_id,
                    hyp: hyp.to_owned(),
                    reference: reference.to_owned(),
                };
                if let Err(e) = conn.send(&request) {
                    conn.pending.lock().expect("pending lock").remove(&wire_id);
                    log::warn!("bridge: write failed: {e}");
                    waiting.push((id, wire_id, None));
                    continue;
                }
                waiting.push((id, wire_id, Some(rx)));
            }
            let deadline = Instant::now() + self.config.request_timeout;
            for (id, wire_id, rx) in waiting {
                let result = match rx {
                    None => Err(BridgeError::Crashed(id)),
                    Some(rx) => match rx.recv_timeout(deadline.saturating_duration_since(Instant::now())) {
                        Ok(r) => r,
                        Err(RecvTimeoutError::Timeout) => {
                            conn.pending.lock().expect("pending lock").remove(&wire_id);
                            Err(BridgeError::RequestTimeout(id))
                        }
                        Err(RecvTimeoutError::Disconnected) => Err(BridgeError::Crashed(id)),
                    },
                };
                let result = result.map_err(|e| relabel(e, id)).and_then(|v| self.check_range(id, v));
                out.push((id, result));
            }
        }
        out
    }

    fn check_range(&self, id: u64, value: f64) -> Result<f64, BridgeError> {
        if let Some([lo, hi]) = self.bridge_info.score_range {
            if !(lo..=hi).contains(&value) {
                return Err(BridgeError::RangeViolation { id, value, lo, hi });
            }
        }
        Ok(value)
    }
}

/// Rewrites wire ids in an error into the caller's id.
fn relabel(e: BridgeError, id: u64) -> BridgeError {
    match e {
        BridgeError::Crashed(_) => BridgeError::Crashed(id),
        BridgeError::Remote { message, .. } => BridgeError::Remote { id, message },
        other => other,
    }
}

impl Drop for BridgeScorer {
    fn drop(&mut self) {
        if let Some(conn) = self.conn.lock().expect("conn lock").take() {
            conn.shutdown();
        }
    }
}

impl Scorer for BridgeScorer {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        self.score_pairs(&[(hyp, reference)])
            .pop()
            .expect("one result per pair")
    }

    fn score_pairs(&self, pairs: &[(&Text, &Text)]) -> Vec<Result<f64>> {
        let name = &self.bridge_info.name;
        let mut results: Vec<Option<Result<f64>>> = pairs
            .iter()
            .map(|(h, r)| self.cache.get(name, h.raw(), r.raw()).map(Ok))
            .collect();
        // one wire request per distinct uncached pair
        let mut first_index: HashMap<(&str, &str), u64> = HashMap::new();
        let mut requests: Vec<(u64, &str, &str)> = Vec::new();
        for (i, (h, r)) in pairs.iter().enumerate() {
            if results[i].is_none() {
                first_index.entry((h.raw(), r.raw())).or_insert_with(|| {
                    requests.push((i as u64, h.raw(), r.raw()));
                    i as u64
                });
            }
        }
        let mut fresh: HashMap<u64, Result<f64, BridgeError>> = HashMap::new();
        for (id, result) in self.score_batch(&requests) {
            if let Ok(v) = &result {
                let (_, h, r) = requests.iter().find(|q| q.0 == id).expect("known id");
                self.cache.insert(name, h, r, *v);
            }
            fresh.insert(id, result);
        }
        for (i, (h, r)) in pairs.iter().enumerate() {
            if results[i].is_none() {
                let id = first_index[&(h.raw(), r.raw())];
                results[i] = Some(fresh[&id].clone().map_err(Into::into));
            }
        }
        results.into_iter().map(|r| r.expect("filled")).collect()
    }
}
