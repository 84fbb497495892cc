//! UCI client: one child process per [`UciSession`], several sessions behind
//! a [`UciPool`].

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::{Receiver, RecvTimeoutError, Sender};

use super::{EngineError, EngineScore, EvalLimit, EvaluationOutcome, Evaluator};
use crate::position::{to_fen, PositionState};

#[derive(Debug, Clone)]
pub struct UciConfig {
    pub path: PathBuf,
    pub args: Vec<String>,
    /// Sent as `setoption name <key> value <value>` after the handshake.
    pub options: BTreeMap<String, String>,
    pub handshake_timeout: Duration,
    /// Added to a `movetime` limit before the search counts as stalled.
    pub grace: Duration,
    /// Deadline for `depth` and `nodes` searches, which have no time bound.
    pub search_timeout: Duration,
    /// Send `ucinewgame` before every position so results do not depend on
    /// what the hash table saw earlier.
    pub new_game_per_position: bool,
}

impl UciConfig {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        UciConfig {
            path: path.into(),
            args: Vec::new(),
            options: BTreeMap::new(),
            handshake_timeout: Duration::from_secs(10),
            grace: Duration::from_secs(2),
            search_timeout: Duration::from_secs(120),
            new_game_per_position: true,
        }
    }
}

/// The outcome of one `go` command, score relative to the side on move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub score: EngineScore,
    pub depth: Option<u32>,
    pub bestmove: String,
}

struct InfoScore {
    score: EngineScore,
    depth: Option<u32>,
    bound: bool,
}

fn protocol(line: &str, what: &str) -> EngineError {
    EngineError::ProtocolError(format!("{what} in {line:?}"))
}

/// Parses one `info` line. `Ok(None)` when it carries no usable score.
fn parse_info(line: &str) -> Result<Option<InfoScore>, EngineError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.first() != Some(&"info") {
        return Ok(None);
    }
    let mut depth = None;
    let mut score = None;
    let mut bound = false;
    let mut multipv = 1;
    let mut i = 1;
    while i < tokens.len() {
        match tokens[i] {
            // free text runs to the end of the line
            "string" => break,
            // the PV is last on the line
            "pv" => break,
            "depth" => {
                let d = tokens.get(i + 1).ok_or_else(|| protocol(line, "missing depth"))?;
                depth = Some(d.parse().map_err(|_| protocol(line, "bad depth"))?);
                i += 2;
            }
            "multipv" => {
                let k = tokens.get(i + 1).ok_or_else(|| protocol(line, "missing multipv"))?;
                multipv = k.parse::<u32>().map_err(|_| protocol(line, "bad multipv"))?;
                i += 2;
            }
            "score" => {
                let kind = tokens.get(i + 1).copied();
                let value = tokens.get(i + 2).ok_or_else(|| protocol(line, "truncated score"))?;
                let value: i32 = value.parse().map_err(|_| protocol(line, "non-numeric score"))?;
                score = Some(match kind {
                    Some("cp") => EngineScore::Centipawns(value),
                    // mate 0: the side on move is already mated
                    Some("mate") if value == 0 => EngineScore::MateIn(-1),
                    Some("mate") => EngineScore::MateIn(value),
                    _ => return Err(protocol(line, "unknown score kind")),
                });
                i += 3;
                if let Some(&b) = tokens.get(i) {
                    if b == "lowerbound" || b == "upperbound" {
                        bound = true;
                        i += 1;
                    }
                }
            }
            _ => i += 1,
        }
    }
    Ok(match score {
        Some(score) if multipv == 1 => Some(InfoScore { score, depth, bound }),
        _ => None,
    })
}

/// Extracts the final score and best move from the lines an engine printed
/// after `go`. The last exact score wins; a bounded score is used only when
/// no exact one was reported. Lines after `bestmove` are ignored.
pub fn parse_search_output<S: AsRef<str>>(lines: &[S]) -> Result<SearchReport, EngineError> {
    let mut exact: Option<InfoScore> = None;
    let mut bounded: Option<InfoScore> = None;
    for line in lines {
        let line = line.as_ref().trim();
        if let Some(rest) = line.strip_prefix("bestmove") {
            if !(rest.is_empty() || rest.starts_with(' ')) {
                return Err(protocol(line, "unknown command"));
            }
            let bestmove =
                rest.split_whitespace().next().ok_or_else(|| protocol(line, "bestmove without a move"))?.to_string();
            let info = exact.or(bounded).ok_or_else(|| protocol(line, "no score before bestmove"))?;
            return Ok(SearchReport { score: info.score, depth: info.depth, bestmove });
        }
        if let Some(info) = parse_info(line)? {
            if info.bound {
                bounded = Some(info);
            } else {
                exact = Some(info);
            }
        }
    }
    Err(EngineError::ProtocolError("search output ended without bestmove".into()))
}

/// One running engine process.
pub struct UciSession {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    name: Option<String>,
    new_game_per_position: bool,
    grace: Duration,
    search_timeout: Duration,
}

impl UciSession {
    /// Starts the engine and completes the `uci` / `isready` handshake,
    /// applying the configured options in between.
    pub fn spawn(config: &UciConfig) -> Result<UciSession, EngineError> {
        let spawn_failed =
            |reason: String| EngineError::SpawnFailed { path: config.path.display().to_string(), reason };
        let mut child = Command::new(&config.path)
            .args(&config.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| spawn_failed(e.to_string()))?;
        let stdin = child.stdin.take().ok_or_else(|| spawn_failed("no stdin".into()))?;
        let stdout = child.stdout.take().ok_or_else(|| spawn_failed("no stdout".into()))?;

        let (tx, rx) = crossbeam_channel::unbounded();
        thread::Builder::new()
            .name("uci-reader".into())
            .spawn(move || {
                for line in BufReader::new(stdout).lines() {
                    let Ok(line) = line else { break };
                    if tx.send(line).is_err() {
                        break;
                    }
                }
            })
            .map_err(|e| spawn_failed(e.to_string()))?;

        let mut session = UciSession {
            child,
            stdin,
            lines: rx,
            name: None,
            new_game_per_position: config.new_game_per_position,
            grace: config.grace,
            search_timeout: config.search_timeout,
        };

        let deadline = Instant::now() + config.handshake_timeout;
        let handshake_err = |e: EngineError| match e {
            EngineError::Timeout => EngineError::HandshakeTimeout,
            other => other,
        };
        session.send("uci")?;
        let banner = session.read_until(deadline, |l| l == "uciok").map_err(handshake_err)?;
        session.name = banner.iter().find_map(|l| l.strip_prefix("id name ").map(str::to_string));
        for (name, value) in &config.options {
            session.send(&format!("setoption name {name} value {value}"))?;
        }
        session.send("isready")?;
        session.read_until(deadline, |l| l == "readyok").map_err(handshake_err)?;
        Ok(session)
    }

    /// The name announced by `id name`, if any.
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    fn send(&mut self, command: &str) -> Result<(), EngineError> {
        writeln!(self.stdin, "{command}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| EngineError::EngineCrashed(format!("write failed: {e}")))
    }

    /// Collects lines up to and including the first one matching `done`.
    fn read_until(&mut self, deadline: Instant, done: impl Fn(&str) -> bool) -> Result<Vec<String>, EngineError> {
        let mut out = Vec::new();
        loop {
            match self.lines.recv_deadline(deadline) {
                Ok(line) => {
                    let finished = done(line.trim());
                    out.push(line);
                    if finished {
                        return Ok(out);
                    }
                }
                Err(RecvTimeoutError::Timeout) => return Err(EngineError::Timeout),
                Err(RecvTimeoutError::Disconnected) => {
                    let status = self.child.try_wait().ok().flatten();
                    return Err(EngineError::EngineCrashed(match status {
                        Some(s) => format!("exited with {s}"),
                        None => "closed its output".into(),
                    }));
                }
            }
        }
    }

    /// Runs one search and returns the report, score relative to the mover.
    pub fn search(&mut self, position: &PositionState, limit: EvalLimit) -> Result<SearchReport, EngineError> {
        if self.new_game_per_position {
            self.send("ucinewgame")?;
            self.send("isready")?;
            let deadline = Instant::now() + self.grace + Duration::from_secs(5);
            self.read_until(deadline, |l| l == "readyok")?;
        }
        self.send(&format!("position fen {}", to_fen(position)))?;
        self.send(&limit.uci_go())?;
        let timeout = match limit {
            EvalLimit::MoveTimeMillis(ms) => Duration::from_millis(ms) + self.grace,
            _ => self.search_timeout,
        };
        let lines = self.read_until(Instant::now() + timeout, |l| l.starts_with("bestmove"))?;
        parse_search_output(&lines)
    }

    /// Runs one search and returns the score from White's point of view.
    pub fn evaluate(&mut self, position: &PositionState, limit: EvalLimit) -> Result<EngineScore, EngineError> {
        let report = self.search(position, limit)?;
        Ok(EngineScore::from_side_to_move(report.score, position.side_to_move()))
    }

    /// Sends `quit` and reaps the process, killing it if it lingers.
    pub fn shutdown(self) {
        drop(self)
    }
}

impl Drop for UciSession {
    fn drop(&mut self) {
        let _ = writeln!(self.stdin, "quit").and_then(|_| self.stdin.flush());
        let deadline = Instant::now() + Duration::from_millis(500);
        while Instant::now() < deadline {
            match self.child.try_wait() {
                Ok(Some(_)) => return,
                Ok(None) => thread::sleep(Duration::from_millis(5)),
                Err(_) => break,
            }
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A fixed number of engine processes, one position in flight per process.
///
/// A session that crashes or stalls is discarded and restarted, and the
/// position is tried once more; a second failure yields
/// [`EvaluationOutcome::Rejected`]. Failure to restart is reported as
/// [`EngineError::EngineCrashed`].
pub struct UciPool {
    id: String,
    config: UciConfig,
    size: usize,
    free: Receiver<Option<UciSession>>,
    give_back: Sender<Option<UciSession>>,
}

impl UciPool {
    /// Starts `size` sessions up front so that a bad path or a silent engine
    /// is reported immediately.
    pub fn new(id: impl Into<String>, config: UciConfig, size: usize) -> Result<UciPool, EngineError> {
        let size = size.max(1);
        let (give_back, free) = crossbeam_channel::bounded(size);
        for _ in 0..size {
            let session = UciSession::spawn(&config)?;
            give_back.send(Some(session)).expect("pool channel has capacity");
        }
        Ok(UciPool { id: id.into(), config, size, free, give_back })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn evaluate_in(
        &self,
        slot: &mut Option<UciSession>,
        position: &PositionState,
        limit: EvalLimit,
    ) -> Result<EvaluationOutcome, EngineError> {
        let mut last_failure = None;
        for _ in 0..2 {
            if slot.is_none() {
                let fresh = UciSession::spawn(&self.config)
                    .map_err(|e| EngineError::EngineCrashed(format!("restart failed: {e}")))?;
                *slot = Some(fresh);
            }
            let session = slot.as_mut().expect("slot filled above");
            match session.evaluate(position, limit) {
                Ok(score) => return Ok(EvaluationOutcome::Scored(score)),
                Err(e @ (EngineError::Timeout | EngineError::EngineCrashed(_))) => {
                    *slot = None;
                    last_failure = Some(e);
                }
                Err(e) => {
                    // the session may be mid-search; do not reuse it
                    *slot = None;
                    return Err(e);
                }
            }
        }
        let reason = last_failure.map(|e| e.to_string()).unwrap_or_default();
        Ok(EvaluationOutcome::Rejected(format!("{reason} (after one restart)")))
    }
}

struct Checkout<'a> {
    slot: Option<Option<UciSession>>,
    back: &'a Sender<Option<UciSession>>,
}

impl Drop for Checkout<'_> {
    fn drop(&mut self) {
        if let Some(slot) = self.slot.take() {
            let _ = self.back.send(slot);
        }
    }
}

impl Evaluator for UciPool {
    fn id(&self) -> &str {
        &self.id
    }

    fn evaluate(&self, position: &PositionState, limit: EvalLimit) -> Result<EvaluationOutcome, EngineError> {
        let slot = self.free.recv().expect("pool owns a sender");
        let mut checkout = Checkout { slot: Some(slot), back: &self.give_back };
        let slot = checkout.slot.as_mut().expect("just checked out");
        self.evaluate_in(slot, position, limit)
    }
}
