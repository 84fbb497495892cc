//! A scripted UCI engine for tests and demos.
//!
//! Scores positions by material from the side to move's point of view.
//! Flags change its behaviour:
//!
//! - `--no-uciok`: never finish the handshake
//! - `--stall-on-illegal`: never answer `go` when the side not on move is in check
//! - `--crash-on-go`: exit as soon as a search is requested
//! - `--garbage`: reply with an unparseable score
//! - `--delay-ms N`: wait before answering `go`
//! - `--log PATH`: append every received command to PATH
//! - `--replay PATH`: answer every `go` with the lines of PATH, verbatim

use std::io::{self, BufRead, Write};
use std::time::Duration;

use pieceshap::engine::MaterialEvaluator;
use pieceshap::position::{legality_status, parse_fen, Color, LegalityStatus, PositionState};

#[derive(Default)]
struct Flags {
    no_uciok: bool,
    stall_on_illegal: bool,
    crash_on_go: bool,
    garbage: bool,
    delay_ms: u64,
    log: Option<String>,
    replay: Option<String>,
}

fn main() {
    let mut flags = Flags::default();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        match a.as_str() {
            "--no-uciok" => flags.no_uciok = true,
            "--stall-on-illegal" => flags.stall_on_illegal = true,
            "--crash-on-go" => flags.crash_on_go = true,
            "--garbage" => flags.garbage = true,
            "--delay-ms" => flags.delay_ms = args.next().and_then(|v| v.parse().ok()).unwrap_or(0),
            "--log" => flags.log = args.next(),
            "--replay" => flags.replay = args.next(),
            other => {
                eprintln!("fake-uci: unknown flag {other}");
                std::process::exit(2);
            }
        }
    }

    let replay = flags.replay.as_ref().map(|p| std::fs::read_to_string(p).expect("replay file"));
    let material = MaterialEvaluator::default();
    let mut position: Option<PositionState> = None;
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let mut log =
        flags.log.as_ref().map(|p| std::fs::OpenOptions::new().create(true).append(true).open(p).expect("log file"));

    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let line = line.trim();
        if let Some(f) = log.as_mut() {
            let _ = writeln!(f, "{line}");
        }
        let reply = |out: &mut io::StdoutLock, s: &str| {
            let _ = writeln!(out, "{s}");
            let _ = out.flush();
        };
        if line == "uci" {
            reply(&mut out, "id name fake-uci");
            reply(&mut out, "id author pieceshap");
            if !flags.no_uciok {
                reply(&mut out, "uciok");
            }
        } else if line == "isready" {
            reply(&mut out, "readyok");
        } else if line == "quit" {
            break;
        } else if let Some(fen) = line.strip_prefix("position fen ") {
            position = parse_fen(fen.split(" moves").next().unwrap_or(fen)).ok();
        } else if line.starts_with("go") {
            if flags.crash_on_go {
                std::process::exit(1);
            }
            let Some(pos) = position.as_ref() else {
                reply(&mut out, "bestmove (none)");
                continue;
            };
            if flags.stall_on_illegal && legality_status(pos) != LegalityStatus::Legal {
                continue;
            }
            if flags.delay_ms > 0 {
                std::thread::sleep(Duration::from_millis(flags.delay_ms));
            }
            if let Some(text) = replay.as_ref() {
                let _ = out.write_all(text.as_bytes());
                let _ = out.flush();
                continue;
            }
            if flags.garbage {
                reply(&mut out, "info depth 1 score cp ??");
                reply(&mut out, "bestmove 0000");
                continue;
            }
            let white = material.balance(pos);
            let relative = match pos.side_to_move() {
                Color::White => white,
                Color::Black => -white,
            };
            reply(&mut out, &format!("info depth 1 seldepth 1 multipv 1 score cp {relative} nodes 1 pv 0000"));
            reply(&mut out, "bestmove 0000");
        }
        // setoption, ucinewgame and anything else need no answer
    }
}
