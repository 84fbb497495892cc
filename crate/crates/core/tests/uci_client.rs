use std::path::PathBuf;
use std::time::{Duration, Instant};

use pieceshap::attribution::Explainer;
use pieceshap::engine::{
    EngineError, EngineRegistry, EngineScore, EvalLimit, EvaluationOutcome, Evaluator, Limits, MaterialEvaluator,
    UciConfig, UciPool, UciSession,
};
use pieceshap::position::{build_subset_position, parse_fen, SubsetId};

const ROOKS_VS_QUEEN: &str = "8/2k5/2q5/8/4R3/4RK2/8/8 w - - 0 1";
const FIG1_BLACK: &str = "8/2k5/2q5/8/4R3/4RK2/8/8 b - - 0 1";
const DEPTH: EvalLimit = EvalLimit::Depth(1);

fn fake() -> UciConfig {
    let mut c = UciConfig::new(env!("CARGO_BIN_EXE_fake-uci"));
    c.handshake_timeout = Duration::from_secs(5);
    c.grace = Duration::from_millis(300);
    c.search_timeout = Duration::from_secs(5);
    c
}

fn fake_with(args: &[&str]) -> UciConfig {
    let mut c = fake();
    c.args = args.iter().map(|s| s.to_string()).collect();
    c
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn replay(name: &str, fen: &str) -> Result<EngineScore, EngineError> {
    let mut s = UciSession::spawn(&fake_with(&["--replay", &fixture(name)]))?;
    s.evaluate(&parse_fen(fen).unwrap(), DEPTH)
}

#[test]
fn handshake_reads_engine_name() {
    let s = UciSession::spawn(&fake()).unwrap();
    assert_eq!(s.name(), Some("fake-uci"));
    s.shutdown();
}

#[test]
fn missing_executable_is_spawn_failure() {
    let err = UciSession::spawn(&UciConfig::new("/nonexistent/engine")).err().unwrap();
    assert!(matches!(err, EngineError::SpawnFailed { ref path, .. } if path == "/nonexistent/engine"), "{err}");
}

#[test]
fn silent_engine_times_out_in_handshake() {
    let mut c = fake_with(&["--no-uciok"]);
    c.handshake_timeout = Duration::from_millis(300);
    let t = Instant::now();
    let err = UciSession::spawn(&c).err().unwrap();
    assert!(matches!(err, EngineError::HandshakeTimeout), "{err}");
    assert!(t.elapsed() < Duration::from_secs(3));
}

#[test]
fn commands_sent_match_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("commands.txt");
    let mut c = fake_with(&["--log", log.to_str().unwrap()]);
    c.options.insert("Threads".into(), "1".into());
    c.options.insert("Hash".into(), "16".into());
    let mut s = UciSession::spawn(&c).unwrap();
    s.evaluate(&parse_fen(ROOKS_VS_QUEEN).unwrap(), EvalLimit::Depth(3)).unwrap();
    s.evaluate(&parse_fen(FIG1_BLACK).unwrap(), EvalLimit::MoveTimeMillis(50)).unwrap();
    s.shutdown();
    let sent = std::fs::read(&log).unwrap();
    let expected = std::fs::read(fixture("session_commands.txt")).unwrap();
    assert_eq!(String::from_utf8(sent).unwrap(), String::from_utf8(expected).unwrap());
}

#[test]
fn stockfish_output_last_exact_score() {
    assert_eq!(replay("sf_white_cp.txt", ROOKS_VS_QUEEN).unwrap(), EngineScore::Centipawns(26));
}

#[test]
fn black_to_move_scores_are_negated() {
    // the engine reports -388 for Black, i.e. +388 for White
    assert_eq!(replay("sf_black_cp.txt", FIG1_BLACK).unwrap(), EngineScore::Centipawns(388));
    assert_eq!(replay("sf_black_mate.txt", FIG1_BLACK).unwrap(), EngineScore::MateIn(-3));
    // the same mate line with White to move stays positive
    assert_eq!(replay("sf_black_mate.txt", ROOKS_VS_QUEEN).unwrap(), EngineScore::MateIn(3));
}

#[test]
fn mated_side_to_move() {
    assert_eq!(replay("sf_mated.txt", ROOKS_VS_QUEEN).unwrap(), EngineScore::MateIn(-1));
    assert_eq!(replay("sf_mated.txt", FIG1_BLACK).unwrap(), EngineScore::MateIn(1));
}

#[test]
fn secondary_lines_are_ignored() {
    assert_eq!(replay("sf_multipv.txt", ROOKS_VS_QUEEN).unwrap(), EngineScore::Centipawns(55));
}

#[test]
fn malformed_replies_are_protocol_errors() {
    for name in ["bad_score.txt", "bad_no_score.txt", "bad_score_kind.txt", "bad_bestmove.txt"] {
        for fen in [ROOKS_VS_QUEEN, FIG1_BLACK] {
            let err = replay(name, fen).unwrap_err();
            assert!(matches!(err, EngineError::ProtocolError(_)), "{name}: {err}");
        }
    }
    let mut s = UciSession::spawn(&fake_with(&["--garbage"])).unwrap();
    assert!(matches!(s.evaluate(&parse_fen(ROOKS_VS_QUEEN).unwrap(), DEPTH), Err(EngineError::ProtocolError(_))));
}

#[test]
fn pool_propagates_protocol_errors() {
    let pool = UciPool::new("garbage", fake_with(&["--garbage"]), 1).unwrap();
    let r = pool.evaluate(&parse_fen(ROOKS_VS_QUEEN).unwrap(), DEPTH);
    assert!(matches!(r, Err(EngineError::ProtocolError(_))), "{r:?}");
}

#[test]
fn material_scores_relative_to_white() {
    let mut s = UciSession::spawn(&fake()).unwrap();
    // two rooks against a queen: +100 for White whoever is on move
    assert_eq!(s.evaluate(&parse_fen(ROOKS_VS_QUEEN).unwrap(), DEPTH).unwrap(), EngineScore::Centipawns(100));
    assert_eq!(s.evaluate(&parse_fen(FIG1_BLACK).unwrap(), DEPTH).unwrap(), EngineScore::Centipawns(100));
}

#[test]
fn crashing_engine_is_rejected_after_one_restart() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.txt");
    let pool = UciPool::new("crash", fake_with(&["--crash-on-go", "--log", log.to_str().unwrap()]), 1).unwrap();
    let r = pool.evaluate(&parse_fen(ROOKS_VS_QUEEN).unwrap(), DEPTH).unwrap();
    assert!(matches!(r, EvaluationOutcome::Rejected(_)), "{r:?}");
    // initial process plus one restart, each handshaking once
    let text = std::fs::read_to_string(&log).unwrap();
    assert_eq!(text.lines().filter(|l| *l == "uci").count(), 2);
    assert_eq!(text.lines().filter(|l| l.starts_with("go")).count(), 2);
}

#[test]
fn stalled_search_is_rejected_and_pool_recovers() {
    let pool = UciPool::new("stall", fake_with(&["--stall-on-illegal"]), 1).unwrap();
    // dropping the knight leaves Black in check with White to move; the
    // engine never answers
    let base = parse_fen("4k3/4n3/8/8/8/8/8/4RK2 w - - 0 1").unwrap();
    let exposed = build_subset_position(&base, SubsetId::new(0b01, 2));
    let t = Instant::now();
    let r = pool.evaluate(&exposed, EvalLimit::MoveTimeMillis(10)).unwrap();
    assert!(matches!(r, EvaluationOutcome::Rejected(_)), "{r:?}");
    assert!(t.elapsed() < Duration::from_secs(5));
    let ok = pool.evaluate(&parse_fen(ROOKS_VS_QUEEN).unwrap(), EvalLimit::MoveTimeMillis(10)).unwrap();
    assert_eq!(ok, EvaluationOutcome::Scored(EngineScore::Centipawns(100)));
}

#[test]
fn pool_matches_single_process_and_material() {
    let position = parse_fen("r3k3/pp3p2/2n1b3/8/8/2N1B3/PP3P2/R3K3 w Q - 0 1").unwrap();
    let limits = Limits { root: DEPTH, perturbation: DEPTH };
    let single = UciPool::new("fake", fake(), 1).unwrap();
    let pool = UciPool::new("fake", fake(), 4).unwrap();
    assert_eq!(pool.size(), 4);
    let a = Explainer::new(&single).limits(limits).explain(&position).unwrap();
    let b = Explainer::new(&pool).limits(limits).explain(&position).unwrap();
    assert_eq!(a, b);
    let material = MaterialEvaluator::new("fake", Default::default());
    let m = Explainer::new(&material).limits(limits).explain(&position).unwrap();
    assert_eq!(a, m);
}

#[test]
fn registry_builds_uci_pools() {
    let text = format!(
        r#"
[[engines]]
id = "fake"
kind = "uci"
path = "{}"
pool_size = 2
options = {{ Threads = "1" }}
root_limit = {{ depth = 2 }}
perturb_limit = {{ depth = 1 }}
"#,
        env!("CARGO_BIN_EXE_fake-uci")
    );
    let registry = EngineRegistry::from_toml_str(&text).unwrap();
    let d = registry.get("fake").unwrap();
    assert_eq!(d.limits(), Limits { root: EvalLimit::Depth(2), perturbation: EvalLimit::Depth(1) });
    let engine = d.build().unwrap();
    assert_eq!(engine.id(), "fake");
    let r = engine.evaluate(&parse_fen(ROOKS_VS_QUEEN).unwrap(), DEPTH).unwrap();
    assert_eq!(r, EvaluationOutcome::Scored(EngineScore::Centipawns(100)));
    assert!(registry.get("material").is_some());
}
