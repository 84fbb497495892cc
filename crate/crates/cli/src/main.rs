//! `pieceshap` command-line tool.
//!
//! Exit codes:
//!
//! | code | meaning                                                        |
//! |------|----------------------------------------------------------------|
//! | 0    | success                                                        |
//! | 1    | reading an input or writing the output failed                  |
//! | 2    | usage error: bad flags, unknown engine, bad config or document |
//! | 3    | the engine failed to start or answered garbage                 |
//! | 4    | the FEN is malformed or describes an illegal position          |

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pieceshap::attribution::{AttributionError, Explainer, Explanation, SamplingConfig};
use pieceshap::engine::{EngineRegistry, EvalLimit, EvaluatorDescriptor};
use pieceshap::position::{parse_fen, PositionState};
use pieceshap::render::{
    delta_table, from_json, to_json, to_svg_board, to_waterfall_svg, to_waterfall_text, ColorScale, ComparisonDocument,
};
use pieceshap_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "pieceshap", version, about = "Explain chess engine evaluations piece by piece")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attribute one engine's evaluation of a position to its pieces.
    Explain {
        #[command(flatten)]
        run: RunArgs,
        /// Registry id (e.g. `material`) or path to a UCI engine executable.
        #[arg(long)]
        engine: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Explain a position with two engines and rank pieces by disagreement.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        engine_a: String,
        #[arg(long)]
        engine_b: String,
        #[arg(long, value_enum, default_value_t = CompareFormat::Json)]
        format: CompareFormat,
    },
    /// Re-render a saved explanation document.
    Render {
        /// Explanation JSON written by `explain --format json`; `-` for stdin.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    fen: String,
    /// Root search time in ms [default: 5000, or the registry entry's limit]
    #[arg(long)]
    root_ms: Option<u64>,
    /// Search time per perturbed position in ms [default: 100, or the registry entry's limit]
    #[arg(long)]
    perturb_ms: Option<u64>,
    /// Distinct positions a sampled explanation may evaluate.
    #[arg(long, default_value_t = 10_000)]
    max_evals: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest piece count explained exactly instead of by sampling.
    #[arg(long, default_value_t = 14)]
    exact_threshold: usize,
    /// Engine registry (TOML) to look engine ids up in.
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Explanation document
    Json,
    /// Waterfall as a plain-text table
    Text,
    /// Board heatmap
    Svg,
    /// Waterfall chart as SVG
    Waterfall,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareFormat {
    /// Both documents and the delta list
    Json,
    /// Delta table followed by both waterfalls
    Text,
}

enum Failure {
    Io(String),
    Usage(String),
    Engine(String),
    Position(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Engine(_) => 3,
            Failure::Position(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::Engine(m) | Failure::Position(m) => m,
        }
    }
}

impl From<AttributionError> for Failure {
    fn from(e: AttributionError) -> Self {
        match e {
            AttributionError::Engine(_) => Failure::Engine(e.to_string()),
            AttributionError::TooManyPieces { .. } | AttributionError::PositionMismatch => {
                Failure::Position(e.to_string())
            }
            AttributionError::BudgetTooSmall { .. } => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pieceshap: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Explain { run, engine, format } => {
            let position = parse_position(&run.fen)?;
            let e = explain(&run, &position, &engine)?;
            write_output(run.out.as_deref(), &render(&e, format))
        }
        Command::Compare { run, engine_a, engine_b, format } => {
            let position = parse_position(&run.fen)?;
            let a = explain(&run, &position, &engine_a)?;
            let b = explain(&run, &position, &engine_b)?;
            let doc = ComparisonDocument::new(&a, &b)?;
            let text = match format {
                CompareFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&doc).expect("comparison documents always serialize");
                    s.push('\n');
                    s
                }
                CompareFormat::Text => format!(
                    "{}\n{}:\n{}\n{}:\n{}",
                    delta_table(&doc.deltas, &a.evaluator_id, &b.evaluator_id),
                    a.evaluator_id,
                    to_waterfall_text(&a),
                    b.evaluator_id,
                    to_waterfall_text(&b)
                ),
            };
            write_output(run.out.as_deref(), &text)
        }
        Command::Render { input, format, out } => {
            let text = if input == Path::new("-") {
                std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Io(format!("stdin: {e}")))?
            } else {
                std::fs::read_to_string(&input).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?
            };
            let e = from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
            write_output(out.as_deref(), &render(&e, format))
        }
        Command::Serve { config } => {
            let config = ServiceConfig::load(&config).map_err(|e| Failure::Usage(e.to_string()))?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
            runtime.block_on(pieceshap_service::serve(config)).map_err(|e| match e {
                pieceshap_service::ServeError::Config(e) => Failure::Usage(e.to_string()),
                other => Failure::Io(other.to_string()),
            })
        }
    }
}

fn parse_position(fen: &str) -> Result<PositionState, Failure> {
    parse_fen(fen).map_err(|e| Failure::Position(e.to_string()))
}

fn descriptor(run: &RunArgs, engine: &str) -> Result<EvaluatorDescriptor, Failure> {
    let registry = match &run.registry {
        Some(path) => EngineRegistry::load(path).map_err(|e| Failure::Usage(e.to_string()))?,
        None => EngineRegistry::default(),
    };
    let mut d = registry
        .resolve(engine)
        .ok_or_else(|| Failure::Usage(format!("engine {engine:?} is neither a registry id nor an executable file")))?;
    if let Some(ms) = run.root_ms {
        d.root_limit = EvalLimit::MoveTimeMillis(ms);
    }
    if let Some(ms) = run.perturb_ms {
        d.perturb_limit = EvalLimit::MoveTimeMillis(ms);
    }
    if !d.root_limit.is_valid() || !d.perturb_limit.is_valid() {
        return Err(Failure::Usage("time limits must be positive".into()));
    }
    Ok(d)
}

fn explain(run: &RunArgs, position: &PositionState, engine: &str) -> Result<Explanation, Failure> {
    let d = descriptor(run, engine)?;
    let evaluator = d.build().map_err(|e| Failure::Engine(e.to_string()))?;
    let config =
        SamplingConfig { max_evaluations: run.max_evals, seed: run.seed, exact_threshold: run.exact_threshold };
    Ok(Explainer::new(evaluator.as_ref()).limits(d.limits()).config(config).explain(position)?)
}

fn render(e: &Explanation, format: Format) -> String {
    match format {
        Format::Json => to_json(e),
        Format::Text => to_waterfall_text(e),
        Format::Svg => to_svg_board(e, &ColorScale::for_explanation(e)),
        Format::Waterfall => to_waterfall_svg(e),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}
