use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alcsat::engine::{decide_with, EngineError, SearchConfig, Strategy, Trace, TraceVerdict};
use alcsat::harness::{run_differential, GenConfig};
use alcsat::oracle::oracle_sat;
use alcsat::tableau::{extract_tableau, tableau_to_interpretation};
use alcsat::{parse_concept, parse_concept_file, to_cnf, Concept};
use clap::{Parser, Subcommand, ValueEnum};

const SAT: u8 = 0;
const UNSAT: u8 = 1;
const INPUT_ERROR: u8 = 2;
const ORACLE_DISAGREES: u8 = 3;
const RESOURCE_LIMIT: u8 = 4;
const FUZZ_DISAGREES: u8 = 5;

#[derive(Parser)]
#[command(name = "alcsat", version, about = "Decide satisfiability of ALC concepts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Basic,
    Plus,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Basic => Strategy::Basic,
            StrategyArg::Plus => Strategy::Plus,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide a concept given inline or as a file path
    Check {
        input: String,
        #[arg(long, value_enum, default_value = "plus")]
        strategy: StrategyArg,
        /// Also branch on universals inside non-unit clauses (basic only)
        #[arg(long)]
        a2_anywhere: bool,
        /// Write the derivation tree to a .json or .dot file
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
        /// Print a model as JSON when satisfiable
        #[arg(long)]
        model: bool,
        /// Cross-check the verdict with the reference tableau
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
    },
    /// Print the clause-set normal form as JSON
    Cnf {
        input: String,
        /// Print the normal form as text instead
        #[arg(long)]
        text: bool,
    },
    /// Compare both rule systems with the reference tableau on random concepts
    Fuzz {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 4)]
        names: usize,
        #[arg(long, default_value_t = 2)]
        roles: usize,
        /// Include the per-trial log in the report
        #[arg(long)]
        log: bool,
    },
    /// Verify a JSON trace by re-deriving every node
    TraceReplay { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { input, strategy, a2_anywhere, trace, model, oracle, max_nodes } => {
            let cfg = SearchConfig { a2_anywhere, max_nodes, ..SearchConfig::new(strategy.into()) };
            check(&input, cfg, trace.as_deref(), model, oracle)
        }
        Command::Cnf { input, text } => cnf(&input, text),
        Command::Fuzz { trials, seed, max_depth, names, roles, log } => {
            let cfg = GenConfig { max_depth, num_names: names, num_roles: roles, seed, ..GenConfig::default() };
            fuzz(&cfg, trials, log)
        }
        Command::TraceReplay { path } => replay(&path),
    };
    ExitCode::from(code)
}

fn fail(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    INPUT_ERROR
}

/// An existing file is read as a concept file; anything else is parsed as
/// a concept.
fn read_concept(input: &str) -> Result<Concept, u8> {
    let path = Path::new(input);
    let parsed = if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| fail(format!("{input}: {e}")))?;
        parse_concept_file(&text).map_err(|e| (e, text))
    } else {
        parse_concept(input).map_err(|e| (e, input.to_string()))
    };
    parsed.map_err(|(e, text)| {
        eprintln!("error: {e}");
        if let Some(line) = caret_line(&text, e.offset) {
            eprintln!("{line}");
        }
        INPUT_ERROR
    })
}

/// The offending source line with a caret under the error offset.
fn caret_line(text: &str, offset: usize) -> Option<String> {
    let at = offset.saturating_sub(1).min(text.len());
    let start = text[..at].rfind('\n').map_or(0, |i| i + 1);
    let end = text[at..].find('\n').map_or(text.len(), |i| at + i);
    let line = &text[start..end];
    let col = text[start..at].chars().count();
    Some(format!("  {line}\n  {}^", " ".repeat(col)))
}

enum TraceFormat {
    Json,
    Dot,
}

fn check(input: &str, cfg: SearchConfig, trace: Option<&Path>, model: bool, oracle: bool) -> u8 {
    let format = match trace.map(|p| p.extension().and_then(|e| e.to_str())) {
        None => None,
        Some(Some("json")) => Some(TraceFormat::Json),
        Some(Some("dot")) => Some(TraceFormat::Dot),
        Some(_) => return fail("trace path must end in .json or .dot"),
    };
    let concept = match read_concept(input) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let f = to_cnf(&concept);
    let (verdict, doc) = match decide_with(&f, &cfg) {
        Ok(v) => {
            let doc = Trace::from_verdict(&v, &cfg);
            (v, doc)
        }
        Err(EngineError::ResourceLimit { limit, partial, .. }) => {
            if let (Some(path), Some(format)) = (trace, &format) {
                let doc = Trace::from_tree(&partial, &cfg, TraceVerdict::Unknown);
                if let Err(code) = write_trace(path, format, &doc) {
                    return code;
                }
            }
            eprintln!("error: node limit of {limit} reached");
            return RESOURCE_LIMIT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return INPUT_ERROR;
        }
    };
    if let (Some(path), Some(format)) = (trace, &format) {
        if let Err(code) = write_trace(path, format, &doc) {
            return code;
        }
    }
    println!("{}", if verdict.satisfiable { "SAT" } else { "UNSAT" });
    if model && verdict.satisfiable {
        match extract_tableau(&verdict) {
            Ok(t) => println!("{}", serde_json::to_string(&tableau_to_interpretation(&t)).expect("model serializes")),
            Err(e) => eprintln!("error: {e}"),
        }
    }
    if oracle {
        let expected = oracle_sat(&concept);
        if expected != verdict.satisfiable {
            eprintln!("error: reference tableau says {}", if expected { "SAT" } else { "UNSAT" });
            return ORACLE_DISAGREES;
        }
    }
    if verdict.satisfiable {
        SAT
    } else {
        UNSAT
    }
}

fn write_trace(path: &Path, format: &TraceFormat, doc: &Trace) -> Result<(), u8> {
    let body = match format {
        TraceFormat::Json => doc.to_json(),
        TraceFormat::Dot => doc.to_dot(),
    };
    fs::write(path, body).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn cnf(input: &str, text: bool) -> u8 {
    match read_concept(input) {
        Ok(c) => {
            let f = to_cnf(&c);
            if text {
                println!("{f}");
            } else {
                println!("{}", serde_json::to_string(&f).expect("clause set serializes"));
            }
            SAT
        }
        Err(code) => code,
    }
}

fn fuzz(cfg: &GenConfig, trials: u64, log: bool) -> u8 {
    if let Err(e) = cfg.validate() {
        return fail(e);
    }
    let mut report = run_differential(cfg, trials);
    if !log {
        report.log.clear();
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.disagreements.is_empty() {
        SAT
    } else {
        FUZZ_DISAGREES
    }
}

fn replay(path: &Path) -> u8 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    let doc = match Trace::from_json(&text) {
        Ok(d) => d,
        Err(e) => return fail(format!("malformed trace: {e}")),
    };
    match doc.replay() {
        Ok(sat) => {
            println!("{}", if sat { "SAT" } else { "UNSAT" });
            println!("trace verified: {} nodes, {} edges", doc.nodes.len(), doc.edges.len());
            if sat {
                SAT
            } else {
                UNSAT
            }
        }
        Err(e) => fail(format!("inconsistent trace: {e}")),
    }
}
