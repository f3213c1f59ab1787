//! The `hodp` command line.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::framework::{prepare, solve, Context, EtaPolicy, Verdict};
use crate::processors::{graph_approx, strategy_from_names, DEFAULT_STRATEGY, PROCESSOR_NAMES};
use crate::syntax::parse_afsm;

#[derive(Parser, Debug)]
#[command(
    name = "hodp",
    version,
    about = "Termination prover for higher-order rewriting with meta-variables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Try to prove or disprove termination of an AFSM file.
    Prove(ProveArgs),
}

#[derive(clap::Args, Debug, Clone)]
pub struct ProveArgs {
    pub file: PathBuf,
    /// Comma-separated processor names, tried in order.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Option<Vec<String>>,
    /// Seconds before giving up.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = Eta::Auto)]
    pub eta: Eta,
    /// Worker threads for independent subproblems.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Name the result each processor step instantiates.
    #[arg(long)]
    pub explain: bool,
    /// Maximal chain length for the non-termination search.
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Plain,
    Json,
    Dot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eta {
    Auto,
    Force,
    Forbid,
}

impl From<Eta> for EtaPolicy {
    fn from(e: Eta) -> EtaPolicy {
        match e {
            Eta::Auto => EtaPolicy::Auto,
            Eta::Force => EtaPolicy::Force,
            Eta::Forbid => EtaPolicy::Forbid,
        }
    }
}

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_MAYBE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

/// Runs `prove`, writing the report to `out` and diagnostics to `err`.
/// Returns the exit code.
pub fn prove(args: &ProveArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let names: Vec<String> = match &args.strategy {
        Some(s) => s.iter().map(|n| n.trim().to_string()).collect(),
        None => DEFAULT_STRATEGY.iter().map(|s| s.to_string()).collect(),
    };
    let strategy = match strategy_from_names(&names) {
        Ok(s) => s,
        Err(bad) => {
            let _ = writeln!(
                err,
                "error: unknown processor '{bad}' (known: {})",
                PROCESSOR_NAMES.join(", ")
            );
            return EXIT_ERROR;
        }
    };
    let source = match std::fs::read_to_string(&args.file) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", args.file.display());
            return EXIT_ERROR;
        }
    };
    let afsm = match parse_afsm(&source) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(err, "{}:{e}", args.file.display());
            return EXIT_ERROR;
        }
    };
    let started = Instant::now();
    let (summary, prepared) = prepare(&afsm, args.eta.into());
    let (verdict, graph) = match prepared {
        Ok(p) => {
            let ctx = Context {
                ordering: p.ordering.clone(),
                nontermination_allowed: !p.eta_expanded,
                loop_depth: args.depth,
                deadline: Some(started + Duration::from_secs(args.timeout)),
            };
            let v = solve(&p.problem, &strategy, &ctx, args.jobs.max(1));
            let g = graph_approx(&p.problem).to_dot(&p.problem.pairs);
            (v, Some(g))
        }
        Err(e) => (
            Verdict::Maybe {
                reason: e.to_string(),
                trace: None,
            },
            None,
        ),
    };
    let _ = match args.format {
        Format::Plain => {
            let _ = writeln!(out, "{}", verdict.label());
            if let Verdict::Maybe { reason, .. } = &verdict {
                let _ = writeln!(out, "reason: {reason}");
            }
            match verdict.trace() {
                Some(t) => write!(out, "{}", t.render(args.explain)),
                None => Ok(()),
            }
        }
        Format::Json => {
            let mut trace = verdict.trace().cloned();
            if !args.explain {
                if let Some(t) = trace.as_mut() {
                    t.forget_theorems();
                }
            }
            let mut doc = json!({
                "verdict": verdict.label(),
                "trace": trace,
                "input_summary": summary,
            });
            if let Verdict::Maybe { reason, .. } = &verdict {
                doc["reason"] = json!(reason);
            }
            let text = serde_json::to_string_pretty(&doc).expect("serializable");
            writeln!(out, "{text}")
        }
        Format::Dot => {
            let _ = writeln!(out, "{}", verdict.label());
            write!(
                out,
                "{}",
                graph.unwrap_or_else(|| "digraph dependency_graph {\n}\n".to_string())
            )
        }
    };
    match verdict {
        Verdict::Yes(_) => EXIT_YES,
        Verdict::No(_) => EXIT_NO,
        Verdict::Maybe { .. } => EXIT_MAYBE,
    }
}

pub fn run(cli: Cli) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match cli.command {
        Command::Prove(args) => prove(&args, &mut stdout.lock(), &mut stderr.lock()),
    }
}
