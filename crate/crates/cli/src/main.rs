//! `fpa`: JSON-in, JSON-out front end for the auction toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 budget
//! exhausted.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::Outcome;

#[derive(Debug, Parser)]
#[command(name = "fpa", version, about = "Equilibria of first-price auctions with subjective priors")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the library's parallel loops.
    #[arg(long, global = true, env = "FPA_THREADS")]
    threads: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Notion {
    Pbne,
    Mbne,
    Wsne,
    CfpaPbne,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Direction {
    D2c,
    C2d,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CeMethod {
    Lp,
    Dynamics,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKind {
    Nonexist,
    Circuit,
    Purecircuit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PadMode {
    Small,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    AppendixC,
    AppendixD,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an instance and report its structure.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Interim utilities against a profile.
    Utility {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        bidder: Option<usize>,
        /// Value as "p/q"; needs --bidder.
        #[arg(long)]
        value: Option<String>,
        /// Bid as "p/q"; needs --value.
        #[arg(long)]
        bid: Option<String>,
        /// Also enumerate opponent outcomes and compare.
        #[arg(long)]
        brute: bool,
    },
    /// Check an equilibrium notion.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum)]
        notion: Notion,
        #[arg(long)]
        eps: String,
        /// Also require a monotone profile.
        #[arg(long)]
        monotone: bool,
    },
    /// Move between discrete and continuous value spaces.
    Transform {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        dir: Direction,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        out_instance: Option<PathBuf>,
        #[arg(long)]
        map_out: Option<PathBuf>,
        /// Profile on the transformed instance to carry back to the input one.
        #[arg(long)]
        lift_profile: Option<PathBuf>,
    },
    /// Coarsen the bid space to at most one bid per 1/M window.
    Shrink {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        out_instance: Option<PathBuf>,
        /// Mixed profile on the shrunk instance to embed and check on the original.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Symmetric monotone eps-MBNE of an iid instance.
    SolveSymmetric {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 100_000)]
        iters: u64,
        /// Solve on the full bid space.
        #[arg(long)]
        no_shrink: bool,
    },
    /// Correlated equilibrium of the type-agent game.
    SolveCe {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "lp")]
        method: CeMethod,
        /// Target regret for the dynamics.
        #[arg(long, default_value = "1/20")]
        eps: String,
        #[arg(long, default_value_t = 20_000)]
        rounds: u64,
    },
    /// Generate a hard or gadget instance.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 12)]
        m: u64,
        /// Netlist file; a small built-in circuit when absent.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "small")]
        mode: PadMode,
        /// Target eps of the exact padding mode.
        #[arg(long, default_value = "1/40")]
        eps: String,
        #[arg(long)]
        out_instance: Option<PathBuf>,
    },
    /// Exhaustive search for an eps-PBNE.
    BrutePure {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Recompute the gadget lemma tables.
    CheckGadgets {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Netlist to check end to end in addition to the fixed tables.
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// Exact-mode eps for the validity check.
        #[arg(long)]
        eps: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let doc = report::usage_error(&e.to_string());
            println!("{}", serde_json::to_string_pretty(&doc).expect("reports serialize"));
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cli.threads {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let name = commands::name(&cli.command);
    let (doc, code) = match commands::run(&cli.command, cli.seed) {
        Ok(Outcome { body, passed }) => (report::finish(name, cli.seed, body, passed), if passed { 0 } else { 1 }),
        Err(e) => (report::error(name, cli.seed, &e), e.code()),
    };
    let text = serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n";
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}

