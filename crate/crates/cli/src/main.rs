use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use seqspace_cli::{
    cmd_build_family, cmd_collapse, cmd_extend, cmd_limit_lemma, cmd_lineable_demo, cmd_replay, cmd_unorm, parse_basis, render,
    write_atomic, ReportEnvelope, RunConfig, TSource,
};
use seqspace_core::exact::{parse_rational, Rational};
use seqspace_core::norms::{BoundedSeq, KSchedule, PExponent};

#[derive(Parser)]
#[command(name = "seqspace", version, about = "Certified constructions on sequence spaces with finitely many zeros")]
struct Cli {
    /// Exponent p as num/den or inf.
    #[arg(long, global = true, default_value = "1")]
    p: PExponent,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    precision: u32,
    /// Window length L; each command has its own default.
    #[arg(long, global = true)]
    window: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// tailshift, geometric or geometric:<ratio>.
    #[arg(long, global = true, default_value = "tailshift")]
    oracle: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norms of the u_n basis vectors.
    Unorm {
        #[arg(long, default_value_t = 2)]
        n_from: u64,
        #[arg(long, default_value_t = 20)]
        n_to: u64,
    },
    /// Apply the lineability operator to a bounded sequence and audit zeros.
    LineableDemo {
        #[arg(long, default_value_t = 12)]
        n_terms: u64,
        /// JSON bounded sequence; random from --seed when absent.
        #[arg(long)]
        t_file: Option<PathBuf>,
        #[arg(long, default_value_t = 9)]
        num_bound: u64,
        #[arg(long, default_value_t = 9)]
        den_bound: u64,
    },
    /// Search for a certified witness of the vanishing tail limit.
    LimitLemma {
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long, default_value = "j+2")]
        schedule: String,
        #[arg(long, default_value = "1/1000000")]
        epsilon: String,
        #[arg(long, default_value_t = 40)]
        j_max: u64,
        /// JSON bounded sequence; t = 1 when absent.
        #[arg(long)]
        t_file: Option<PathBuf>,
    },
    /// Build a family with disjoint pivots.
    BuildFamily {
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m1: u64,
    },
    /// Extend a finite basis by vectors vanishing on its common zeros.
    Extend {
        /// JSON array of sequences.
        #[arg(long)]
        basis: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Collapse sequence for n = 1..n_max.
    Collapse {
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m11: u64,
    },
    /// Re-verify a trace, collapse report or report envelope.
    Replay { file: PathBuf },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_t(path: &Option<PathBuf>, default: BoundedSeq) -> Result<BoundedSeq> {
    match path {
        Some(p) => serde_json::from_str(&read(p)?).context("t file must be a JSON bounded sequence"),
        None => Ok(default),
    }
}

fn run(cli: Cli) -> Result<ReportEnvelope> {
    let default_window = match cli.command {
        Command::Unorm { .. } | Command::LineableDemo { .. } => 40,
        Command::Extend { .. } => 60,
        _ => 200,
    };
    let cfg = RunConfig {
        p: cli.p,
        precision: cli.precision,
        window: cli.window.unwrap_or(default_window),
        seed: cli.seed,
        oracle: cli.oracle,
    };
    match cli.command {
        Command::Unorm { n_from, n_to } => cmd_unorm(&cfg, n_from, n_to),
        Command::LineableDemo { n_terms, t_file, num_bound, den_bound } => {
            let source = match t_file {
                Some(_) => TSource::Given(read_t(&t_file, BoundedSeq::constant(Rational::from_integer(1.into())))?),
                None => TSource::Random { num_bound, den_bound },
            };
            cmd_lineable_demo(&cfg, &source, n_terms)
        }
        Command::LimitLemma { r, schedule, epsilon, j_max, t_file } => {
            let t = read_t(&t_file, BoundedSeq::constant(Rational::from_integer(1.into())))?;
            let schedule: KSchedule = schedule.parse()?;
            cmd_limit_lemma(&cfg, &t, r, &schedule, &parse_rational(&epsilon)?, j_max)
        }
        Command::BuildFamily { k, m1 } => cmd_build_family(&cfg, k, m1),
        Command::Extend { basis, k } => cmd_extend(&cfg, &parse_basis(&read(&basis)?)?, k),
        Command::Collapse { n_max, k, m11 } => cmd_collapse(&cfg, n_max, k, m11),
        Command::Replay { file } => cmd_replay(&read(&file)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out.clone();
    let env = match run(cli) {
        Ok(env) => env,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let text = render(&env);
    let written = match &out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    eprint!("{}", env.summary());
    ExitCode::from(env.exit_code() as u8)
}
