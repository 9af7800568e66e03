//! `selfsim`: leaf sets, trees, Steiner solves and lemma checks from the
//! command line.
//!
//! Exit status: 0 success, 1 a check failed, 2 usage error (including
//! invalid inputs and the solver's terminal cap), 3 I/O error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use selfsim_steiner::ifs::{generate_leaves_with, MAX_DEPTH};
use selfsim_steiner::lemmas::{branching_gap, render_table, verify_all, VerifyConfig};
use selfsim_steiner::smt::{solve_with, validate_minimizer, SolveOptions};
use selfsim_steiner::tree::build_tree;
use selfsim_steiner::{Exec, IfsParams, TerminalSpec};

/// Deepest tree the `tree` command draws (2^20 - 1 edges).
const MAX_TREE_DEPTH: usize = 20;
/// Deepest leaf set used by `verify`'s brute-force checks.
const MAX_LEAF_CHECK_DEPTH: usize = 16;
const DEFAULT_SEED: u64 = 0x5e1f_5131;

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Self-similar Steiner trees: leaves, trees, exact solves, lemma checks")]
struct Cli {
    /// Contraction ratio, 0 < lambda < 1/2.
    #[arg(long, global = true, default_value_t = 0.04, value_parser = parse_lambda)]
    lambda: f64,

    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the leaf set A_N.
    Leaves {
        #[arg(long, default_value_t = 8, value_parser = depth_parser(1, MAX_DEPTH))]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Write the truncated tree Sigma_N.
    Tree {
        #[arg(long, default_value_t = 6, value_parser = depth_parser(1, MAX_TREE_DEPTH))]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve the Steiner problem for a terminal file
    /// (`{"points": [[x, y], ...], "line": {"normal": [a, b], "offset": c}}`, line optional).
    Solve {
        terminals: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run every lemma check.
    Verify {
        /// Depth of the solver experiments.
        #[arg(long, default_value_t = 3, value_parser = depth_parser(2, 4))]
        depth: usize,
        /// Depth of the brute-force leaf checks.
        #[arg(long, default_value_t = 14, value_parser = depth_parser(2, MAX_LEAF_CHECK_DEPTH))]
        leaf_depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Fail on any failed check, not only on claimed ones.
        #[arg(long)]
        assert: bool,
    },
    /// Sweep the branching gap over a lambda grid (CSV).
    Gap {
        #[arg(long, default_value_t = 0.01, value_parser = parse_lambda)]
        from: f64,
        #[arg(long, default_value_t = 0.1, value_parser = parse_lambda)]
        to: f64,
        #[arg(long, default_value_t = 91, value_parser = clap::value_parser!(u32).range(2..=100_000))]
        points: u32,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
    Table,
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 && v < 0.5 {
        Ok(v)
    } else {
        Err(format!("lambda must lie in (0, 0.5), got {s}"))
    }
}

fn depth_parser(min: usize, max: usize) -> impl Fn(&str) -> Result<usize, String> + Clone + Send + Sync + 'static {
    move |s: &str| {
        let v: usize = s.parse().map_err(|e| format!("{e}"))?;
        if (min..=max).contains(&v) {
            Ok(v)
        } else {
            Err(format!("depth must be between {min} and {max}, got {v}"))
        }
    }
}

enum Failure {
    Usage(String),
    Io(PathBuf, io::Error),
}

impl From<selfsim_steiner::Error> for Failure {
    fn from(e: selfsim_steiner::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Io(p.to_path_buf(), e)),
        None => io::stdout().write_all(bytes).map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e)),
    }
}

fn pretty(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

/// Rejects option combinations clap cannot express, before any work.
fn validate(cli: &Cli) -> Result<(), Failure> {
    let (cmd, format, allowed): (&str, Format, &[Format]) = match &cli.command {
        Command::Leaves { format, .. } => ("leaves", *format, &[Format::Csv, Format::Json]),
        Command::Tree { format, .. } => ("tree", *format, &[Format::Json, Format::Svg]),
        Command::Solve { format, .. } => ("solve", *format, &[Format::Json, Format::Svg]),
        Command::Verify { format, .. } => ("verify", *format, &[Format::Table, Format::Json]),
        Command::Gap { from, to, .. } => {
            if from >= to {
                return Err(Failure::Usage(format!("--from ({from}) must be below --to ({to})")));
            }
            return Ok(());
        }
    };
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{cmd} does not support --format {format:?}").to_lowercase()))
    }
}

fn run(cli: &Cli, exec: Exec) -> Result<bool, Failure> {
    let params = IfsParams::new(cli.lambda)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Leaves { depth, format } => {
            let leaves = generate_leaves_with(&params, *depth, MAX_DEPTH, exec)?;
            let bytes = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    leaves.write_csv(&mut buf).expect("writing to memory");
                    buf
                }
                Format::Json => {
                    let mut s = leaves.to_json().into_bytes();
                    s.push(b'\n');
                    s
                }
                _ => unreachable!("format checked in validate"),
            };
            emit(out, &bytes)?;
        }
        Command::Tree { depth, format } => {
            let tree = build_tree(&params, *depth)?;
            let bytes = match format {
                Format::Json => pretty(&tree.to_json()),
                Format::Svg => tree.to_svg().into_bytes(),
                _ => unreachable!("format checked in validate"),
            };
            emit(out, &bytes)?;
        }
        Command::Solve { terminals, format } => {
            let text = fs::read_to_string(terminals).map_err(|e| Failure::Io(terminals.clone(), e))?;
            let spec = TerminalSpec::from_json(&text)?;
            let opts = SolveOptions { exec, ..SolveOptions::default() };
            // search statistics depend on scheduling, so only the tree is written
            let (tree, _) = solve_with(&spec, &opts)?;
            let report = validate_minimizer(&tree, &spec);
            let bytes = match format {
                Format::Json => pretty(&tree.to_json(Some(&report))),
                Format::Svg => tree.to_svg().into_bytes(),
                _ => unreachable!("format checked in validate"),
            };
            emit(out, &bytes)?;
            return Ok(report.passed);
        }
        Command::Verify { depth, leaf_depth, format, assert } => {
            let cfg = VerifyConfig { params, leaf_depth: *leaf_depth, solver_depth: *depth, seed: cli.seed, exec };
            let reports = verify_all(&cfg);
            let bytes = match format {
                Format::Table => render_table(&reports).into_bytes(),
                Format::Json => pretty(&serde_json::to_value(&reports).expect("serializable")),
                _ => unreachable!("format checked in validate"),
            };
            emit(out, &bytes)?;
            let ok = if *assert { reports.iter().all(|r| r.passed) } else { !reports.iter().any(|r| r.is_violation()) };
            return Ok(ok);
        }
        Command::Gap { from, to, points } => {
            let mut s = String::from("lambda,gap\n");
            for i in 0..*points {
                let l = from + (to - from) * f64::from(i) / f64::from(points - 1);
                let g = branching_gap(&IfsParams::new(l)?, 0.0)?;
                s.push_str(&format!("{l},{g}\n"));
            }
            emit(out, s.as_bytes())?;
        }
    }
    Ok(true)
}

fn exec_for(threads: Option<u16>) -> Result<Exec, String> {
    match threads {
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(usize::from(n)).build_global().map_err(|e| e.to_string())?;
            Ok(Exec::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Exec::Sequential),
        None if cfg!(feature = "parallel") => Ok(Exec::Parallel),
        None => Ok(Exec::Sequential),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(Failure::Usage(msg)) = validate(&cli) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let exec = match exec_for(cli.threads) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, exec) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(3)
        }
    }
}
