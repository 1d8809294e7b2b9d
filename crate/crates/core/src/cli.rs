//! `cflcp compute [--suffix] [--format plain|slp|len] [--max-expand BYTES]
//! [--seed U64] [--stats] [--witness] [--oracle HEIGHT] <grammar-file>`
//!
//! Exit codes: 0 success, 1 usage error, 2 grammar error (unreadable file,
//! syntax, empty language), 3 answer exceeds the expansion budget in plain
//! mode (or the oracle's enumeration budget), 4 the oracle disagrees.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::grammar::Grammar;
use crate::oracle::{lcp_bounded, Budget};
use crate::slp::{self, render, Slp};
use crate::solver::{compute_lcp, compute_lcs, SolveReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GRAMMAR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_ORACLE_MISMATCH: i32 = 4;

const DEFAULT_MAX_EXPAND: usize = 1 << 20;

#[derive(Parser, Debug)]
#[command(name = "cflcp", version, about = "Longest common prefix/suffix of a context-free language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the longest common prefix (or suffix) of L(G).
    Compute(ComputeArgs),
}

#[derive(clap::Args, Debug)]
struct ComputeArgs {
    /// Longest common suffix instead of prefix.
    #[arg(long)]
    suffix: bool,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Largest answer printed explicitly in plain format.
    #[arg(long, value_name = "BYTES", default_value_t = DEFAULT_MAX_EXPAND)]
    max_expand: usize,
    /// Seed for the fingerprint bases.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Print sweep counts and per-nonterminal keys.
    #[arg(long)]
    stats: bool,
    /// Print two words of the language attaining the answer.
    #[arg(long)]
    witness: bool,
    /// Cross-check against explicit enumeration up to this derivation height.
    #[arg(long, value_name = "HEIGHT")]
    oracle: Option<usize>,
    grammar: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Slp,
    Len,
}

pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let Command::Compute(args) = cli.command;
    match compute(&args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn compute(args: &ComputeArgs, out: &mut impl Write, err: &mut impl Write) -> std::io::Result<i32> {
    if let Some(seed) = args.seed {
        if let Err(e) = slp::seed_fingerprints(seed) {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    }
    let path = args.grammar.display();
    let text = match std::fs::read_to_string(&args.grammar) {
        Ok(t) => t,
        Err(e) => {
            writeln!(err, "{path}: {e}")?;
            return Ok(EXIT_GRAMMAR);
        }
    };
    let grammar = match Grammar::parse(&text) {
        Ok(g) => g,
        Err(e) => {
            writeln!(err, "{path}:{e}")?;
            return Ok(EXIT_GRAMMAR);
        }
    };
    let solved = if args.suffix {
        compute_lcs(&grammar)
    } else {
        compute_lcp(&grammar)
    };
    let report = match solved {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "{path}: {e}")?;
            return Ok(EXIT_GRAMMAR);
        }
    };

    match args.format {
        Format::Plain => match report.lcp.expand(args.max_expand) {
            Ok(w) => writeln!(out, "{w}")?,
            Err(_) => {
                writeln!(
                    err,
                    "error: the answer has {} letters, more than --max-expand {}; use --format slp or --format len",
                    report.lcp.len(),
                    args.max_expand
                )?;
                return Ok(EXIT_BUDGET);
            }
        },
        Format::Slp => write!(out, "{}", report.lcp.serialize())?,
        Format::Len => writeln!(out, "{}", report.lcp.len())?,
    }

    if args.witness {
        for (i, w) in [&report.witness.0, &report.witness.1].into_iter().enumerate() {
            write_word(out, &format!("witness {}", i + 1), w, args.format, args.max_expand)?;
        }
    }
    if args.stats {
        write_stats(out, &report)?;
    }
    if let Some(height) = args.oracle {
        return oracle_check(args, &grammar, &report, height, out, err);
    }
    Ok(EXIT_OK)
}

fn write_word(out: &mut impl Write, label: &str, w: &Slp, format: Format, budget: usize) -> std::io::Result<()> {
    match format {
        Format::Plain => writeln!(out, "{label}: {}", render(w, budget)),
        Format::Len => writeln!(out, "{label}: {}", w.len()),
        Format::Slp => {
            writeln!(out, "{label}:")?;
            write!(out, "{}", w.serialize())
        }
    }
}

fn write_stats(out: &mut impl Write, report: &SolveReport) -> std::io::Result<()> {
    let state = if report.converged { "converged" } else { "cap reached" };
    writeln!(out, "sweeps: {} (cap {}, {state})", report.sweeps_used, report.sweep_cap())?;
    writeln!(out, "nonterminals: {}", report.nonterminal_count)?;
    writeln!(out, "seed: {}", slp::fingerprint_seed())?;
    for (name, key) in &report.keys {
        let (recomputed, updated) = report
            .stats_for(name)
            .map_or((0, 0), |s| (s.recomputed, s.updated));
        writeln!(
            out,
            "key {name}: {} recomputed={recomputed} updated={updated}",
            key.render(64)
        )?;
    }
    Ok(())
}

fn oracle_check(
    args: &ComputeArgs,
    grammar: &Grammar,
    report: &SolveReport,
    height: usize,
    out: &mut impl Write,
    err: &mut impl Write,
) -> std::io::Result<i32> {
    let target = if args.suffix { grammar.reverse() } else { grammar.clone() };
    let target = report.normalized.clone().unwrap_or(target);
    let expected = match lcp_bounded(&target, height.max(1), Budget::default()) {
        Ok(w) if args.suffix => w.chars().rev().collect::<String>(),
        Ok(w) => w,
        Err(e) => {
            writeln!(err, "oracle: {e}")?;
            return Ok(EXIT_BUDGET);
        }
    };
    let agrees = report
        .lcp
        .expand(expected.chars().count())
        .map_or(false, |w| w == expected);
    if agrees {
        writeln!(out, "oracle: {expected} (agrees)")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "oracle: {expected} (DISAGREES)")?;
        writeln!(err, "oracle disagrees with the computed answer at height {height}")?;
        Ok(EXIT_ORACLE_MISMATCH)
    }
}
