//! `blockcube`: check, decompose, generate and verify 3-parameter
//! persistence modules stored as JSON.
//!
//! Exit codes: 0 success, 1 negative answer (not exact, not verified),
//! 2 unreadable or invalid input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockcube::decomposer::decompose_exact;
use blockcube::io::{
    module_to_json, multiset_to_json, read_module, report_from_json, report_to_json,
};
use blockcube::{
    check_strong_exactness, counterexample, perturb, random_block_sum, verify_direct_sum,
    ExactModule, ExactnessMode, Field, Grid, GridModule,
};
use clap::{Parser, Subcommand, ValueEnum};

const UNIT_CELLS_CAVEAT: &str =
    "note: unit-cells mode only checks unit squares and unit cubes; it is a heuristic and is not known to agree with the exhaustive check";

#[derive(Parser, Debug)]
#[command(
    name = "blockcube",
    version,
    about = "Block decomposition of 3-parameter persistence modules"
)]
struct Cli {
    /// Rendering of reports on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Reinterpret or generate the module over GF(p).
    #[arg(long, global = true)]
    prime: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    UnitCells,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    BlockSum,
    Example,
    Perturbed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide strong exactness; exit 0 iff the module is strongly exact.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
    },
    /// Compute block multiplicities. `--output` receives the JSON report.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a module file. Block sums also get a `<name>.truth.json`
    /// sidecar listing the blocks they were built from.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cells per axis, e.g. `3x3x2`.
        #[arg(long, default_value = "3x3x3", value_parser = parse_grid)]
        grid: Grid,
        #[arg(long, default_value_t = 3)]
        max_blocks: usize,
        #[arg(long, default_value_t = 2)]
        max_mult: usize,
        /// Basis-twist the generated block sum.
        #[arg(long)]
        twist: bool,
        /// Base module for `perturbed`; a random block sum if omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check that the blocks of a report form a direct sum of the module.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print the grid, prime, dimensions and validation status.
    Info {
        #[arg(long)]
        input: PathBuf,
    },
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(['x', 'X', ',']).collect();
    if parts.len() != 3 {
        return Err(format!("expected three cell counts like 3x3x2, got {s:?}"));
    }
    let mut cells = [0; 3];
    for (slot, p) in cells.iter_mut().zip(parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| format!("bad cell count {p:?}"))?;
    }
    Grid::new(cells).map_err(|e| e.to_string())
}

/// A failure carrying its exit code.
struct Fail(u8, String);

impl From<blockcube::Error> for Fail {
    fn from(e: blockcube::Error) -> Self {
        Fail(2, e.to_string())
    }
}

type Outcome = Result<u8, Fail>;

fn field(prime: Option<u64>) -> Result<Option<Field>, Fail> {
    prime
        .map(|p| Field::new(p).map_err(|e| Fail(2, format!("--prime: {e}"))))
        .transpose()
}

/// Reads and validates a module, applying a prime override.
fn load(path: &Path, prime: Option<u64>) -> Result<GridModule, Fail> {
    let mut m = read_module(path)?;
    if let Some(f) = field(prime)? {
        m = m.with_field(f);
    }
    let report = m.validate();
    if !report.is_valid() {
        let lines: Vec<String> = report.problems.iter().map(|p| format!("  {p}")).collect();
        return Err(Fail(
            2,
            format!(
                "{}: not a valid module\n{}",
                path.display(),
                lines.join("\n")
            ),
        ));
    }
    Ok(m)
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
}

fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn cmd_check(cli: &Cli, input: &Path, mode: Mode) -> Outcome {
    let m = load(input, cli.prime)?;
    let mode = match mode {
        Mode::Exhaustive => ExactnessMode::Exhaustive,
        Mode::UnitCells => {
            eprintln!("{UNIT_CELLS_CAVEAT}");
            ExactnessMode::UnitCells
        }
    };
    let report = check_strong_exactness(&m, mode)?;
    match cli.format {
        Format::Json => emit(&to_json(&report)),
        Format::Text => {
            emit(&report.to_string());
            if mode == ExactnessMode::UnitCells {
                emit(&format!("{UNIT_CELLS_CAVEAT}\n"));
            }
        }
    }
    Ok(if report.overall { 0 } else { 1 })
}

fn exact_or_report(cli: &Cli, m: GridModule) -> Result<ExactModule, Fail> {
    match ExactModule::new(m) {
        Ok(em) => Ok(em),
        Err(blockcube::Error::NotStronglyExact(report)) => {
            match cli.format {
                Format::Json => emit(&to_json(&report)),
                Format::Text => emit(&report.to_string()),
            }
            Err(Fail(
                1,
                "module is not strongly exact; no block decomposition is computed".into(),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_decompose(cli: &Cli, input: &Path, output: Option<&Path>) -> Outcome {
    let m = load(input, cli.prime)?;
    let em = exact_or_report(cli, m)?;
    let report = decompose_exact(&em);
    if let Some(path) = output {
        write_file(path, &report_to_json(&report))?;
    }
    match cli.format {
        Format::Json => emit(&report_to_json(&report)),
        Format::Text => emit(&report.to_string()),
    }
    if report.verified {
        Ok(0)
    } else {
        Err(Fail(
            1,
            "internal inconsistency: block multiplicities do not add up to the dimensions".into(),
        ))
    }
}

fn sidecar_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("module");
    output.with_file_name(format!("{stem}.truth.json"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    cli: &Cli,
    kind: Kind,
    seed: u64,
    grid: Grid,
    max_blocks: usize,
    max_mult: usize,
    twist: bool,
    input: Option<&Path>,
    output: Option<&Path>,
) -> Outcome {
    let f = field(cli.prime)?.unwrap_or_default();
    let (module, truth) = match kind {
        Kind::Example => (counterexample(f), None),
        Kind::BlockSum => {
            let t = random_block_sum(f, grid, seed, max_blocks, max_mult);
            let m = if twist {
                t.module.basis_twist(seed)
            } else {
                t.module
            };
            (m, Some(t.multiset))
        }
        Kind::Perturbed => {
            let base = match input {
                Some(path) => load(path, cli.prime)?,
                None => random_block_sum(f, grid, seed, max_blocks, max_mult).module,
            };
            (perturb(&base, seed)?, None)
        }
    };
    let text = module_to_json(&module);
    match output {
        Some(path) => {
            write_file(path, &text)?;
            if let Some(multiset) = truth {
                write_file(&sidecar_path(path), &multiset_to_json(&multiset))?;
            }
        }
        None => emit(&text),
    }
    Ok(0)
}

fn cmd_verify(cli: &Cli, input: &Path, report_path: &Path) -> Outcome {
    let m = load(input, cli.prime)?;
    let text = fs::read_to_string(report_path)
        .map_err(|e| Fail(2, format!("{}: {e}", report_path.display())))?;
    let report =
        report_from_json(&text).map_err(|e| Fail(2, format!("{}: {e}", report_path.display())))?;
    let g = m.grid();
    if let Some(bad) = report.entries.iter().find(|e| !e.block.is_valid_on(g)) {
        return Err(Fail(
            2,
            format!(
                "report block {} does not fit the module grid {g}",
                bad.block
            ),
        ));
    }
    if let Some(bad) = report.dims_check.iter().find(|d| !g.contains(d.at)) {
        return Err(Fail(
            2,
            format!("report point {} lies outside the module grid {g}", bad.at),
        ));
    }
    let em = exact_or_report(cli, m)?;
    let ok = verify_direct_sum(&em, &report);
    match cli.format {
        Format::Json => emit(&to_json(&serde_json::json!({ "direct_sum": ok }))),
        Format::Text => emit(&format!("direct sum: {}\n", if ok { "yes" } else { "no" })),
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_info(cli: &Cli, input: &Path) -> Outcome {
    let m = read_module(input)?;
    let m = match field(cli.prime)? {
        Some(f) => m.with_field(f),
        None => m,
    };
    let v = m.validate();
    let g = m.grid();
    let blocks = blockcube::blocks::block_count(g);
    match cli.format {
        Format::Json => emit(&to_json(&serde_json::json!({
            "prime": m.field().prime(),
            "cells": g.cells(),
            "points": g.len(),
            "total_dim": m.total_dim(),
            "max_dim": m.dims().iter().max(),
            "blocks": blocks,
            "valid": v.is_valid(),
            "problems": v.problems,
        }))),
        Format::Text => {
            let mut s = format!(
                "grid {g} ({} points), GF({})\ntotal dimension {}, largest {}\n{blocks} candidate blocks\n",
                g.len(),
                m.field().prime(),
                m.total_dim(),
                m.dims().iter().max().copied().unwrap_or(0)
            );
            if v.is_valid() {
                s.push_str("valid module\n");
            } else {
                s.push_str("invalid module:\n");
                for p in &v.problems {
                    s.push_str(&format!("  {p}\n"));
                }
            }
            emit(&s);
        }
    }
    Ok(if v.is_valid() { 0 } else { 2 })
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { input, mode } => cmd_check(cli, input, *mode),
        Command::Decompose { input, output } => cmd_decompose(cli, input, output.as_deref()),
        Command::Generate {
            kind,
            seed,
            grid,
            max_blocks,
            max_mult,
            twist,
            input,
            output,
        } => cmd_generate(
            cli,
            *kind,
            *seed,
            *grid,
            *max_blocks,
            *max_mult,
            *twist,
            input.as_deref(),
            output.as_deref(),
        ),
        Command::Verify { input, report } => cmd_verify(cli, input, report),
        Command::Info { input } => cmd_info(cli, input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("blockcube: {msg}");
            ExitCode::from(code)
        }
    }
}
