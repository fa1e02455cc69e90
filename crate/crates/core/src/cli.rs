//! Command-line front end for the `renyi` binary.
//!
//! Inputs are JSON files; data goes to standard output or `--out`, errors to
//! standard error. Exit codes: 0 success, 1 input or computation error,
//! 2 and 3 from `verify` (failed theorem check, unconfirmed probe).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::guessing::{experiment_csv, guessing_bound, iid_experiment_with_budget, ranking_function, Rho, DEFAULT_CLASS_BUDGET};
use crate::lattice::{construct_markov_operator, join, meet, representative, representative_on_grid};
use crate::lorenz::{build_curve, LorenzCurve};
use crate::measures::{DensityPair, FiniteDistribution, Order};
use crate::properties::{exit_code, run_all_with, Tolerances, ALPHA_GRID, DEFAULT_INSTANCES};
use crate::renyi::{alpha_sweep, renyi_divergence};
use crate::transforms::{apply, coarsen, Channel, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Base {
    /// Natural logarithm (nats).
    E,
    /// Base-2 logarithm (bits).
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeOp {
    Meet,
    Join,
}

#[derive(Debug, Parser)]
#[command(name = "renyi", version, about = "Rényi divergences, Lorenz curves and guessing bounds for finite distributions")]
pub struct Cli {
    /// Logarithm base for printed divergences.
    #[arg(long, global = true, value_enum, default_value = "e")]
    pub base: Base,
    /// Decimal places in printed values.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(0..=15))]
    pub precision: u8,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Divergence of a pair at one order.
    Div {
        pair: PathBuf,
        #[arg(long)]
        alpha: Order,
    },
    /// Divergences over an ascending grid of orders, as CSV.
    Sweep {
        pair: PathBuf,
        /// Comma-separated orders; `inf` is accepted.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<Order>>,
    },
    /// Lorenz-curve breakpoints as CSV, optionally plotted to SVG.
    Lorenz {
        pair: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Meet or join of two pairs' Lorenz curves, with a representative pair.
    Lattice {
        first: PathBuf,
        second: PathBuf,
        #[arg(value_enum)]
        op: LatticeOp,
    },
    /// Doubly stochastic matrix taking `p2` to a distribution `p1` it majorizes.
    MarkovOp { p2: PathBuf, p1: PathBuf },
    /// Exact i.i.d. guessing experiment, as CSV.
    Guess {
        pair: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// Maximum number of type classes per block length.
        #[arg(long, default_value_t = DEFAULT_CLASS_BUDGET)]
        budget: u128,
    },
    /// Ranking function of a pair, with the moment bound when `--rho` is given.
    Rank {
        pair: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
    },
    /// Divergence before and after a partition or channel.
    Dpi {
        pair: PathBuf,
        #[arg(long)]
        alpha: Order,
        #[arg(long, conflicts_with = "channel", required_unless_present = "channel")]
        partition: Option<PathBuf>,
        #[arg(long)]
        channel: Option<PathBuf>,
    },
    /// Runs every seeded check and probe and writes a JSON report.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_INSTANCES)]
        instances: usize,
        #[arg(long, allow_negative_numbers = true)]
        inequality_tol: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        identity_tol: Option<f64>,
    },
}

/// Failure of a command, reported on standard error with exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] Error),
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: display.clone(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: display, message: e.to_string() })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

/// A divergence in the chosen base; `inf` for `+∞`.
pub fn format_value(nats: f64, base: Base, precision: usize) -> String {
    if nats == f64::INFINITY {
        return "inf".into();
    }
    let v = match base {
        Base::E => nats,
        Base::Two => nats / std::f64::consts::LN_2,
    };
    format!("{v:.precision$}")
}

fn fixed(x: f64, precision: usize) -> String {
    format!("{x:.precision$}")
}

/// Parses arguments from the process and runs; returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs one parsed command; output goes to `--out` or standard output.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let (text, code) = execute(cli)?;
    match &cli.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    let prec = cli.precision as usize;
    let base = cli.base;
    let text = match &cli.command {
        Command::Div { pair, alpha } => {
            let pair: DensityPair = read_json(pair)?;
            format_value(renyi_divergence(&pair, *alpha).value, base, prec) + "\n"
        }
        Command::Sweep { pair, grid } => {
            let pair: DensityPair = read_json(pair)?;
            let grid: Vec<Order> = match grid {
                Some(g) => g.clone(),
                None => ALPHA_GRID.iter().map(|&a| Order::new(a)).collect::<Result<_, _>>()?,
            };
            let mut out = String::from("alpha,value\n");
            for r in alpha_sweep(&pair, &grid)? {
                let _ = writeln!(out, "{},{}", r.order, format_value(r.value, base, prec));
            }
            out
        }
        Command::Lorenz { pair, svg } => {
            let pair: DensityPair = read_json(pair)?;
            let curve = build_curve(&pair);
            if let Some(path) = svg {
                write_file(path, &render_svg(&curve))?;
            }
            let mut out = String::from("u,L(u)\n");
            for (u, h) in curve.vertices() {
                let _ = writeln!(out, "{},{}", fixed(u, prec), fixed(h, prec));
            }
            out
        }
        Command::Lattice { first, second, op } => {
            let a: DensityPair = read_json(first)?;
            let b: DensityPair = read_json(second)?;
            lattice_json(&a, &b, *op)? + "\n"
        }
        Command::MarkovOp { p2, p1 } => {
            let p2: FiniteDistribution = read_json(p2)?;
            let p1: FiniteDistribution = read_json(p1)?;
            to_json(&construct_markov_operator(&p2, &p1)?) + "\n"
        }
        Command::Guess { pair, rho, n_max, budget } => {
            let pair: DensityPair = read_json(pair)?;
            let rows = iid_experiment_with_budget(&pair, Rho::new(*rho)?, *n_max, *budget)?;
            experiment_csv(&rows, prec)
        }
        Command::Rank { pair, rho } => {
            let pair: DensityPair = read_json(pair)?;
            let profile = ranking_function(&pair)?;
            let bound = rho.map(|r| Rho::new(r).and_then(|r| guessing_bound(&pair, r))).transpose()?;
            to_json(&json!({ "profile": profile, "bound": bound })) + "\n"
        }
        Command::Dpi { pair, alpha, partition, channel } => {
            let pair: DensityPair = read_json(pair)?;
            let after = match (partition, channel) {
                (Some(path), _) => coarsen(&pair, &read_json::<Partition>(path)?)?,
                (None, Some(path)) => apply(&read_json::<Channel>(path)?, &pair)?,
                (None, None) => unreachable!("clap requires one of --partition and --channel"),
            };
            let before = renyi_divergence(&pair, *alpha).value;
            let after_value = renyi_divergence(&after, *alpha).value;
            format!("before,after\n{},{}\n", format_value(before, base, prec), format_value(after_value, base, prec))
        }
        Command::Verify { seed, instances, inequality_tol, identity_tol } => {
            let defaults = Tolerances::default();
            let tol = Tolerances {
                inequality: inequality_tol.unwrap_or(defaults.inequality),
                identity: identity_tol.unwrap_or(defaults.identity),
            };
            let reports = run_all_with(*seed, *instances, tol);
            for r in &reports {
                let status = if r.passed { "ok" } else { "FAILED" };
                eprintln!("{:<34} {:>6} instances {:>6} violations  {status}", r.name, r.instances, r.violations);
            }
            return Ok((to_json(&reports) + "\n", exit_code(&reports)));
        }
    };
    Ok((text, 0))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// Whether every reference mass equals `1/n`.
fn uniform_size(pair: &DensityPair) -> Option<usize> {
    let n = pair.len();
    pair.q().all(|q| (q - 1.0 / n as f64).abs() <= 1e-12).then_some(n)
}

fn lattice_json(a: &DensityPair, b: &DensityPair, op: LatticeOp) -> Result<String, CliError> {
    let mut qa: Vec<f64> = a.q().filter(|&q| q > 0.0).collect();
    let mut qb: Vec<f64> = b.q().filter(|&q| q > 0.0).collect();
    qa.sort_by(f64::total_cmp);
    qb.sort_by(f64::total_cmp);
    if qa.len() != qb.len() || qa.iter().zip(&qb).any(|(x, y)| (x - y).abs() > 1e-9) {
        return Err(Error::InvalidCurve("the two pairs have different reference measures".into()).into());
    }
    let (ca, cb) = (build_curve(a), build_curve(b));
    let curve = match op {
        LatticeOp::Meet => meet(&ca, &cb),
        LatticeOp::Join => join(&ca, &cb),
    };
    // prefer a representative on the inputs' own uniform grid when one exists
    let rep = match (uniform_size(a), uniform_size(b)) {
        (Some(n), Some(m)) if n == m => representative_on_grid(&curve, n).unwrap_or_else(|_| representative(&curve)),
        _ => representative(&curve),
    };
    Ok(to_json(&json!({ "curve": curve, "vertices": curve.vertices(), "representative": rep })))
}

/// Static plot of the lower curve, the diagonal and the upper curve.
pub fn render_svg(curve: &LorenzCurve) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 40.0;
    let x = |u: f64| PAD + u * SIZE;
    let y = |h: f64| PAD + (1.0 - h) * SIZE;
    let lower: Vec<(f64, f64)> = curve.vertices();
    let upper: Vec<(f64, f64)> = lower.iter().rev().map(|&(u, h)| (1.0 - u, 1.0 - h)).collect();
    let points = |pts: &[(f64, f64)]| pts.iter().map(|&(u, h)| format!("{:.2},{:.2}", x(u), y(h))).collect::<Vec<_>>().join(" ");
    let total = SIZE + 2.0 * PAD;

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#);
    let _ = writeln!(out, r#"  <rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888" stroke-dasharray="4 4"/>"##,
        x(0.0),
        y(0.0),
        x(1.0),
        y(1.0)
    );
    let _ = writeln!(out, r##"  <polyline points="{}" fill="none" stroke="#1f5fbf" stroke-width="2"/>"##, points(&lower));
    let _ = writeln!(out, r##"  <polyline points="{}" fill="none" stroke="#bf5f1f" stroke-width="2"/>"##, points(&upper));
    if curve.singular_p() > 0.0 {
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">singular mass {:.6}</text>"#,
            x(1.0) - 4.0,
            y(1.0 - curve.singular_p()) + 16.0,
            curve.singular_p()
        );
    }
    let _ = writeln!(out, r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">Q</text>"#, x(0.5), total - 12.0);
    let _ = writeln!(out, r#"  <text x="12" y="{:.2}" font-size="12">P</text>"#, y(0.5));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_conversion() {
        let v = (4.0f64 / 3.0).ln();
        assert_eq!(format_value(v, Base::E, 6), "0.287682");
        assert_eq!(format_value(v, Base::Two, 6), "0.415037");
        assert_eq!(format_value(f64::INFINITY, Base::Two, 6), "inf");
        assert_eq!(format_value(v, Base::E, 15), format!("{v:.15}"));
    }

    #[test]
    fn parses_commands() {
        let cli = Cli::try_parse_from(["renyi", "div", "p.json", "--alpha", "inf", "--base", "2"]).unwrap();
        assert_eq!(cli.base, Base::Two);
        assert!(matches!(cli.command, Command::Div { alpha: Order::Infinity, .. }));
        assert!(Cli::try_parse_from(["renyi", "div", "p.json", "--alpha", "2", "--precision", "16"]).is_err());
        assert!(Cli::try_parse_from(["renyi", "dpi", "p.json", "--alpha", "2"]).is_err());
        let cli = Cli::try_parse_from(["renyi", "guess", "p.json", "--rho", "-0.5"]).unwrap();
        assert!(matches!(cli.command, Command::Guess { rho, n_max: 20, .. } if rho == -0.5));
    }

    #[test]
    fn svg_has_both_curves() {
        let pair = DensityPair::from_vectors(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        let svg = render_svg(&build_curve(&pair));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("singular mass 0.500000"));
    }
}
