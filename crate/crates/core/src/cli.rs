//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for invalid input (bad flags, out-of-range
//! parameters, malformed files, signalling tables), 2 when a computation or
//! I/O operation fails.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{optimal_n, scan_to_csv, visibility_scan, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::experiment::{estimate, read_dataset, simulate_sharded, write_dataset};
use crate::fmt::Sig17;
use crate::lp::{build_adversary_lp, max_prediction_distance};
use crate::nonlocality::{
    check_nonsignalling, flatten, i_n_of_table, lemma1_check, lemma2_distance_bound, markov_check,
};
use crate::quantum::{born_table, chained_family, entangled_state, i_n_analytic};
use crate::table::ConditionalTable;

#[derive(Parser, Debug)]
#[command(name = "chainbound", version, about = "Chained Bell correlations and extension bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample seeded measurement trials and write them as CSV.
    Simulate(SimulateArgs),
    /// Estimate I_N with a confidence interval from a trial CSV.
    Estimate(EstimateArgs),
    /// Check non-signalling, the prediction bound and the Markov condition on a table.
    Bound(BoundArgs),
    /// Find the non-signalling extension that best predicts one outcome.
    Adversary(AdversaryArgs),
    /// Optimal chain length and minimum I_N over a visibility grid.
    Scan(ScanArgs),
    /// Run a quick set of internal consistency checks.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    visibility: f64,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; the output does not depend on this.
    #[arg(long, default_value_t = 1)]
    shards: usize,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Table as JSON, or CSV when the file name ends in `.csv`.
    #[arg(long)]
    in_table: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct AdversaryArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    visibility: f64,
    #[arg(long, allow_negative_numbers = true)]
    target_a: i64,
    #[arg(long, allow_negative_numbers = true)]
    target_x: i64,
    /// Write the optimal extension table as JSON.
    #[arg(long)]
    dump_table: Option<PathBuf>,
    /// Write the linear program in plain-text dump form.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    vmin: f64,
    #[arg(long)]
    vmax: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    nmax: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, required = true)]
    self_test: bool,
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Adversary(a) => cmd_adversary(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Check(_) => cmd_check(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let data = simulate_sharded(a.n, a.visibility, a.trials, a.seed, a.shards)?;
    match a.out {
        Some(path) => write_dataset(&data, path),
        None => emit(None, &data.to_csv()),
    }
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let data = read_dataset(&a.input)?;
    print_json(&estimate(&data, a.confidence)?)
}

fn read_table(path: &Path) -> Result<ConditionalTable<f64>> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let n_axes = text
            .lines()
            .find(|l| !l.trim().is_empty())
            .map_or(0, |h| h.split(',').count().saturating_sub(1));
        ConditionalTable::from_csv(&text, n_axes / 2)
    } else {
        ConditionalTable::from_json(&text)
    }
}

fn cmd_bound(a: BoundArgs) -> Result<()> {
    if !(a.tolerance >= 0.0 && a.tolerance.is_finite()) {
        return Err(Error::invalid("tolerance must be a non-negative number"));
    }
    let raw = read_table(&a.in_table)?;
    let table = match raw.inputs().len() {
        2 => raw.with_trivial_party("C", "Z")?,
        _ => raw,
    };
    let ns = check_nonsignalling(&table, a.tolerance)?;
    if let Some(desc) = &ns.violating_constraint {
        return Err(Error::PreconditionViolated(format!(
            "table is signalling: {desc} (variational distance {})",
            crate::fmt::sig17(ns.max_violation)
        )));
    }
    let lemma1 = lemma1_check(&table, a.tolerance)?;
    let markov = markov_check(&table, a.tolerance)?;
    print_json(&json!({
        "normalization_error": Sig17(table.normalization_error()),
        "nonsignalling": ns.json_view(),
        "prediction_bound": {
            "holds": lemma1.holds,
            "worst_distance": Sig17(lemma1.worst_distance),
            "i_n": Sig17(lemma1.i_n),
            "worst_gap": Sig17(lemma1.worst_gap),
        },
        "markov": {
            "holds": markov.holds,
            "max_distance": Sig17(markov.max_distance),
        },
    }))
}

fn cmd_adversary(a: AdversaryArgs) -> Result<()> {
    let q = born_table(&entangled_state(a.visibility)?, &chained_family(a.n)?)?;
    if let Some(path) = &a.dump_lp {
        let lp = build_adversary_lp(&q, 2, a.target_a, a.target_x)?;
        std::fs::write(path, lp.program.to_dump())?;
    }
    let result = max_prediction_distance(&q, a.target_a, a.target_x)?;
    if let Some(path) = &a.dump_table {
        std::fs::write(path, result.optimal_table.to_json())?;
    }
    print_json(&result.summary())
}

fn cmd_scan(a: ScanArgs) -> Result<()> {
    let rows = visibility_scan(a.vmin, a.vmax, a.steps, a.nmax)?;
    emit(a.out.as_deref(), &scan_to_csv(&rows))
}

/// Smoke checks covering each module; returns an error if any fails.
pub fn self_test() -> Result<Vec<(String, bool)>> {
    let mut results = Vec::new();
    let mut record = |name: &str, ok: bool| results.push((name.to_string(), ok));

    let q2 = born_table(&entangled_state(1.0)?, &chained_family(2)?)?;
    record(
        "I_2 at v=1 equals 2-sqrt(2)",
        (i_n_of_table(&q2)? - (2.0 - 2f64.sqrt())).abs() < 1e-10,
    );
    let q8 = born_table(&entangled_state(0.98)?, &chained_family(8)?)?;
    record(
        "quantum table is non-signalling",
        check_nonsignalling(&q8, 1e-12)?.satisfied(),
    );
    record(
        "Born value matches closed form",
        (i_n_of_table(&q8)? - i_n_analytic(8, 0.98_f64)?).abs() < 1e-10,
    );
    record("optimal N at v=0.98 is 8", optimal_n(0.98, DEFAULT_N_MAX)?.0 == 8);
    let adv = max_prediction_distance(&q2, 0, 1)?;
    record(
        "LP prediction distance within I_N",
        adv.prediction_distance <= adv.i_n + 1e-7 && adv.certificate.duality_gap() <= 1e-7,
    );
    let (d, p_neq) = lemma2_distance_bound(&[vec![0.4, 0.1], vec![0.2, 0.3]])?;
    record("marginal distance within P(X!=Y)", d <= p_neq + 1e-12);
    let s = flatten(&[0.6, 0.3, 0.1], 0.01)?;
    record("flattening reaches epsilon", s.epsilon_achieved <= 0.01);
    let one = simulate_sharded(3, 0.9, 2000, 7, 1)?;
    let four = simulate_sharded(3, 0.9, 2000, 7, 4)?;
    record("sharded simulation is reproducible", one == four);
    Ok(results)
}

fn cmd_check() -> Result<()> {
    let results = self_test()?;
    let mut failed = 0;
    for (name, ok) in &results {
        println!("{} {name}", if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        return Err(Error::Solver(format!("{failed} self-test check(s) failed")));
    }
    Ok(())
}
