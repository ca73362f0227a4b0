use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mpsim::{bench_family, parse, run_circuit, BenchFamily, Error, RunOptions, RunReport};

/// Matrix product state simulator for quantum circuits.
#[derive(Parser)]
#[command(name = "mpsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit file and report on the final state.
    Run(RunCmd),
    /// Time a circuit family across a list of sizes.
    Bench(BenchCmd),
}

#[derive(Args)]
struct RunCmd {
    /// Circuit file to execute.
    #[arg(long)]
    circuit: PathBuf,
    /// Print a per-gate record of the Schmidt rank evolution.
    #[arg(long)]
    report_chi: bool,
    /// Report the amplitude of this basis state (repeatable).
    #[arg(long = "amplitude", value_name = "BITS")]
    amplitudes: Vec<String>,
    /// Report the expectation value of this Pauli string (repeatable).
    #[arg(long = "expect", value_name = "PAULIS")]
    expectations: Vec<String>,
    /// Draw this many measurement shots from the final state.
    #[arg(long)]
    shots: Option<u64>,
    /// Seed for measurement sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncate every two-qubit update to this bond dimension.
    #[arg(long)]
    chi_cap: Option<usize>,
    /// Override the relative singular-value cutoff (default 1e-12).
    #[arg(long)]
    rank_tol: Option<f64>,
    /// Abort with exit code 3 if the bond dimension ever exceeds this.
    #[arg(long)]
    max_chi: Option<usize>,
    /// Also evolve a dense state vector and report the deviation (<= 14 qubits).
    #[arg(long)]
    compare_dense: bool,
    /// Emit line-delimited JSON records instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchCmd {
    /// Circuit family: ghz, product, or random-local.
    #[arg(long)]
    family: BenchFamily,
    /// Comma-separated qubit counts.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Layers for the random-local family.
    #[arg(long, default_value_t = 20)]
    depth: usize,
    /// Truncate every two-qubit update to this bond dimension.
    #[arg(long)]
    chi_cap: Option<usize>,
    /// Seed for the random-local family.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Timing repetitions per size; the fastest run is reported.
    #[arg(long, default_value_t = 5)]
    repeats: u32,
    /// Emit line-delimited JSON records instead of text.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(cmd) => run(cmd),
        Command::Bench(cmd) => bench(cmd),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } => 2,
        Error::Capacity(_) => 3,
        _ => 1,
    }
}

fn run(cmd: RunCmd) -> Result<(), Error> {
    let text = std::fs::read_to_string(&cmd.circuit)?;
    let circuit = parse(&text).map_err(|err| match err {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", cmd.circuit.display()),
        },
        other => other,
    })?;
    let opts = RunOptions {
        chi_cap: cmd.chi_cap,
        rank_tol: cmd.rank_tol,
        max_chi: cmd.max_chi,
        compare_dense: cmd.compare_dense,
        trace_gates: cmd.report_chi,
        amplitudes: cmd.amplitudes,
        expectations: cmd.expectations,
        shots: cmd.shots,
        seed: cmd.seed,
    };
    let (report, _) = run_circuit(&circuit, &opts)?;
    if cmd.json {
        print_run_json(&report);
    } else {
        print_run_text(&report);
    }
    Ok(())
}

fn print_run_text(report: &RunReport) {
    println!("circuit: {} qubits, {} gates", report.n, report.gate_count);
    if !report.gates.is_empty() {
        println!(
            "{:>6}  {:<6} {:<12} {:>6} {:>8} {:>12}",
            "gate", "name", "targets", "chi", "E_chi", "t (ms)"
        );
        for g in &report.gates {
            let targets = g
                .targets
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "{:>6}  {:<6} {:<12} {:>6} {:>8.3} {:>12.3}",
                g.index,
                g.mnemonic,
                targets,
                g.chi,
                g.e_chi,
                g.elapsed.as_secs_f64() * 1e3
            );
        }
    }
    println!(
        "final: chi = {}, E_chi = {:.3}, storage = {} values (peak {})",
        report.final_chi, report.final_e_chi, report.final_storage, report.peak_storage
    );
    if report.discarded_weight > 0.0 {
        println!("discarded Schmidt weight: {:.3e}", report.discarded_weight);
    }
    println!("elapsed: {:.3} ms", report.elapsed.as_secs_f64() * 1e3);
    for a in &report.amplitudes {
        println!(
            "amplitude {}: {:+.16e} {:+.16e}i  (p = {:.12})",
            a.bits, a.value.re, a.value.im, a.probability
        );
    }
    for e in &report.expectations {
        println!("<{}> = {:.12}", e.observable, e.value);
    }
    if let Some(samples) = &report.samples {
        println!(
            "counts ({} shots, seed {}, {}):",
            samples.shots, samples.seed, samples.algorithm
        );
        for (bits, count) in &samples.counts {
            println!("  {bits}  {count}");
        }
    }
    if let Some(err) = report.dense_max_error {
        println!("dense check: max amplitude error = {err:.3e}");
    }
}

fn print_run_json(report: &RunReport) {
    // Timing-free records: identical invocations print identical bytes.
    println!(
        "{}",
        json!({
            "type": "run",
            "n": report.n,
            "gates": report.gate_count,
            "final_chi": report.final_chi,
            "final_e_chi": report.final_e_chi,
            "final_storage": report.final_storage,
            "peak_storage": report.peak_storage,
            "discarded_weight": report.discarded_weight,
        })
    );
    for g in &report.gates {
        println!(
            "{}",
            json!({
                "type": "gate",
                "index": g.index,
                "gate": g.mnemonic,
                "targets": g.targets,
                "chi": g.chi,
                "e_chi": g.e_chi,
            })
        );
    }
    for a in &report.amplitudes {
        println!(
            "{}",
            json!({
                "type": "amplitude",
                "bits": a.bits,
                "re": a.value.re,
                "im": a.value.im,
                "probability": a.probability,
            })
        );
    }
    for e in &report.expectations {
        println!(
            "{}",
            json!({
                "type": "expectation",
                "observable": e.observable,
                "value": e.value,
            })
        );
    }
    if let Some(samples) = &report.samples {
        let counts: serde_json::Map<String, serde_json::Value> = samples
            .counts
            .iter()
            .map(|(bits, count)| (bits.clone(), json!(count)))
            .collect();
        println!(
            "{}",
            json!({
                "type": "counts",
                "shots": samples.shots,
                "seed": samples.seed,
                "algorithm": samples.algorithm,
                "counts": counts,
            })
        );
    }
    if let Some(err) = report.dense_max_error {
        println!(
            "{}",
            json!({
                "type": "dense_check",
                "max_amplitude_error": err,
            })
        );
    }
}

fn bench(cmd: BenchCmd) -> Result<(), Error> {
    let rows = bench_family(
        cmd.family,
        &cmd.sizes,
        cmd.depth,
        cmd.seed,
        cmd.repeats,
        cmd.chi_cap,
    )?;
    if cmd.json {
        for row in &rows {
            println!(
                "{}",
                json!({
                    "type": "bench",
                    "family": cmd.family.name(),
                    "n": row.n,
                    "gates": row.gate_count,
                    "best_ms": row.best.as_secs_f64() * 1e3,
                    "peak_storage": row.peak_storage,
                    "final_chi": row.final_chi,
                    "repeats": row.repeats,
                })
            );
        }
    } else {
        println!(
            "family {}, repeats {}, chi_cap {}",
            cmd.family.name(),
            cmd.repeats,
            cmd.chi_cap
                .map(|c| c.to_string())
                .unwrap_or_else(|| "none".into())
        );
        println!(
            "{:>8} {:>8} {:>12} {:>14} {:>6}",
            "n", "gates", "best (ms)", "peak storage", "chi"
        );
        for row in &rows {
            println!(
                "{:>8} {:>8} {:>12.3} {:>14} {:>6}",
                row.n,
                row.gate_count,
                row.best.as_secs_f64() * 1e3,
                row.peak_storage,
                row.final_chi
            );
        }
    }
    Ok(())
}
