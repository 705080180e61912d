//! Command-line front end: replay traces, generate traces, run a self-test.

use std::fs;
use std::io;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dynsched::core::{parse_rational, Objective, Rational};
use dynsched::harness::report::write_csv;
use dynsched::harness::{generate, parse_trace, replay, GenParams, Mode, ReplayOptions, StepMetrics};
use dynsched::Result;

#[derive(Parser)]
#[command(name = "dynsched", version, about = "Online scheduling with bounded migration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace file and emit per-step metrics.
    Replay {
        trace: String,
        #[arg(long, default_value = "rounded", value_parser = parse_mode)]
        mode: Mode,
        /// Compare against a brute-force optimum while few jobs are live.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 10)]
        oracle_cap: usize,
        /// Write CSV here instead of standard output.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Generate a random trace on standard output.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        machines: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_parser = parse_rat)]
        pmax: Rational,
        #[arg(long, value_parser = parse_rat)]
        epsilon: Rational,
        #[arg(long, default_value_t = 0.0)]
        small_prob: f64,
        #[arg(long, value_parser = parse_objective)]
        objective: Objective,
        /// Maximum number of live jobs.
        #[arg(long, default_value_t = 10)]
        max_live: usize,
        /// Draw large sizes from the integers.
        #[arg(long)]
        integral: bool,
    },
    /// Replay built-in traces and check every invariant.
    Selftest,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: dynsched::Error| e.to_string())
}

fn parse_rat(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_objective(s: &str) -> std::result::Result<Objective, String> {
    s.parse().map_err(|e: dynsched::Error| e.to_string())
}

fn report_failures(label: &str, rows: &[StepMetrics]) -> bool {
    let mut ok = true;
    for r in rows.iter().filter(|r| !r.ok()) {
        eprintln!("{label} step {}: failed {}", r.step, r.failures().join(", "));
        ok = false;
    }
    ok
}

fn selftest() -> Result<bool> {
    let mut all = true;
    for objective in [Objective::Makespan, Objective::Covering] {
        for (mode, small_prob) in [(Mode::NoRounding, 0.0), (Mode::Rounded, 0.5)] {
            for seed in 0..4 {
                let mut p = GenParams::new(seed, 3, 40, Rational::from_integer(4.into()), Rational::new(1.into(), 2.into()), objective);
                p.small_prob = small_prob;
                p.integral = mode == Mode::NoRounding;
                let trace = generate(&p)?;
                let rows = replay(&trace, ReplayOptions { mode, oracle: true, oracle_cap: 10 })?;
                let label = format!("{objective} {mode:?} seed {seed}");
                let ok = report_failures(&label, &rows);
                println!("{label}: {} steps, {}", rows.len(), if ok { "pass" } else { "FAIL" });
                all &= ok;
            }
        }
    }
    Ok(all)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Replay { trace, mode, oracle, oracle_cap, csv } => {
            let text = fs::read_to_string(&trace).map_err(|e| dynsched::Error::Input(format!("{trace}: {e}")))?;
            let t = parse_trace(&text)?;
            let rows = replay(&t, ReplayOptions { mode, oracle, oracle_cap })?;
            match csv {
                Some(path) => {
                    let f = fs::File::create(&path).map_err(|e| dynsched::Error::Input(format!("{path}: {e}")))?;
                    write_csv(f, &rows, oracle)?;
                }
                None => write_csv(io::stdout().lock(), &rows, oracle)?,
            }
            Ok(report_failures(&trace, &rows))
        }
        Command::Gen { seed, machines, steps, pmax, epsilon, small_prob, objective, max_live, integral } => {
            let mut p = GenParams::new(seed, machines, steps, pmax, epsilon, objective);
            p.small_prob = small_prob;
            p.max_live = max_live;
            p.integral = integral;
            print!("{}", generate(&p)?);
            Ok(true)
        }
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
