use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use owc::run::{run, run_compare, RunSummary, CREST_FRACTION};
use owc::scenario::load_scenario;
use owc::OwcError;

/// Shallow-water simulator for an oscillating water column wave energy converter.
#[derive(Parser)]
#[command(name = "owc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario in the mode it specifies.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
    /// Run the scenario once per step height and compare crest arrivals.
    Compare {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        step_heights: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Fraction of the forcing amplitude that marks a crest at a gauge.
        #[arg(long, default_value_t = CREST_FRACTION)]
        crest_fraction: f64,
    },
}

fn report(summary: &RunSummary) {
    println!("mode {}: {} steps of dt = {:e} s", summary.mode, summary.steps, summary.dt);
    for a in &summary.arrivals {
        match a.t {
            Some(t) => println!("s = {}: crest reaches x = {} at t = {t:.6}", a.step_height, a.x),
            None => println!("s = {}: no crest at x = {}", a.step_height, a.x),
        }
    }
    if let Some(acc) = &summary.accuracy {
        println!(
            "max |dzeta| before contact (t <= {:.4}): {:e}; over the whole run: {:e}",
            acc.window_end, acc.max_diff_window, acc.max_diff_total
        );
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
}

fn execute(command: Command) -> Result<(), OwcError> {
    match command {
        Command::Run { scenario, out } => report(&run(&load_scenario(&scenario)?, &out)?),
        Command::Validate { scenario } => {
            let s = load_scenario(&scenario)?;
            println!("{}: valid ({} mode)", scenario.display(), s.mode);
        }
        Command::Compare { scenario, step_heights, out, crest_fraction } => {
            let heights: [f64; 2] = step_heights.as_slice().try_into().map_err(|_| {
                OwcError::Config(format!("--step-heights needs exactly two values, got {}", step_heights.len()))
            })?;
            report(&run_compare(&load_scenario(&scenario)?, heights, crest_fraction, &out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_numerical() { 2 } else { 1 })
        }
    }
}
