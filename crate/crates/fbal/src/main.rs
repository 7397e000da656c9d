//! Command-line front end. Thin adapter over the library: parses flags,
//! dispatches, formats. No numerics live here.
//!
//! Exit codes: 0 success, 1 failed sweep checks or I/O trouble,
//! 2 validation/usage errors, 3 solver non-convergence.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fbal::{
    allocate_lnorm, allocate_minmax_exact, avg_interference, brute_force_minmax, distortion,
    measure_interference, min_bits_for_threshold, round_allocation, run_figure, run_scenario,
    AllocationReport, BitAllocation, Error, Scenario, SolverConfig, SolverTag, SweepOutput,
    SystemParams,
};

/// Environment variable consulted for the default Monte Carlo seed.
const SEED_ENV: &str = "FBAL_SEED";

#[derive(Parser)]
#[command(
    name = "fbal",
    about = "Feedback-bit allocation: min-max and threshold solvers, Monte Carlo validation, sweep runner",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArgs {
    /// Per-user average channel gains, comma separated (linear unless --db)
    #[arg(long, value_delimiter = ',', required = true)]
    gains: Vec<f64>,
    /// Number of transmit antennas
    #[arg(long)]
    antennas: usize,
    /// Transmit power in watts (linear)
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// Interpret --gains as dB and convert on input
    #[arg(long)]
    db: bool,
}

impl SystemArgs {
    fn params(&self) -> Result<SystemParams, Error> {
        let gains = if self.db {
            self.gains.iter().map(|g| 10f64.powf(g / 10.0)).collect()
        } else {
            self.gains.clone()
        };
        SystemParams::new(self.antennas, self.power, gains)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Split a feedback-bit budget to minimize the worst per-user interference
    Allocate {
        #[command(flatten)]
        system: SystemArgs,
        /// Total feedback bits to distribute
        #[arg(long)]
        budget: f64,
        /// Solver: exact | lnorm | brute
        #[arg(long, default_value = "exact")]
        solver: String,
        /// Surrogate norm exponent for the lnorm solver
        #[arg(long = "L", default_value_t = 100)]
        l_exponent: u32,
        /// Also report the nearest-integer allocation under the budget
        #[arg(long)]
        round: bool,
        /// Emit CSV instead of the text report
        #[arg(long)]
        csv: bool,
    },
    /// Fewest bits per user keeping everyone at or below an interference cap
    Minbits {
        #[command(flatten)]
        system: SystemArgs,
        /// Per-user average interference cap in watts
        #[arg(long)]
        threshold: f64,
        /// Emit CSV instead of the text report
        #[arg(long)]
        csv: bool,
    },
    /// Measure interference by Monte Carlo and compare with the model
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        /// Integer feedback bits per user, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        bits: Vec<u64>,
        /// Number of Monte Carlo trials
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Master seed (default: $FBAL_SEED, then 12345)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one of the canned sweeps (1..=4) and write its CSV
    Figure {
        /// Sweep id: 1 budget/antennas, 2 gain sensitivity, 3 closed-form
        /// convergence, 4 minimum bits vs cap
        #[arg(long)]
        id: u8,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run a TOML scenario file and write its CSV plus a check summary
    Scenario {
        /// Scenario file path
        #[arg(long)]
        file: std::path::PathBuf,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok())
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::NoConvergence { .. } => ExitCode::from(3),
        Error::Io(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn print_report(report: &AllocationReport, label: &str) {
    println!("{label} ({} solver)", report.solver_tag());
    println!("  {:<6} {:>12} {:>16}", "user", "bits", "interference_w");
    for (k, (&b, &i)) in report
        .bits()
        .iter()
        .zip(report.per_user_interference())
        .enumerate()
    {
        println!("  {k:<6} {b:>12.4} {i:>16.6e}");
    }
    println!(
        "  total bits {:.4}, max interference {:.6e}",
        report.allocation().total(),
        report.max_interference()
    );
}

fn report_csv(report: &AllocationReport) -> String {
    let mut out = String::from("user,bits,interference_w\n");
    for (k, (&b, &i)) in report
        .bits()
        .iter()
        .zip(report.per_user_interference())
        .enumerate()
    {
        out.push_str(&format!("{k},{b},{i}\n"));
    }
    out
}

fn write_or_print(path: Option<&std::path::Path>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => {
            std::fs::write(p, content).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn sweep_outcome(out: &SweepOutput, csv_path: Option<&std::path::Path>) -> Result<bool, Error> {
    write_or_print(csv_path, &out.csv())?;
    eprint!("{}", out.summary());
    Ok(out.all_passed())
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Allocate {
            system,
            budget,
            solver,
            l_exponent,
            round,
            csv,
        } => {
            let params = system.params()?;
            let tag = SolverTag::parse(&solver)?;
            let cfg = SolverConfig {
                l_exponent,
                ..SolverConfig::default()
            };
            let needs_integer_budget = round || tag == SolverTag::BruteForce;
            if needs_integer_budget && (budget.fract() != 0.0 || budget < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "--budget must be a non-negative integer with --round or --solver brute, got {budget}"
                )));
            }
            let report = match tag {
                SolverTag::ExactMinMax => allocate_minmax_exact(&params, budget, &cfg)?,
                SolverTag::LNormWaterfill => allocate_lnorm(&params, budget, &cfg)?.0,
                SolverTag::BruteForce => brute_force_minmax(&params, budget as u64)?,
                SolverTag::ThresholdMin => {
                    return Err(Error::InvalidParameter(
                        "--solver threshold belongs to the minbits subcommand".into(),
                    ))
                }
            };
            let rounded = if round && tag != SolverTag::BruteForce {
                Some(round_allocation(
                    &params,
                    report.allocation(),
                    budget as u64,
                )?)
            } else {
                None
            };
            if csv {
                print!("{}", report_csv(&report));
                if let Some(r) = &rounded {
                    print!("{}", report_csv(r));
                }
            } else {
                print_report(&report, "allocation");
                if let Some(r) = &rounded {
                    print_report(r, "rounded allocation");
                }
            }
            Ok(true)
        }
        Command::Minbits {
            system,
            threshold,
            csv,
        } => {
            let params = system.params()?;
            let ta = min_bits_for_threshold(&params, threshold)?;
            if csv {
                let mut out = String::from("user,bits,bits_unrounded,interference_w\n");
                for (k, ((&b, &u), &i)) in ta
                    .report
                    .bits()
                    .iter()
                    .zip(&ta.unrounded_bits)
                    .zip(ta.report.per_user_interference())
                    .enumerate()
                {
                    out.push_str(&format!("{k},{b},{u},{i}\n"));
                }
                print!("{out}");
            } else {
                print_report(&ta.report, "minimum bits under cap");
                println!("  unrounded total {:.4}", ta.unrounded_total);
            }
            Ok(true)
        }
        Command::Simulate {
            system,
            bits,
            trials,
            seed,
        } => {
            let params = system.params()?;
            let seed = seed.or_else(env_seed).unwrap_or(12345);
            let total: u64 = bits.iter().sum();
            let alloc = BitAllocation::new(bits.iter().map(|&b| b as f64).collect(), total as f64)?;
            let stats = measure_interference(&params, &alloc, trials, seed)?;
            println!("user,bits,predicted_w,measured_w,std_error,measured_sin2,model_sin2");
            for (k, &b) in bits.iter().enumerate() {
                let model_d = distortion(b as f64, params.num_antennas())?;
                let predicted = avg_interference(params.tx_power(), params.gain(k), model_d)?;
                println!(
                    "{k},{b},{},{},{},{},{}",
                    predicted,
                    stats.mean_interference[k],
                    stats.std_error[k],
                    stats.mean_distortion[k],
                    model_d
                );
            }
            eprintln!("# trials={} seed={}", stats.trials, stats.seed);
            Ok(true)
        }
        Command::Figure { id, out } => {
            let sweep = run_figure(id)?;
            sweep_outcome(&sweep, out.as_deref())
        }
        Command::Scenario { file, out } => {
            let mut scenario = Scenario::from_path(&file)?;
            if let Some(mc) = scenario.monte_carlo.as_mut() {
                if mc.seed.is_none() {
                    mc.seed = env_seed();
                }
            }
            let sweep = run_scenario(&scenario)?;
            sweep_outcome(&sweep, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more sweep checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
