use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qho_entangle::runner::{
    convergence, detect_jumps, oracle_report, rate_grid, run_scenario, sweep_decoherence,
    write_trajectory_csv, Scenario, SweepTable,
};
use qho_entangle::{Error, Result};

const CONFIG_HELP: &str = "\
CONFIG FILE (TOML, unknown keys are errors)

  [scenario]
  name              required
  initial_state     ground | thermal | coherent            (ground)
  alpha             [re, im], coherent only
  measures          any of negativity, K_r, K_sigma, purity,
                    trace_error, min_eig, a, sz             (negativity, K_r, K_sigma)
  output            CSV path for `evolve`

  [params]
  omega0            oscillator frequency                    (1.0)
  epsilon_z         qubit splitting                         (2.0)
  lambda0           coupling                                (0.2)
  gamma_per_tau0    qubit damping rate, per tau0            (0)
  c_per_tau0        oscillator damping rate, per tau0       (0)
  temperature_ratio hbar*omega0 / k_B T                     (0.74239)

  [integrator]
  n_max             Fock levels kept                        (64)
  t_end             end time in tau0                        (10)
  steps_per_tau0    RK4 steps per tau0                      (200)
  samples_per_tau0  samples per tau0, divides the above     (100)
  pulses            apply the spin-flip pulse train         (true)
  check_positivity  certify rho >= 0 at every sample        (true)

Times in every CSV are in units of tau0 = pi/omega0.
Sweep workers: QHO_WORKERS (default: all cores).";

#[derive(Parser)]
#[command(version, about = "Entanglement of a pulsed qubit and a damped oscillator", after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write its trajectory CSV.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `scenario.output`; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum negativity and its time over a range of equal damping rates.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Per tau0.
        #[arg(long)]
        gamma_start: f64,
        #[arg(long)]
        gamma_end: f64,
        #[arg(long)]
        gamma_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adjacent sweep rows whose t_max differs by more than the threshold.
    Jumps {
        #[arg(long = "in")]
        input: PathBuf,
        /// In tau0.
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
    },
    /// Numerics against the closed forms; exit status is the overall result.
    OracleReport {
        #[arg(long)]
        config: PathBuf,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rerun with half the step and 16 more levels and compare.
    Convergence {
        #[arg(long)]
        config: PathBuf,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Evolve { config, out } => {
            let sc = Scenario::from_file(&config)?;
            let target = out.or_else(|| sc.output.clone());
            let traj = run_scenario(&sc, None)?;
            let mut w = sink(target.as_deref())?;
            write_trajectory_csv(&traj, &mut w)?;
            w.flush()?;
            Ok(true)
        }
        Command::Sweep {
            config,
            gamma_start,
            gamma_end,
            gamma_step,
            out,
        } => {
            let sc = Scenario::from_file(&config)?;
            let rates = rate_grid(gamma_start, gamma_end, gamma_step)?;
            let table = sweep_decoherence(&sc, &rates)?;
            for r in &table.rows {
                if let Some(e) = &r.error {
                    eprintln!("rate {}: {e}", r.gamma_c);
                }
            }
            let mut w = sink(out.as_deref())?;
            table.write_csv(&mut w)?;
            w.flush()?;
            Ok(table.rows.iter().all(|r| r.error.is_none()))
        }
        Command::Jumps { input, threshold } => {
            let table = SweepTable::read_csv(File::open(&input)?)?;
            if table.rows.iter().filter(|r| r.converged).count() < 2 {
                return Err(Error::Config(
                    "need at least two converged rows to look for jumps".into(),
                ));
            }
            let mut w = sink(None)?;
            writeln!(w, "gamma_left,gamma_right,delta_t")?;
            for j in detect_jumps(&table, threshold) {
                writeln!(w, "{},{},{}", j.gamma_left, j.gamma_right, j.delta_t)?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::OracleReport { config, csv } => {
            let rep = oracle_report(&Scenario::from_file(&config)?);
            print!("{}", rep.to_text());
            if let Some(p) = csv {
                let mut w = sink(Some(&p))?;
                rep.write_csv(&mut w)?;
                w.flush()?;
            }
            Ok(rep.pass())
        }
        Command::Convergence { config } => {
            let r = convergence(&Scenario::from_file(&config)?)?;
            println!("max |dN|       = {:.3e}", r.max_dev_negativity);
            println!("max |dK_r|     = {:.3e}", r.max_dev_k_r);
            println!("max |dK_sigma| = {:.3e}", r.max_dev_k_sigma);
            if let Some(e) = &r.error {
                println!("error: {e}");
            }
            println!("{}", if r.pass { "PASS" } else { "FAIL" });
            Ok(r.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
