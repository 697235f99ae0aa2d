//! Command-line front end for `gentleak-core`.
//!
//! Every subcommand reads JSON inputs, runs one computation and renders its
//! result as JSON (full precision) or CSV (six decimals). Output goes to
//! stdout, or atomically to `--out`.

pub mod error;
pub mod io;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gentleak_core::cloning::{bound_sweep, unit_grid};
use gentleak_core::leakage::{
    depolarized_leakage, gentle_leakage_interval, maximal_quantum_leakage, mql_grid_oracle_d2, OptimizerConfig,
};
use gentleak_core::measurements::{certify_gentle, CertifyMode, GentlenessSpec};
use gentleak_core::sim::{exact_round_statistics, run_simulation, tradeoff_sweep, EveStrategy};
use gentleak_core::states::bb84_ensemble;
use gentleak_core::DepolarizingParam;

pub use error::CliError;
use io::{csv, to_json};

#[derive(Debug, Parser)]
#[command(name = "gentleak", version, about = "Leakage and gentle-measurement tools for classical-quantum ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct OptimizerArgs {
    /// Base seed of the multi-start optimizer.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Independent optimizer starts.
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    /// Objective evaluations per start.
    #[arg(long, default_value_t = 2000)]
    pub evals: usize,
}

impl OptimizerArgs {
    fn config(self) -> Result<OptimizerConfig, CliError> {
        if self.starts == 0 || self.evals == 0 {
            return Err(CliError::Input("--starts and --evals must be positive".into()));
        }
        Ok(OptimizerConfig {
            starts: self.starts,
            evals_per_start: self.evals,
            seed: self.seed,
            ..OptimizerConfig::default()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    PerState,
    AverageState,
}

impl From<ModeArg> for CertifyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PerState => CertifyMode::PerState,
            ModeArg::AverageState => CertifyMode::AverageState,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    None,
    InterceptZ,
    /// Coin-flip between Z and X.
    #[value(alias = "intercept-random-basis")]
    W1,
    /// Always X.
    #[value(alias = "intercept-x")]
    W2,
    /// Three-outcome gentle measurement at `--epsilon`.
    Gentle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal leakage of an ensemble (JSON).
    Leakage {
        ensemble: PathBuf,
        #[command(flatten)]
        opt: OptimizerArgs,
        /// Also run the qubit grid oracle at this resolution.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Cloning lower bound on gentle leakage for each alpha (CSV).
    LowerBound {
        ensemble: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
        alpha: Vec<f64>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Check a POVM implementation for (alpha, delta)-weak gentleness (JSON).
    Certify {
        ensemble: PathBuf,
        povm: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum, default_value = "per-state")]
        mode: ModeArg,
    },
    /// Leakage of the depolarized ensemble for each p (CSV).
    Depolarize {
        ensemble: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
        p: Vec<f64>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Monte Carlo BB84 rounds against an eavesdropping strategy (JSON).
    Simulate {
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Lower-bound curve over an evenly spaced alpha grid on [0, 1] (CSV).
    Figure2 {
        ensemble: PathBuf,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// QBER, leakage and disturbance of the gentle strategy per epsilon (CSV).
    Tradeoff {
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 1..,
            default_value = "0,0.025,0.05,0.075,0.1",
            allow_negative_numbers = true
        )]
        epsilon: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Lower and upper bounds on gentle leakage at one (alpha, delta) (JSON).
    Interval {
        ensemble: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum, default_value = "per-state")]
        mode: ModeArg,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// The BB84 ensemble in the input file format (JSON).
    Bb84Ensemble,
}

fn sweep_csv(ensemble: &Path, alphas: &[f64], opt: OptimizerArgs) -> Result<String, CliError> {
    let e = io::load_ensemble(ensemble)?;
    let q = maximal_quantum_leakage(&e, &opt.config()?)?;
    let rows = bound_sweep(&e, alphas, q.bits)?;
    Ok(csv(
        "alpha,p1,p2,lower_bits",
        rows.iter().map(|r| vec![r.alpha, r.p1, r.p2, r.lower_bits]),
    ))
}

fn strategy(s: StrategyArg, epsilon: f64) -> Result<EveStrategy, CliError> {
    Ok(match s {
        StrategyArg::None => EveStrategy::None,
        StrategyArg::InterceptZ => EveStrategy::InterceptZ,
        StrategyArg::W1 => EveStrategy::InterceptRandomBasis,
        StrategyArg::W2 => EveStrategy::InterceptX,
        StrategyArg::Gentle => EveStrategy::gentle_default(epsilon)?,
    })
}

/// Runs a command and returns the rendered output.
pub fn run(cmd: &Command) -> Result<String, CliError> {
    match cmd {
        Command::Leakage { ensemble, opt, grid } => {
            let e = io::load_ensemble(ensemble)?;
            let est = maximal_quantum_leakage(&e, &opt.config()?)?;
            let oracle = grid.map(|n| mql_grid_oracle_d2(&e, n)).transpose()?;
            Ok(to_json(&io::LeakageReportJson {
                estimate: io::EstimateJson::from_estimate(&est),
                grid_oracle: oracle.as_ref().map(io::EstimateJson::from_estimate),
            }))
        }
        Command::LowerBound { ensemble, alpha, opt } => sweep_csv(ensemble, alpha, *opt),
        Command::Figure2 { ensemble, grid, opt } => {
            if *grid < 2 {
                return Err(CliError::Input(format!("--grid must be at least 2, got {grid}")));
            }
            sweep_csv(ensemble, &unit_grid(*grid), *opt)
        }
        Command::Certify {
            ensemble,
            povm,
            alpha,
            delta,
            mode,
        } => {
            let e = io::load_ensemble(ensemble)?;
            let raw = io::load_povm(povm)?;
            let spec = GentlenessSpec::new(*alpha, *delta)?;
            let imp = raw
                .to_implementation()
                .map_err(|m| CliError::Input(format!("{}: {m}", povm.display())))?
                .ok_or_else(|| {
                    CliError::Semantic(format!(
                        "{}: no implementation given; certification needs the operators B_y",
                        povm.display()
                    ))
                })?;
            if imp.dim() != e.dim() {
                return Err(CliError::Semantic(format!(
                    "POVM acts on dimension {} but the ensemble has dimension {}",
                    imp.dim(),
                    e.dim()
                )));
            }
            let report = certify_gentle(&e, &imp, spec, (*mode).into())?;
            Ok(to_json(&io::CertificationJson::from_report(&report)))
        }
        Command::Depolarize { ensemble, p, opt } => {
            let e = io::load_ensemble(ensemble)?;
            let cfg = opt.config()?;
            let base = maximal_quantum_leakage(&e, &cfg)?.bits;
            let mut rows = Vec::with_capacity(p.len());
            for &pv in p {
                let dp = DepolarizingParam::new(pv)?;
                let bits = maximal_quantum_leakage(&e.depolarize(dp), &cfg)?.bits;
                rows.push(vec![pv, bits, depolarized_leakage(base, dp)]);
            }
            Ok(csv("p,leakage_bits,closed_form_bits", rows))
        }
        Command::Simulate {
            strategy: s,
            epsilon,
            rounds,
            seed,
        } => {
            let st = strategy(*s, *epsilon)?;
            let report = run_simulation(&st, *rounds, *seed)?;
            let exact = exact_round_statistics(&st)?;
            let eps = matches!(s, StrategyArg::Gentle).then_some(*epsilon);
            Ok(to_json(&io::SimReportJson::new(&report, eps, exact)))
        }
        Command::Tradeoff { epsilon, rounds, seed } => {
            let rows = tradeoff_sweep(epsilon, *rounds, *seed)?;
            Ok(csv(
                "epsilon,qber,leakage_bits,mean_disturbance",
                rows.iter().map(|r| vec![r.epsilon, r.qber, r.leakage_bits, r.mean_disturbance]),
            ))
        }
        Command::Interval {
            ensemble,
            alpha,
            delta,
            mode,
            opt,
        } => {
            let e = io::load_ensemble(ensemble)?;
            let spec = GentlenessSpec::new(*alpha, *delta)?;
            let iv = gentle_leakage_interval(&e, spec, &opt.config()?, (*mode).into())?;
            Ok(to_json(&io::IntervalJson::new(&iv, (*mode).into())))
        }
        Command::Bb84Ensemble => Ok(to_json(&io::EnsembleJson::from_ensemble(&bb84_ensemble()))),
    }
}

/// Runs the command and delivers its output to `--out` or stdout.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let text = run(&cli.command)?;
    match &cli.out {
        Some(path) => io::write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
