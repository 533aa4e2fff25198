// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinloc::harness::{
    self, constraint_report, emit_results, Chi, ExperimentConfig, OutputFormat, Report, ScalingParams,
};
use spinloc::operator::Site;
use spinloc::Error;

#[derive(Parser)]
#[command(name = "spinloc", version, about = "Localization diagnostics for disordered spin chains")]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides the configured one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    CsvJson,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChiArg {
    FourPow,
    One,
}

#[derive(Args)]
struct One {
    /// Realization index.
    #[arg(long, default_value_t = 0)]
    realization: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Builds one realization and lists its terms.
    Build(One),
    /// Pauli commutator estimator of one realization on the time grid.
    Evolve {
        #[command(flatten)]
        one: One,
        /// Sites of X.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<Site>,
        /// Sites of Y.
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<Site>,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = ChiArg::FourPow)]
        chi: ChiArg,
    },
    /// Disorder-averaged estimator against distance with a decay fit.
    Localize,
    /// Transmission-time sweep over chain sizes.
    Ttime,
    /// LIOM profiles and two-point kernel of one realization.
    Lioms(One),
    /// Interaction-picture commutator against the contracted-lattice bound.
    Lrbound(One),
    /// Minimum level-spacing statistics of the Ising ensemble.
    Gaps,
    /// Constraint calculator; reads [scaling] from the config or the flags.
    Report(ScalingArgs),
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    p_zero: Option<f64>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::UnsupportedDimension(_) => 2,
        Error::Resource(_) => 3,
        Error::Numerical(_) | Error::Resolution(_) => 4,
        Error::Io(_) => 1,
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required for this command".into()))?;
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn write<R: Report>(cli: &Cli, cfg: &ExperimentConfig, report: &R, start: Instant, summary: String) -> Result<(), Error> {
    let dir = cli.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let format = match cli.format {
        Format::Csv => OutputFormat::Csv,
        Format::CsvJson => OutputFormat::CsvJson,
    };
    let manifest = emit_results(report, cfg, &dir, format, start.elapsed().as_secs_f64())?;
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    println!("{summary}");
    println!("wrote {}", dir.join("manifest.json").display());
    Ok(())
}

fn scaling_from(cli: &Cli, args: &ScalingArgs) -> Result<ScalingParams, Error> {
    if let (Some(alpha), Some(gamma), Some(eta), Some(p_zero)) = (args.alpha, args.gamma, args.eta, args.p_zero) {
        return Ok(ScalingParams {
            alpha,
            beta: args.beta,
            gamma,
            eta,
            p_zero,
            theta: None,
            sigma: None,
            lambda_split: None,
            nu: None,
            xi: None,
            kappa: None,
        });
    }
    load(cli)?.scaling.ok_or_else(|| Error::Config("give --alpha --gamma --eta --p-zero or a [scaling] section".into()))
}

fn run(cli: &Cli) -> Result<(), Error> {
    let start = Instant::now();
    match &cli.command {
        Command::Build(one) => {
            let cfg = load(cli)?;
            let r = harness::run_build(&cfg, one.realization)?;
            let s = format!("dimension {}, {} terms, spectrum [{}, {}]", r.dimension, r.terms.len(), r.energy_min, r.energy_max);
            write(cli, &cfg, &r, start, s)
        }
        Command::Evolve { one, x, y, beta, chi } => {
            let cfg = load(cli)?;
            let chi = match chi {
                ChiArg::FourPow => Chi::FourPow,
                ChiArg::One => Chi::One,
            };
            let r = harness::run_evolve(&cfg, one.realization, x, y, *beta, chi)?;
            let s = format!("sup over grid {}", r.sup);
            write(cli, &cfg, &r, start, s)
        }
        Command::Localize => {
            let cfg = load(cli)?;
            let r = harness::run_localization_experiment(&cfg)?;
            let s = match &r.fit {
                Some(f) => format!("eta = {} (se {}, 95% CI [{}, {}])", f.eta, f.se, f.ci_low, f.ci_high),
                None => "no decay fit".into(),
            };
            write(cli, &cfg, &r, start, s)
        }
        Command::Ttime => {
            let cfg = load(cli)?;
            let r = harness::run_transmission_scaling(&cfg, cfg.epsilon_schedule()?)?;
            let s = r
                .rows
                .iter()
                .map(|row| format!("n={} median={} censored={}", row.n, row.median, row.censored_fraction))
                .collect::<Vec<_>>()
                .join("\n");
            write(cli, &cfg, &r, start, s)
        }
        Command::Lioms(one) => {
            let cfg = load(cli)?;
            let r = harness::run_lioms(&cfg, one.realization)?;
            let s = format!("{} second-kind LIOMs", r.profiles.len());
            write(cli, &cfg, &r, start, s)
        }
        Command::Lrbound(one) => {
            let cfg = load(cli)?;
            let r = harness::run_lrbound(&cfg, one.realization)?;
            let s = format!("{} grid points, {} violations", r.rows.len(), r.violations(1e-8));
            write(cli, &cfg, &r, start, s)
        }
        Command::Gaps => {
            let cfg = load(cli)?;
            let r = harness::run_gap_statistics(&cfg)?;
            let s = format!("{} realizations, {} zero-gap events", r.min_gaps.len(), r.zero_gap_events);
            write(cli, &cfg, &r, start, s)
        }
        Command::Report(args) => {
            let sp = scaling_from(cli, args)?;
            let r = constraint_report(&sp)?;
            let body = serde_json::to_string_pretty(&r).map_err(|e| Error::Numerical(e.to_string()))?;
            println!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
