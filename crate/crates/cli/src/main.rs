//! `danzer`: command-line front end for the experiment drivers.
//!
//! Exit status: 0 when the run found what it looked for (a concentration
//! witness, all properties holding), 2 for a negative outcome (a gap
//! certificate, an empty box, a failed property), 1 on errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use danzer_core::harness::{self, Experiment, ExperimentConfig, Format, EXIT_ERROR};

#[derive(Parser, Debug)]
#[command(name = "danzer", version, about = "Witness growing and ε-net experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow a convex set of volume s holding n points.
    Witness,
    /// The volume-target induction.
    Proof2,
    /// One ε-net stress run.
    Stress,
    /// Stress runs over a list of ε.
    Sweep,
    /// Random volume-1 aligned boxes against a lattice.
    Boxes,
    /// Chabauty–Fell metric property suite.
    Metric,
    /// Approximate the x_1-axis inside the orbit of a net.
    Linebuild,
    /// Print the ε-schedule and bounds.
    Schedule {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Volume for the diameter bound.
        #[arg(long)]
        s: Option<f64>,
    },
}

impl Command {
    fn experiment(&self) -> Experiment {
        match self {
            Command::Witness => Experiment::Witness,
            Command::Proof2 => Experiment::Proof2,
            Command::Stress => Experiment::Stress,
            Command::Sweep => Experiment::Sweep,
            Command::Boxes => Experiment::Boxes,
            Command::Metric => Experiment::Metric,
            Command::Linebuild => Experiment::Linebuild,
            Command::Schedule { .. } => Experiment::Schedule,
        }
    }
}

fn load(cli: &Cli) -> danzer_core::Result<ExperimentConfig> {
    let experiment = cli.command.experiment();
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::from_path(path)?;
            if cfg.experiment != experiment {
                return Err(danzer_core::Error::Config {
                    field: "experiment".into(),
                    message: format!(
                        "config is for `{}`, not `{}`",
                        cfg.experiment.name(),
                        experiment.name()
                    ),
                });
            }
            cfg
        }
        None => ExperimentConfig::new(experiment),
    };
    if let Command::Schedule { d, n, s } = &cli.command {
        cfg.d = d.or(cfg.d);
        cfg.params.n = n.or(cfg.params.n);
        cfg.params.s = s.or(cfg.params.s);
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = Some(match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        });
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| {
        let report = harness::run(&cfg)?;
        let format = cfg.output.format.unwrap_or(report.default_format);
        report.write(cfg.output.path.as_deref(), format)?;
        eprintln!("{}: {}", cfg.experiment.name(), report.summary);
        Ok(report.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
