use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use iloca::engine::{IlocaConfig, Mode};
use iloca::report::{
    cmd_aggregate, cmd_impute, cmd_simulate_clustering, cmd_simulate_imputation, AggregateOptions,
    ClusteringStudyOptions, ImputationStudyOptions, ImputeOptions,
};
use iloca::simgen::{ColumnLaw, DgpKind, ResponseModel};

const DEFAULT_SEED: u64 = 2024;

#[derive(Parser)]
#[command(
    name = "iloca",
    version,
    about = "Cluster contingency-table cells into imputation groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate the small cells of a count table.
    Aggregate {
        /// CSV count table.
        input: PathBuf,
        /// Dataset CSV supplying respondent means and SDs (imputation mode).
        #[arg(long)]
        stats: Option<PathBuf>,
        #[command(flatten)]
        iloca: IlocaArgs,
        #[arg(long, default_value = "frequency")]
        mode: ModeArg,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Aggregate a dataset's class table and impute missing responses.
    Impute {
        /// Dataset CSV.
        input: PathBuf,
        #[command(flatten)]
        iloca: IlocaArgs,
        #[arg(long, default_value = "imputation")]
        mode: ModeArg,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a seeded simulation study.
    Simulate {
        #[command(subcommand)]
        study: Study,
    },
}

#[derive(Subcommand)]
enum Study {
    /// Clustering of synthetic tables.
    Clustering {
        #[arg(long, default_value_t = 8)]
        rows: usize,
        #[arg(long, default_value_t = 5)]
        cols: usize,
        #[arg(long, default_value = "uniform")]
        law: LawArg,
        #[arg(long, default_value_t = 480)]
        n_obs: usize,
        #[command(flatten)]
        iloca: IlocaArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Imputation error of IlocA cells against baselines.
    Imputation {
        #[arg(long, default_value = "1")]
        dgp: DgpArg,
        #[arg(long, default_value = "1")]
        response_model: ModelArg,
        #[arg(long, default_value_t = 0.75)]
        rate: f64,
        #[arg(long)]
        misspec: bool,
        /// Calibrate the response intercept to the target rate
        /// (default: on for DGP2, off for DGP1).
        #[arg(long, overrides_with = "no_calibrate")]
        calibrate: bool,
        #[arg(long, overrides_with = "calibrate")]
        no_calibrate: bool,
        #[command(flatten)]
        iloca: IlocaArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct IlocaArgs {
    #[arg(long, default_value_t = 20.0)]
    min_cell_size: f64,
    #[arg(long, default_value_t = 20)]
    max_steps: usize,
    #[arg(long, default_value_t = 0.05)]
    k_proportion: f64,
    /// Keep the threshold fixed at the minimum cell size.
    #[arg(long)]
    no_relaxation: bool,
}

impl IlocaArgs {
    fn config(&self, mode: Mode) -> IlocaConfig {
        IlocaConfig {
            min_cell_size: self.min_cell_size,
            max_steps: self.max_steps,
            k_proportion: self.k_proportion,
            mode,
            relaxation: !self.no_relaxation,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, env = "ILOCA_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Frequency,
    Imputation,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Frequency => Mode::Frequency,
            ModeArg::Imputation => Mode::Imputation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Uniform,
    Lognormal,
}

#[derive(Clone, Copy, ValueEnum)]
enum DgpArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

fn run(cli: Cli) -> iloca::Result<()> {
    match cli.command {
        Command::Aggregate {
            input,
            stats,
            iloca,
            mode,
            out,
        } => {
            cmd_aggregate(&AggregateOptions {
                input,
                stats,
                iloca: iloca.config(mode.into()),
                out,
            })?;
        }
        Command::Impute {
            input,
            iloca,
            mode,
            out,
        } => {
            cmd_impute(&ImputeOptions {
                input,
                iloca: iloca.config(mode.into()),
                out,
            })?;
        }
        Command::Simulate {
            study:
                Study::Clustering {
                    rows,
                    cols,
                    law,
                    n_obs,
                    iloca,
                    run,
                },
        } => {
            cmd_simulate_clustering(&ClusteringStudyOptions {
                rows,
                cols,
                law: match law {
                    LawArg::Uniform => ColumnLaw::Uniform,
                    LawArg::Lognormal => ColumnLaw::Lognormal,
                },
                n_obs,
                iloca: iloca.config(Mode::Frequency),
                reps: run.reps,
                seed: run.seed,
                out: run.out,
            })?;
        }
        Command::Simulate {
            study:
                Study::Imputation {
                    dgp,
                    response_model,
                    rate,
                    misspec,
                    calibrate,
                    no_calibrate,
                    iloca,
                    run,
                },
        } => {
            // The two flags override each other; the last one given wins.
            let calibrate = if calibrate {
                Some(true)
            } else {
                no_calibrate.then_some(false)
            };
            cmd_simulate_imputation(&ImputationStudyOptions {
                dgp: match dgp {
                    DgpArg::One => DgpKind::Dgp1,
                    DgpArg::Two => DgpKind::Dgp2,
                },
                response_model: match response_model {
                    ModelArg::One => ResponseModel::Rm1,
                    ModelArg::Two => ResponseModel::Rm2,
                },
                rate,
                misspec,
                calibrate,
                iloca: iloca.config(Mode::Imputation),
                reps: run.reps,
                seed: run.seed,
                out: run.out,
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
