mod error;
mod involvement;
mod prepare;
mod run;
mod weight_report;

use clap::{Parser, Subcommand};

use error::CliError;

/// Structure-learning GNN experiments on noisy, sparsely labeled graphs.
#[derive(Debug, Parser)]
#[command(name = "rsgnn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a dataset directory from a synthetic generator or citation files.
    Prepare(prepare::PrepareArgs),
    /// Train every (variant × grid point × seed) combination.
    Run(Box<run::RunArgs>),
    /// Histogram learned edge weights of one run, split by noise ground truth.
    WeightReport(weight_report::WeightReportArgs),
    /// Uninvolved-node rate versus label rate and graph density.
    Involvement(involvement::InvolvementArgs),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result: Result<(), CliError> = match cli.command {
        Command::Prepare(a) => prepare::run(&a),
        Command::Run(a) => run::run(&a),
        Command::WeightReport(a) => weight_report::run(&a),
        Command::Involvement(a) => involvement::run(&a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
