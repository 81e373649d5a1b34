use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cgn::experiments::{run_compare, run_enumerate, run_generate, run_lemma1, run_sweep, ExperimentConfig};
use cgn::Result;

#[derive(Parser)]
#[command(version, about = "Capacity-balanced clustering of dense wireless networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place base stations and users and write nodes.csv.
    Generate(Common),
    /// Run every method on independent networks and write per-run artifacts.
    Compare(Common),
    /// Repeat the comparison over the configured side lengths.
    Sweep(Common),
    /// Measure the decay of the interference off-diagonal terms.
    Lemma1(Common),
    /// Compare the refinement with exhaustive search on toy instances.
    Enumerate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.output_dir = Some(self.out.clone());
        config.validate()?;
        Ok(config)
    }
}

fn run(command: &Command) -> Result<String> {
    match command {
        Command::Generate(c) => {
            let net = run_generate(&c.load()?)?;
            Ok(format!("{} base stations, {} users", net.num_bs(), net.num_users()))
        }
        Command::Compare(c) => {
            let outcome = run_compare(&c.load()?)?;
            Ok(outcome
                .summary
                .iter()
                .map(|r| {
                    format!(
                        "{:<14} c_min {:.4}  c_avg {:.4}  c_var {:.5}  ({} reps)",
                        r.method, r.c_min_mean, r.c_avg_mean, r.c_var_mean, r.reps
                    )
                })
                .collect::<Vec<_>>()
                .join("\n"))
        }
        Command::Sweep(c) => {
            let outcome = run_sweep(&c.load()?)?;
            Ok(format!("{} sweep rows written", outcome.rows.len()))
        }
        Command::Lemma1(c) => Ok(run_lemma1(&c.load()?)?
            .iter()
            .map(|r| format!("M_l {:>3}  outside {:>6}  ratio {:.4}", r.cluster_bs, r.outside_users, r.ratio_mean))
            .collect::<Vec<_>>()
            .join("\n")),
        Command::Enumerate(c) => {
            let s = run_enumerate(&c.load()?)?;
            Ok(format!(
                "{}/{} instances matched exhaustive search, {} violations",
                s.matches, s.instances, s.violations
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(message) => {
            println!("{message}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
