use clap::{Args, Parser, Subcommand};
use dirode_cli::{dispatch, init_threads, load_config, ConfigError, Problem, RunConfig, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Directional-ODE solver experiments.
#[derive(Parser, Debug)]
#[command(name = "dirode", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Viscous Burgers equation against the analytic solution.
    Burgers(Flags),
    /// 1D heat equation against the decaying sine mode.
    Diffuse1d(Flags),
    /// Nonlinear particle spreading in a 2D wind field.
    Particles2d(Flags),
    /// Channel / back-step flow in streamfunction-vorticity form.
    NavierStokes(Flags),
    /// Expected diffusion update under a uniform random diffusivity.
    Stochastic(Flags),
    /// Long-step limits of the temporal scheme for orders 0 to 2.
    StabilityCheck(Flags),
    /// Observed orders of Lie and Strang splitting.
    SplitOrder(Flags),
    /// Runs whatever problem the config file names.
    Run {
        #[arg(value_name = "CONFIG")]
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scheme: Option<String>,
    /// Convergence ladder as `param:rung,rung,...`, param is dt or nx.
    #[arg(long)]
    ladder: Option<String>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn build(problem: Option<Problem>, config: Option<PathBuf>, flags: &Flags) -> Result<RunConfig, RunError> {
    let mut cfg = match &config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = problem {
        match cfg.problem {
            Some(q) if q != p => {
                return Err(RunError::Config(ConfigError::Validation {
                    key: "problem".into(),
                    reason: format!("config names {q} but the subcommand is {p}"),
                }))
            }
            _ => cfg.problem = Some(p),
        }
    }
    if flags.out.is_some() {
        cfg.out = flags.out.clone();
    }
    if flags.seed.is_some() {
        cfg.seed = flags.seed;
    }
    if flags.scheme.is_some() {
        cfg.scheme = flags.scheme.clone();
    }
    if flags.ladder.is_some() {
        cfg.ladder = flags.ladder.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (problem, config, flags) = match cli.command {
        Command::Burgers(f) => (Some(Problem::Burgers), f.config.clone(), f),
        Command::Diffuse1d(f) => (Some(Problem::Diffuse1d), f.config.clone(), f),
        Command::Particles2d(f) => (Some(Problem::Particles2d), f.config.clone(), f),
        Command::NavierStokes(f) => (Some(Problem::NavierStokes), f.config.clone(), f),
        Command::Stochastic(f) => (Some(Problem::Stochastic), f.config.clone(), f),
        Command::StabilityCheck(f) => (Some(Problem::StabilityCheck), f.config.clone(), f),
        Command::SplitOrder(f) => (Some(Problem::SplitOrder), f.config.clone(), f),
        Command::Run { file, flags } => {
            if flags.config.is_some() {
                eprintln!("error: `run` takes the config as its argument, not --config");
                return ExitCode::from(1);
            }
            (None, Some(file), flags)
        }
    };
    let quiet = flags.quiet;
    let result = init_threads().and_then(|_| build(problem, config, &flags)).and_then(|cfg| dispatch(&cfg));
    match result {
        Ok(m) => {
            if !quiet {
                println!("{} finished in {:.3} s", m.problem, m.duration_seconds);
                for (k, v) in &m.metrics {
                    println!("  {k} = {v}");
                }
            }
            for (k, v) in &m.metrics {
                if k.ends_with(".monotone") && v == "false" {
                    eprintln!("warning: {k}: error ladder is not monotone");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Cli;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
