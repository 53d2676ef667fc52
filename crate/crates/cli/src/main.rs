use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hermheat_cli::config::canonicalize;
use hermheat_cli::runner::resolve_output;
use hermheat_cli::{emit, parse_config, run, validate, Command, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(name = "hermheat", version, about = "Hermite heat-semigroup experiments")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override `output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Parse and validate a config, then print its canonical form.
    Check { config: PathBuf },
    /// Print a config with every default for a command.
    Defaults {
        command: CommandArg,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CommandArg {
    Transform,
    Semigroup,
    Norm,
    Decay,
    Smoothing,
    Solve,
    Blowup,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Transform => Command::Transform,
            CommandArg::Semigroup => Command::Semigroup,
            CommandArg::Norm => Command::Norm,
            CommandArg::Decay => Command::Decay,
            CommandArg::Smoothing => Command::Smoothing,
            CommandArg::Solve => Command::Solve,
            CommandArg::Blowup => Command::Blowup,
        }
    }
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError {
        kind: hermheat_cli::ErrorKind::Io,
        message: format!("{}: {e}", path.display()),
    })?;
    let mut cfg = parse_config(&text)?;
    resolve_output(&mut cfg, path);
    Ok(cfg)
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.action {
        Action::Run { config, output_dir } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            match run(&cfg) {
                Ok(m) => {
                    for a in &m.artifacts {
                        println!("{}  {}", a.sha256, cfg.output_dir.join(&a.file).display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Action::Check { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    return fail(RunError {
                        kind: hermheat_cli::ErrorKind::Io,
                        message: format!("{}: {e}", config.display()),
                    })
                }
            };
            let canonical = match canonicalize(&text) {
                Ok(c) => c,
                Err(e) => return fail(e.into()),
            };
            match parse_config(&canonical).map_err(RunError::from).and_then(|c| validate(&c)) {
                Ok(()) => {
                    print!("{canonical}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Action::Defaults { command, output_dir } => {
            print!("{}", emit(&ExperimentConfig::with_defaults(command.into(), output_dir)));
            ExitCode::SUCCESS
        }
    }
}
