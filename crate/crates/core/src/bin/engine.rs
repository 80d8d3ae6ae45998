use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use decision_engine::app::{
    self, ConfigOverrides, EngineConfig, EXIT_ERROR, EXIT_QUIET, EXIT_TRIGGERED,
};

#[derive(Parser)]
#[command(
    name = "engine",
    version,
    about = "Spatio-temporal rule checking and notification routing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    coalesce_window: Option<i64>,
    #[arg(long)]
    queue_capacity: Option<usize>,
    #[arg(long)]
    horizon: Option<i64>,
    #[arg(long)]
    listen_port: Option<u16>,
    #[arg(long)]
    weather_port: Option<u16>,
}

impl ConfigArgs {
    fn load(&self) -> Result<EngineConfig, app::AppError> {
        let mut cfg = EngineConfig::load(&self.config)?;
        cfg.apply(&ConfigOverrides {
            out_dir: self.out_dir.clone(),
            listen_port: self.listen_port,
            weather_port: self.weather_port,
            coalesce_window: self.coalesce_window,
            queue_capacity: self.queue_capacity,
            horizon: self.horizon,
        });
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate all rules once; exit 0 quiet, 2 triggered, 1 on error.
    Check {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        at: i64,
    },
    /// Run recorded event and weather files through the pipeline.
    Replay {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        weather: PathBuf,
    },
    /// Listen for event and weather lines until SIGINT/SIGTERM.
    Serve {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Render a text command list as XML.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn run(cli: Cli) -> Result<u8, app::AppError> {
    match cli.command {
        Command::Check { config, at } => {
            let (xml, triggered) = app::check(&config.load()?, at)?;
            app::write_stdout(&xml).map_err(|e| app::AppError::Io {
                path: "stdout".into(),
                source: e,
            })?;
            Ok(if triggered {
                EXIT_TRIGGERED
            } else {
                EXIT_QUIET
            })
        }
        Command::Replay {
            config,
            events,
            weather,
        } => {
            let summary = app::replay_files(&config.load()?, &events, &weather)?;
            println!("{summary}");
            Ok(EXIT_QUIET)
        }
        Command::Serve { config } => {
            let cfg = config.load()?;
            let stop = Arc::new(AtomicBool::new(false));
            for sig in [signal_hook::consts::SIGTERM, signal_hook::consts::SIGINT] {
                signal_hook::flag::register(sig, Arc::clone(&stop)).map_err(|e| {
                    app::AppError::Io {
                        path: "signal handler".into(),
                        source: e,
                    }
                })?;
            }
            let summary = app::serve(&cfg, stop)?;
            println!("{summary}");
            Ok(EXIT_QUIET)
        }
        Command::Render { input } => {
            let text = std::fs::read_to_string(&input).map_err(|e| app::AppError::Io {
                path: input,
                source: e,
            })?;
            let xml = app::render(&text)?;
            app::write_stdout(&xml).map_err(|e| app::AppError::Io {
                path: "stdout".into(),
                source: e,
            })?;
            Ok(EXIT_QUIET)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
