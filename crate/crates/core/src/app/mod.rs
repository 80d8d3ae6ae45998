//! Configuration and the check / replay / serve / render workflows.

mod commands;
mod config;
mod engine;
mod output;
mod serve;

pub use commands::{
    check, render, replay, replay_files, replay_with, write_stdout, AppError, ReplayInput,
    EXIT_ERROR, EXIT_QUIET, EXIT_TRIGGERED,
};
pub use config::{ConfigError, ConfigOverrides, EngineConfig, OUT_DIR_ENV};
pub use engine::{load_models, resolve_wall_clock, Engine, Summary};
pub use output::DeviceOutputs;
pub use serve::{serve, start, ServeHandle};
