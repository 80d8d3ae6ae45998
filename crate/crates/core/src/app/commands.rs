use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use super::config::{ConfigError, EngineConfig};
use super::engine::{resolve_wall_clock, Engine, Summary};
use super::output::DeviceOutputs;
use crate::ingestion::{parse_weather_line, WeatherCell};
use crate::invariant::Tick;
use crate::lineproto::content_lines;
use crate::notification::{parse_command_list, render_xml, NotificationError};
use crate::pipeline::{EventRecord, Intake};

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Notification(#[from] NotificationError),
}

impl AppError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Process exit codes: quiet, error, triggered.
pub const EXIT_QUIET: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_TRIGGERED: u8 = 2;

/// Evaluates every rule once at `at` against the static model. Returns the
/// XML for the triggered reactions and whether anything triggered.
pub fn check(config: &EngineConfig, at: Tick) -> Result<(String, bool), AppError> {
    let engine = Engine::load(config)?;
    let reactions = engine.evaluate_at(at);
    let bindings: Vec<_> = reactions
        .iter()
        .flat_map(|r| engine.reaction_bindings(r))
        .collect();
    Ok((render_xml(&bindings), !reactions.is_empty()))
}

/// Parsed replay inputs, grouped by tick.
#[derive(Debug, Default)]
pub struct ReplayInput {
    pub events: BTreeMap<Tick, Vec<EventRecord>>,
    pub weather: BTreeMap<Tick, Vec<WeatherCell>>,
    pub events_skipped: usize,
    pub weather_skipped: usize,
}

impl ReplayInput {
    /// Reads event and weather text. Bad lines are logged and counted.
    pub fn parse(events: &str, weather: &str, config: &EngineConfig) -> Self {
        let mut input = ReplayInput::default();
        let intake = Intake::new();
        let resolve = |l: &str| resolve_wall_clock(l, &config.epoch, config.tick_seconds);
        for (n, line) in content_lines(events) {
            match resolve(line).and_then(|l| intake.accept(&l).map_err(|e| e.to_string())) {
                Ok(e) => input.events.entry(e.timestamp).or_default().push(e),
                Err(msg) => {
                    log::warn!("event line {n} skipped: {msg}");
                    input.events_skipped += 1;
                }
            }
        }
        for (n, line) in content_lines(weather) {
            match resolve(line).and_then(|l| parse_weather_line(&l).map_err(|e| e.to_string())) {
                Ok(c) => input.weather.entry(c.tick).or_default().push(c),
                Err(msg) => {
                    log::warn!("weather line {n} skipped: {msg}");
                    input.weather_skipped += 1;
                }
            }
        }
        input
    }
}

/// Runs the whole pipeline over recorded inputs in tick order and writes
/// one XML file per device under the output directory, replacing earlier
/// runs.
pub fn replay(config: &EngineConfig, input: ReplayInput) -> Result<Summary, AppError> {
    let mut engine = Engine::load(config)?;
    let out = DeviceOutputs::new(&config.out_dir, engine.registry())
        .map_err(|e| AppError::io(&config.out_dir, e))?;
    out.truncate(engine.registry())
        .map_err(|e| AppError::io(&config.out_dir, e))?;
    replay_with(&mut engine, input, &out)?;
    Ok(engine.summary())
}

/// Replay on an already loaded engine.
pub fn replay_with(
    engine: &mut Engine,
    mut input: ReplayInput,
    out: &DeviceOutputs,
) -> Result<(), AppError> {
    engine.summary_mut().events_skipped += input.events_skipped;
    engine.summary_mut().weather_skipped += input.weather_skipped;
    let ticks: Vec<Tick> = input
        .events
        .keys()
        .chain(input.weather.keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let write = |batches: Vec<Vec<_>>| -> Result<(), AppError> {
        for b in batches {
            out.write_batch(&b)
                .map_err(|e| AppError::io(out.dir(), e))?;
        }
        Ok(())
    };
    for t in ticks {
        engine.ingest_weather(input.weather.remove(&t).unwrap_or_default());
        write(engine.advance_to(t))?;
        engine.ingest_events(input.events.remove(&t).unwrap_or_default());
    }
    write(engine.finish())
}

pub fn replay_files(
    config: &EngineConfig,
    events: &Path,
    weather: &Path,
) -> Result<Summary, AppError> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| AppError::io(p, e));
    let input = ReplayInput::parse(&read(events)?, &read(weather)?, config);
    replay(config, input)
}

/// Renders a text command list as XML.
pub fn render(commands: &str) -> Result<String, AppError> {
    Ok(render_xml(&parse_command_list(commands)?))
}

pub fn write_stdout(text: &str) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()
}
