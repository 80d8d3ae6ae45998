use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::decision::ConfidenceCheck;
use crate::invariant::Tick;
use crate::lineproto::content_lines;
use crate::pipeline::{DEFAULT_COALESCE_WINDOW, DEFAULT_QUEUE_CAPACITY};
use crate::reasoning::DEFAULT_DECOMPOSITION_CAP;

pub const OUT_DIR_ENV: &str = "ENGINE_OUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("missing required setting {0:?}")]
    Missing(&'static str),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("{path}: line {line}: {message}")]
    Load {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
}

/// Engine settings, read from a flat `key = value` file.
///
/// ```text
/// models = model.bsp, zones.bsp
/// rules = rules.txt
/// profiles = profiles.txt
/// devices = devices.txt
/// coalesce_window = 5
/// out_dir = out
/// ```
///
/// Relative paths are taken from the directory holding the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub model_files: Vec<PathBuf>,
    pub rule_file: PathBuf,
    pub profile_file: PathBuf,
    pub registry_file: PathBuf,
    pub queue_capacity: usize,
    pub coalesce_window_ticks: Tick,
    /// Largest rule area, in lattice points, the engine accepts.
    pub decomposition_cap: u128,
    /// How long a weather cell stays valid.
    pub horizon_ticks: Tick,
    pub tick_seconds: i64,
    /// RFC 3339 instant of tick 0.
    pub epoch: String,
    pub listen_host: String,
    pub listen_port: Option<u16>,
    /// Defaults to `listen_port + 1`.
    pub weather_port: Option<u16>,
    pub batch_interval_ms: u64,
    pub confidence: ConfidenceCheck,
    pub out_dir: PathBuf,
}

impl EngineConfig {
    /// Settings with defaults everywhere except the four input files.
    pub fn with_files(
        model_files: Vec<PathBuf>,
        rule_file: PathBuf,
        profile_file: PathBuf,
        registry_file: PathBuf,
    ) -> Self {
        EngineConfig {
            model_files,
            rule_file,
            profile_file,
            registry_file,
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
            coalesce_window_ticks: DEFAULT_COALESCE_WINDOW,
            decomposition_cap: DEFAULT_DECOMPOSITION_CAP,
            horizon_ticks: 10,
            tick_seconds: 60,
            epoch: "1970-01-01T00:00:00Z".into(),
            listen_host: "127.0.0.1".into(),
            listen_port: None,
            weather_port: None,
            batch_interval_ms: 100,
            confidence: ConfidenceCheck::default(),
            out_dir: PathBuf::from("out"),
        }
    }

    /// Parses config text; `base` resolves relative paths.
    pub fn parse(text: &str, base: &Path, origin: &Path) -> Result<Self, ConfigError> {
        let mut models = None;
        let (mut rules, mut profiles, mut devices) = (None, None, None);
        let mut rest: Vec<(usize, String, String)> = Vec::new();
        for (line, raw) in content_lines(text) {
            let syntax = |message: String| ConfigError::Syntax {
                path: origin.to_path_buf(),
                line,
                message,
            };
            let (k, v) = raw
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected key = value, found {raw:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            let path = |v: &str| base.join(v);
            match k {
                "models" => {
                    models = Some(
                        v.split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(path)
                            .collect::<Vec<_>>(),
                    )
                }
                "rules" => rules = Some(path(v)),
                "profiles" => profiles = Some(path(v)),
                "devices" => devices = Some(path(v)),
                _ => rest.push((line, k.to_string(), v.to_string())),
            }
        }
        let mut cfg = EngineConfig::with_files(
            models.unwrap_or_default(),
            rules.ok_or(ConfigError::Missing("rules"))?,
            profiles.ok_or(ConfigError::Missing("profiles"))?,
            devices.ok_or(ConfigError::Missing("devices"))?,
        );
        for (line, k, v) in rest {
            cfg.set(&k, &v, base).map_err(|e| match e {
                ConfigError::Invalid { key, message } => ConfigError::Syntax {
                    path: origin.to_path_buf(),
                    line,
                    message: format!("{key}: {message}"),
                },
                e => e,
            })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str, base: &Path) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
            v.parse().map_err(|_| ConfigError::Invalid {
                key: key.into(),
                message: format!("not a number: {v:?}"),
            })
        }
        match key {
            "queue_capacity" => self.queue_capacity = num(key, v)?,
            "coalesce_window" => self.coalesce_window_ticks = num(key, v)?,
            "decomposition_cap" => self.decomposition_cap = num(key, v)?,
            "horizon" => self.horizon_ticks = num(key, v)?,
            "tick_seconds" => self.tick_seconds = num(key, v)?,
            "epoch" => self.epoch = v.to_string(),
            "listen_host" => self.listen_host = v.to_string(),
            "listen_port" => self.listen_port = Some(num(key, v)?),
            "weather_port" => self.weather_port = Some(num(key, v)?),
            "batch_interval_ms" => self.batch_interval_ms = num(key, v)?,
            "confidence_min" => self.confidence.min_corroborating = num(key, v)?,
            "confidence_radius" => self.confidence.radius = num(key, v)?,
            "confidence_window" => self.confidence.window = num(key, v)?,
            "out_dir" => self.out_dir = base.join(v),
            _ => {
                return Err(ConfigError::Invalid {
                    key: key.into(),
                    message: "unknown setting".into(),
                })
            }
        }
        Ok(())
    }

    /// Reads a config file, then applies `ENGINE_OUT_DIR` if set.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = EngineConfig::parse(&text, base, path)?;
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
            cfg.out_dir = PathBuf::from(dir);
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &ConfigOverrides) {
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
        if let Some(p) = o.listen_port {
            self.listen_port = Some(p);
        }
        if let Some(p) = o.weather_port {
            self.weather_port = Some(p);
        }
        if let Some(w) = o.coalesce_window {
            self.coalesce_window_ticks = w;
        }
        if let Some(c) = o.queue_capacity {
            self.queue_capacity = c;
        }
        if let Some(h) = o.horizon {
            self.horizon_ticks = h;
        }
    }

    /// Checks value ranges and that every referenced file exists.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let at_least_one = |key: &str, v: i128| {
            if v < 1 {
                Err(ConfigError::Invalid {
                    key: key.into(),
                    message: format!("must be at least 1, got {v}"),
                })
            } else {
                Ok(())
            }
        };
        at_least_one("queue_capacity", self.queue_capacity as i128)?;
        at_least_one("coalesce_window", self.coalesce_window_ticks.into())?;
        at_least_one(
            "decomposition_cap",
            self.decomposition_cap.min(i128::MAX as u128) as i128,
        )?;
        at_least_one("horizon", self.horizon_ticks.into())?;
        at_least_one("tick_seconds", self.tick_seconds.into())?;
        at_least_one("batch_interval_ms", self.batch_interval_ms.into())?;
        crate::ingestion::tick_from_wall_clock(&self.epoch, &self.epoch, self.tick_seconds)
            .map_err(|e| ConfigError::Invalid {
                key: "epoch".into(),
                message: e.to_string(),
            })?;
        let files = self.model_files.iter().chain([
            &self.rule_file,
            &self.profile_file,
            &self.registry_file,
        ]);
        for f in files {
            if !f.is_file() {
                return Err(ConfigError::File {
                    path: f.clone(),
                    message: "no such file".into(),
                });
            }
        }
        Ok(())
    }

    /// Event and weather ports for serve mode.
    pub fn ports(&self) -> Result<(u16, u16), ConfigError> {
        let listen = self
            .listen_port
            .ok_or(ConfigError::Missing("listen_port"))?;
        let weather = match self.weather_port {
            Some(p) => p,
            None if listen == 0 => 0,
            None => listen.checked_add(1).ok_or_else(|| ConfigError::Invalid {
                key: "weather_port".into(),
                message: "listen_port + 1 overflows".into(),
            })?,
        };
        Ok((listen, weather))
    }
}

/// Command-line settings that win over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub out_dir: Option<PathBuf>,
    pub listen_port: Option<u16>,
    pub weather_port: Option<u16>,
    pub coalesce_window: Option<Tick>,
    pub queue_capacity: Option<usize>,
    pub horizon: Option<Tick>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "\
# smartspace
models = model.bsp, extra.bsp
rules = rules.txt
profiles = profiles.txt
devices = devices.txt
coalesce_window = 3
listen_port = 7000
out_dir = out
";

    #[test]
    fn parses_and_resolves_paths() {
        let cfg = EngineConfig::parse(TEXT, Path::new("/etc/engine"), Path::new("c.conf")).unwrap();
        assert_eq!(
            cfg.model_files,
            [
                PathBuf::from("/etc/engine/model.bsp"),
                PathBuf::from("/etc/engine/extra.bsp")
            ]
        );
        assert_eq!(cfg.rule_file, PathBuf::from("/etc/engine/rules.txt"));
        assert_eq!(cfg.coalesce_window_ticks, 3);
        assert_eq!(cfg.out_dir, PathBuf::from("/etc/engine/out"));
        assert_eq!(cfg.queue_capacity, DEFAULT_QUEUE_CAPACITY);
        assert_eq!(cfg.ports().unwrap(), (7000, 7001));
    }

    #[test]
    fn flags_win() {
        let mut cfg = EngineConfig::parse(TEXT, Path::new("."), Path::new("c.conf")).unwrap();
        cfg.apply(&ConfigOverrides {
            out_dir: Some("/tmp/x".into()),
            coalesce_window: Some(9),
            ..Default::default()
        });
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/x"));
        assert_eq!(cfg.coalesce_window_ticks, 9);
    }

    #[test]
    fn errors_carry_location() {
        let bad = "rules = r\nprofiles = p\ndevices = d\nhorizon = soon\n";
        match EngineConfig::parse(bad, Path::new("."), Path::new("c.conf")) {
            Err(ConfigError::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            EngineConfig::parse(
                "profiles = p\ndevices = d\n",
                Path::new("."),
                Path::new("c")
            ),
            Err(ConfigError::Missing("rules"))
        ));
        assert!(EngineConfig::parse("rules\n", Path::new("."), Path::new("c")).is_err());
        assert!(EngineConfig::parse(
            "rules=r\nprofiles=p\ndevices=d\ncolour=red\n",
            Path::new("."),
            Path::new("c")
        )
        .is_err());
    }

    #[test]
    fn validation() {
        let dir = tempfile::tempdir().unwrap();
        for f in ["r", "p", "d"] {
            std::fs::write(dir.path().join(f), "").unwrap();
        }
        let text = "rules = r\nprofiles = p\ndevices = d\n";
        let mut cfg = EngineConfig::parse(text, dir.path(), Path::new("c")).unwrap();
        cfg.validate().unwrap();
        cfg.coalesce_window_ticks = 0;
        assert!(cfg.validate().is_err());
        cfg.coalesce_window_ticks = 1;
        cfg.model_files.push(dir.path().join("missing.bsp"));
        assert!(matches!(cfg.validate(), Err(ConfigError::File { .. })));
        assert!(cfg.ports().is_err());
    }
}
