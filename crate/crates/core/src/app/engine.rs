use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::config::{ConfigError, EngineConfig};
use crate::decision::{
    evaluate_rule, parse_profiles, resolve_assignments, CoverageRule, StakeholderProfile,
    TriggeredReaction,
};
use crate::ingestion::{cells_to_invariants, tick_from_wall_clock, WeatherCell};
use crate::invariant::{parse_model, Invariant, Tick};
use crate::lineproto::{push_field, tokenize};
use crate::notification::{bind_devices, DeviceBinding, DeviceRegistry};
use crate::pipeline::{
    coalesce, dispatch, priority_key, EventRecord, HandlerContext, HandlerRegistry,
};
use crate::reasoning::{extract_snapshot, ReasoningError, SpatialSnapshot};

/// Running totals reported at the end of a replay or serve session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub events_in: usize,
    pub events_skipped: usize,
    pub weather_cells: usize,
    pub weather_skipped: usize,
    pub coalesced_groups: usize,
    pub rules_fired: usize,
    pub commands_out: usize,
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "events in: {}", self.events_in)?;
        writeln!(f, "events skipped: {}", self.events_skipped)?;
        writeln!(f, "weather cells: {}", self.weather_cells)?;
        writeln!(f, "weather skipped: {}", self.weather_skipped)?;
        writeln!(f, "coalesced groups: {}", self.coalesced_groups)?;
        writeln!(f, "rules fired: {}", self.rules_fired)?;
        write!(f, "commands out: {}", self.commands_out)
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads and checks every model file. Terms must be guarded occupancies that
/// snapshot extraction understands.
pub fn load_models(paths: &[impl AsRef<Path>]) -> Result<Vec<Invariant>, ConfigError> {
    let mut model = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let lines = parse_model(&read(path)?).map_err(|e| {
            let (line, message) = match e {
                crate::invariant::ParseError::Model { line, source } => (line, source.to_string()),
                other => (0, other.to_string()),
            };
            ConfigError::Load {
                path: path.to_path_buf(),
                line,
                message,
            }
        })?;
        for ml in lines {
            let term = std::slice::from_ref(&ml.term);
            if let Err(e @ ReasoningError::UnsupportedForm(_)) = extract_snapshot(term, 0) {
                return Err(ConfigError::Load {
                    path: path.to_path_buf(),
                    line: ml.line,
                    message: e.to_string(),
                });
            }
            model.push(ml.term);
        }
    }
    Ok(model)
}

/// Rewrites `at=<RFC 3339>` into `t=<tick>` on event and weather lines that
/// carry no explicit tick. Other lines pass through untouched.
pub fn resolve_wall_clock(line: &str, epoch: &str, tick_seconds: i64) -> Result<String, String> {
    let Ok(rec) = tokenize(line) else {
        return Ok(line.to_string());
    };
    let Some(at) = rec.get("at").filter(|_| rec.get("t").is_none()) else {
        return Ok(line.to_string());
    };
    let tick = tick_from_wall_clock(at, epoch, tick_seconds).map_err(|e| e.to_string())?;
    let mut out = rec.kind.clone();
    push_field(&mut out, "t", &tick.to_string());
    for (k, v) in rec.fields.iter().filter(|(k, _)| k != "at") {
        push_field(&mut out, k, v);
    }
    Ok(out)
}

/// Tick boundaries (`start` and `end + 1`) of every temporal atom in `term`.
fn boundaries(term: &Invariant, out: &mut BTreeSet<Tick>) {
    match term {
        Invariant::And(a, b) | Invariant::Or(a, b) | Invariant::Implies(a, b) => {
            boundaries(a, out);
            boundaries(b, out);
        }
        Invariant::Not(a) => boundaries(a, out),
        Invariant::TimePoint(t) => {
            out.insert(*t);
            out.insert(t.saturating_add(1));
        }
        Invariant::TimeInterval(i) => {
            out.insert(i.start());
            out.insert(i.end().saturating_add(1));
        }
        _ => {}
    }
}

/// Model, rules and people, plus the streaming state shared by replay and
/// serve: current weather, the open event batch, and which rules are
/// currently triggered.
pub struct Engine {
    static_model: Vec<Invariant>,
    rules: Vec<CoverageRule>,
    profiles: Vec<StakeholderProfile>,
    registry: DeviceRegistry,
    handlers: HandlerRegistry,
    config: EngineConfig,
    /// Ticks at which the static model or a rule window changes.
    static_boundaries: BTreeSet<Tick>,
    weather: Vec<WeatherCell>,
    pending: Vec<EventRecord>,
    batch_start: Option<Tick>,
    clock: Option<Tick>,
    triggered: BTreeMap<String, bool>,
    summary: Summary,
}

impl Engine {
    pub fn load(config: &EngineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let static_model = load_models(&config.model_files)?;
        let line_err = |path: &Path, e: crate::decision::DecisionError| match e {
            crate::decision::DecisionError::Line { line, message } => ConfigError::Load {
                path: path.to_path_buf(),
                line,
                message,
            },
            other => ConfigError::File {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        };
        let rules = crate::decision::parse_rules(&read(&config.rule_file)?)
            .map_err(|e| line_err(&config.rule_file, e))?;
        for r in &rules {
            for a in r.areas() {
                if a.lattice_count() > config.decomposition_cap {
                    return Err(ConfigError::File {
                        path: config.rule_file.clone(),
                        message: format!(
                            "rule {}: area {a} has {} points, above the cap of {}",
                            r.id,
                            a.lattice_count(),
                            config.decomposition_cap
                        ),
                    });
                }
            }
        }
        let profiles = parse_profiles(&read(&config.profile_file)?)
            .map_err(|e| line_err(&config.profile_file, e))?;
        let registry = DeviceRegistry::parse(&read(&config.registry_file)?).map_err(|e| {
            ConfigError::File {
                path: config.registry_file.clone(),
                message: e.to_string(),
            }
        })?;
        Engine::new(static_model, rules, profiles, registry, config.clone())
    }

    pub fn new(
        static_model: Vec<Invariant>,
        rules: Vec<CoverageRule>,
        profiles: Vec<StakeholderProfile>,
        registry: DeviceRegistry,
        config: EngineConfig,
    ) -> Result<Self, ConfigError> {
        for d in registry.devices() {
            let safe = !d.is_empty()
                && !d.starts_with('.')
                && d.chars()
                    .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
            if !safe {
                return Err(ConfigError::File {
                    path: config.registry_file.clone(),
                    message: format!("device id {d:?} cannot name an output file"),
                });
            }
        }
        let mut static_boundaries = BTreeSet::new();
        for t in &static_model {
            boundaries(t, &mut static_boundaries);
        }
        for r in &rules {
            static_boundaries.insert(r.window.start());
            static_boundaries.insert(r.window.end().saturating_add(1));
        }
        Ok(Engine {
            static_model,
            rules,
            profiles,
            registry,
            handlers: HandlerRegistry::standard(),
            config,
            static_boundaries,
            weather: Vec::new(),
            pending: Vec::new(),
            batch_start: None,
            clock: None,
            triggered: BTreeMap::new(),
            summary: Summary::default(),
        })
    }

    pub fn registry(&self) -> &DeviceRegistry {
        &self.registry
    }

    pub fn rules(&self) -> &[CoverageRule] {
        &self.rules
    }

    pub fn handlers_mut(&mut self) -> &mut HandlerRegistry {
        &mut self.handlers
    }

    pub fn summary(&self) -> Summary {
        self.summary
    }

    pub fn summary_mut(&mut self) -> &mut Summary {
        &mut self.summary
    }

    /// Static model plus the weather cells valid at `t`.
    pub fn snapshot_at(&self, t: Tick) -> SpatialSnapshot {
        let h = self.config.horizon_ticks;
        let active: Vec<WeatherCell> = self
            .weather
            .iter()
            .filter(|c| c.tick <= t && t <= c.tick.saturating_add(h - 1))
            .cloned()
            .collect();
        let mut model = self.static_model.clone();
        model.extend(cells_to_invariants(&active, h));
        // every term was checked at load time or built from a cell
        extract_snapshot(&model, t).unwrap_or_else(|e| {
            log::error!("snapshot at {t}: {e}");
            SpatialSnapshot::new(t, Vec::new())
        })
    }

    /// Rules that hold at `t`, regardless of earlier state.
    pub fn evaluate_at(&self, t: Tick) -> Vec<TriggeredReaction> {
        let snap = self.snapshot_at(t);
        self.rules
            .iter()
            .filter_map(|r| evaluate_rule(r, &snap))
            .collect()
    }

    /// Binds a reaction to the holders of its notify capability available at
    /// its time, or device-independently when nobody qualifies.
    pub fn reaction_bindings(&self, r: &TriggeredReaction) -> Vec<DeviceBinding> {
        let targets: Vec<StakeholderProfile> = match &r.notify {
            Some(cap) => self
                .profiles
                .iter()
                .filter(|p| p.has_capability(cap) && p.is_available(r.time))
                .cloned()
                .collect(),
            None => Vec::new(),
        };
        bind_devices(&r.commands, &targets, &self.registry)
    }

    pub fn ingest_weather(&mut self, cells: impl IntoIterator<Item = WeatherCell>) {
        for c in cells {
            self.summary.weather_cells += 1;
            self.weather.push(c);
        }
    }

    pub fn ingest_events(&mut self, events: impl IntoIterator<Item = EventRecord>) {
        for e in events {
            self.summary.events_in += 1;
            self.batch_start = Some(self.batch_start.map_or(e.timestamp, |s| s.min(e.timestamp)));
            self.pending.push(e);
        }
    }

    fn batch_end(&self) -> Option<Tick> {
        self.batch_start
            .map(|s| s.saturating_add(self.config.coalesce_window_ticks - 1))
    }

    /// Moves the clock to `t`. Closes the open event batch once `t` is past
    /// its window, then re-evaluates rules at every tick in between where the
    /// model can change. Returns the output batches in emission order.
    pub fn advance_to(&mut self, t: Tick) -> Vec<Vec<DeviceBinding>> {
        let mut out = Vec::new();
        if self.batch_end().is_some_and(|end| t > end) {
            out.extend(self.flush());
        }
        if self.clock.is_some_and(|c| t <= c) {
            return out;
        }
        let h = self.config.horizon_ticks;
        let lo = self.clock.map_or(t, |c| c + 1);
        let mut ticks: BTreeSet<Tick> = self.static_boundaries.range(lo..=t).copied().collect();
        for c in &self.weather {
            for b in [c.tick, c.tick.saturating_add(h)] {
                if (lo..=t).contains(&b) {
                    ticks.insert(b);
                }
            }
        }
        ticks.insert(t);
        for u in ticks {
            let fired = self.fire_rules(u);
            if !fired.is_empty() {
                out.push(fired);
            }
        }
        self.clock = Some(t);
        self.weather.retain(|c| c.tick.saturating_add(h - 1) >= t);
        out
    }

    /// Edge-triggered: a rule emits when it goes from not holding to holding.
    fn fire_rules(&mut self, u: Tick) -> Vec<DeviceBinding> {
        let snap = self.snapshot_at(u);
        let mut out = Vec::new();
        for i in 0..self.rules.len() {
            let reaction = evaluate_rule(&self.rules[i], &snap);
            let now = reaction.is_some();
            let was = self
                .triggered
                .insert(self.rules[i].id.clone(), now)
                .unwrap_or(false);
            if let (Some(r), false) = (reaction, was) {
                log::info!("rule {} fired at {u}: {}", r.rule_id, r.label);
                self.summary.rules_fired += 1;
                out.extend(self.reaction_bindings(&r));
            }
        }
        self.summary.commands_out += out.len();
        out
    }

    /// Processes the open event batch: coalesce, rank, assign experts,
    /// dispatch, bind to devices.
    pub fn flush(&mut self) -> Option<Vec<DeviceBinding>> {
        let tick = self.batch_end()?;
        self.batch_start = None;
        let mut events = std::mem::take(&mut self.pending);
        if events.is_empty() {
            return None;
        }
        events.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        let mut groups = coalesce(&events, self.config.coalesce_window_ticks);
        groups
            .sort_by(|a, b| priority_key(&a.representative).cmp(&priority_key(&b.representative)));
        self.summary.coalesced_groups += groups.len();

        let incidents: Vec<_> = groups
            .iter()
            .filter_map(|g| {
                self.handlers
                    .handler_for(&g.representative.category)
                    .incident(g)
            })
            .collect();
        let assignments: BTreeMap<String, String> = resolve_assignments(&incidents, &self.profiles)
            .into_iter()
            .filter_map(|a| Some((a.incident, a.expert?)))
            .collect();
        let snapshot = self.snapshot_at(tick);
        let ctx = HandlerContext {
            tick,
            snapshot: &snapshot,
            profiles: &self.profiles,
            assignments: &assignments,
            recent: &events,
            confidence: self.config.confidence,
        };
        let mut out = Vec::new();
        for g in &groups {
            let d = dispatch(g, &self.handlers, &ctx);
            out.extend(bind_devices(&d.commands, &d.recipients, &self.registry));
        }
        self.summary.commands_out += out.len();
        Some(out)
    }

    /// Closes any open batch at end of input.
    pub fn finish(&mut self) -> Vec<Vec<DeviceBinding>> {
        self.flush().into_iter().collect()
    }
}
