use crate::invariant::{GridBox, Invariant, Tick};
use crate::lineproto::{content_lines, parse_int, parse_ints, tokenize, LineError};

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherCell {
    pub tick: Tick,
    /// Owner label, e.g. `cloud`.
    pub kind: String,
    pub bbox: GridBox,
    /// In `[0, 1]`. Carried along but not used by coverage.
    pub intensity: f64,
}

/// Result of reading a feed: the valid cells and how many lines were dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeatherFeed {
    pub cells: Vec<WeatherCell>,
    pub skipped: usize,
    /// Content lines seen (blank lines and comments excluded).
    pub total: usize,
}

/// `wx t=<int> kind=<word> box=<x1>,<y1>,<x2>,<y2> [intensity=<0..1>]`
pub fn parse_weather_line(line: &str) -> Result<WeatherCell, LineError> {
    let rec = tokenize(line)?;
    if rec.kind != "wx" {
        return Err(LineError(format!("expected 'wx', found {:?}", rec.kind)));
    }
    let tick = parse_int("t", rec.require("t")?)?;
    let kind = rec.require("kind")?;
    if kind.is_empty() || kind.contains(char::is_whitespace) {
        return Err(LineError(format!("bad kind {kind:?}")));
    }
    let [x1, y1, x2, y2] = parse_ints::<4>("box", rec.require("box")?)?;
    let intensity = match rec.get("intensity") {
        None => 1.0,
        Some(v) => match v.parse::<f64>() {
            Ok(i) if (0.0..=1.0).contains(&i) => i,
            _ => return Err(LineError(format!("intensity out of range: {v:?}"))),
        },
    };
    if let Some((k, _)) = rec
        .fields
        .iter()
        .find(|(k, _)| !["t", "kind", "box", "intensity"].contains(&k.as_str()))
    {
        return Err(LineError(format!("unknown field {k:?}")));
    }
    Ok(WeatherCell {
        tick,
        kind: kind.to_string(),
        bbox: GridBox::new(x1, y1, x2, y2),
        intensity,
    })
}

/// Reads every line it can; bad lines are logged and counted, never fatal.
pub fn parse_weather_feed(text: &str) -> WeatherFeed {
    let mut feed = WeatherFeed::default();
    for (lineno, line) in content_lines(text) {
        feed.total += 1;
        match parse_weather_line(line) {
            Ok(c) => feed.cells.push(c),
            Err(e) => {
                log::warn!("weather line {lineno} skipped: {e}");
                feed.skipped += 1;
            }
        }
    }
    feed
}

/// Each cell holds from its tick for `horizon` ticks, i.e. until the next
/// expected feed update. `horizon` below 1 is treated as 1.
pub fn cells_to_invariants(cells: &[WeatherCell], horizon: Tick) -> Vec<Invariant> {
    let h = horizon.max(1);
    cells
        .iter()
        .map(|c| {
            let (x1, y1, x2, y2) = c.bbox.corners();
            Invariant::implies(
                Invariant::and(
                    Invariant::time_interval(c.tick, c.tick.saturating_add(h - 1)),
                    Invariant::owner(&c.kind),
                ),
                Invariant::occupy_box(x1, y1, x2, y2),
            )
        })
        .collect()
}
