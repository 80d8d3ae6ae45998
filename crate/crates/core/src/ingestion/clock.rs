use chrono::DateTime;
use thiserror::Error;

use crate::invariant::Tick;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimestampError {
    #[error("unparseable timestamp {0:?}")]
    Unparseable(String),
    #[error("tick length must be at least one second, got {0}")]
    BadTickLength(i64),
    #[error("tick {0} out of range")]
    OutOfRange(i128),
}

/// `floor((timestamp - epoch) / tick_seconds)`. Both timestamps are RFC 3339;
/// pre-epoch timestamps give negative ticks.
pub fn tick_from_wall_clock(
    timestamp: &str,
    epoch: &str,
    tick_seconds: i64,
) -> Result<Tick, TimestampError> {
    if tick_seconds < 1 {
        return Err(TimestampError::BadTickLength(tick_seconds));
    }
    let parse = |s: &str| {
        DateTime::parse_from_rfc3339(s.trim())
            .map_err(|_| TimestampError::Unparseable(s.to_string()))
    };
    let (ts, ep) = (parse(timestamp)?, parse(epoch)?);
    let nanos = |d: &DateTime<chrono::FixedOffset>| {
        i128::from(d.timestamp()) * 1_000_000_000 + i128::from(d.timestamp_subsec_nanos())
    };
    let delta = nanos(&ts) - nanos(&ep);
    let tick = delta.div_euclid(i128::from(tick_seconds) * 1_000_000_000);
    Tick::try_from(tick).map_err(|_| TimestampError::OutOfRange(tick))
}
