//! Feed adapters: weather cells into guarded occupancy terms, wall-clock
//! timestamps into ticks.

mod clock;
mod weather;

pub use clock::{tick_from_wall_clock, TimestampError};
pub use weather::{
    cells_to_invariants, parse_weather_feed, parse_weather_line, WeatherCell, WeatherFeed,
};
