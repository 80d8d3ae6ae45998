//! Weather lines to guarded occupancy terms to a snapshot.
//!
//!     cargo run --example weather_ingest -- fixtures/smartspace/weather.txt

use decision_engine::ingestion::{cells_to_invariants, parse_weather_feed, tick_from_wall_clock};
use decision_engine::reasoning::extract_snapshot;

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable feed"),
        None => "wx t=100 kind=cloud box=4,9,0,0\nwx t=104 kind=rain box=2,2,3,3 intensity=0.4\nwx t=x\n".into(),
    };
    let feed = parse_weather_feed(&text);
    println!(
        "{} cells, {} skipped of {}",
        feed.cells.len(),
        feed.skipped,
        feed.total
    );
    let terms = cells_to_invariants(&feed.cells, 10);
    for t in &terms {
        println!("  {t}");
    }
    if let Some(first) = feed.cells.first() {
        let at = first.tick + 5;
        let snap = extract_snapshot(&terms, at).unwrap();
        println!("active at {at}: {:?}", snap.owned_boxes());
    }
    let tick = tick_from_wall_clock("2016-01-01T00:05:30Z", "2016-01-01T00:00:00Z", 60).unwrap();
    println!("2016-01-01T00:05:30Z is tick {tick} at one minute per tick");
}
