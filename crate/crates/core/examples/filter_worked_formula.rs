//! Time then owner filtering on the region-A formula.

use decision_engine::invariant::parse_invariant;
use decision_engine::reasoning::{filter_by_owner, filter_by_time};

const FORMULA: &str = r#"IMPLIES(AND(OR(TimeInterval(800,950),TimeInterval(1000,1050)),Owner("A")),OccupyBox(143,4056,1536,2612))"#;

fn main() {
    let term = parse_invariant(FORMULA).expect("formula parses");
    for t in [799, 900, 975, 1025] {
        let timed = filter_by_time(&term, t);
        let owned = filter_by_owner(&timed, "A").expect("no temporal atoms left");
        println!("t={t:<5} {owned}");
    }
}
