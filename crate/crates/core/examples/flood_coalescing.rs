//! An alarm flood through the priority queue and the coalescer.

use decision_engine::pipeline::{coalesce, EventQueue, Intake, DEFAULT_COALESCE_WINDOW};

fn main() {
    let intake = Intake::new();
    let queue = EventQueue::new(20_000);
    for i in 0..10_000 {
        let line = format!(
            "evt src=substation-A t={} cat=alarm sev={} x=42 y=42",
            100 + i % 5,
            i % 4
        );
        queue.enqueue(intake.accept(&line).unwrap()).unwrap();
    }
    queue
        .enqueue(
            intake
                .accept("evt src=door-3 t=101 cat=door-open sev=0")
                .unwrap(),
        )
        .unwrap();

    let mut batch = queue.dequeue_batch(usize::MAX);
    println!(
        "dequeued {} events, first has severity {}",
        batch.len(),
        batch[0].severity
    );
    batch.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
    for g in coalesce(&batch, DEFAULT_COALESCE_WINDOW) {
        let r = &g.representative;
        println!(
            "{}/{}: {} events over ticks {}..={}, representative {} (sev {})",
            r.source, r.category, g.count, g.first_tick, g.last_tick, r.id, r.severity
        );
    }
}
