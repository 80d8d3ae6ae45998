use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::sync::Mutex;

use thiserror::Error;

use super::EventRecord;

pub const DEFAULT_QUEUE_CAPACITY: usize = 10_000;

/// Sort key giving the dispatch order: severity descending, then timestamp,
/// then id.
pub fn priority_key(e: &EventRecord) -> (Reverse<u8>, i64, &str) {
    (Reverse(e.severity), e.timestamp, e.id.as_str())
}

struct Queued(EventRecord);

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: the event that must come out first is the greatest
        priority_key(&other.0).cmp(&priority_key(&self.0))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

#[derive(Debug, Error)]
#[error("queue full (capacity {capacity})")]
pub struct QueueFull {
    pub capacity: usize,
    /// The event that was refused.
    pub event: Box<EventRecord>,
}

/// Bounded priority queue. Any number of producers may enqueue concurrently;
/// a single consumer drains it.
pub struct EventQueue {
    heap: Mutex<BinaryHeap<Queued>>,
    capacity: usize,
}

impl EventQueue {
    pub fn new(capacity: usize) -> Self {
        EventQueue {
            heap: Mutex::new(BinaryHeap::new()),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, BinaryHeap<Queued>> {
        self.heap.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn enqueue(&self, e: EventRecord) -> Result<(), QueueFull> {
        let mut heap = self.lock();
        if heap.len() >= self.capacity {
            return Err(QueueFull {
                capacity: self.capacity,
                event: Box::new(e),
            });
        }
        heap.push(Queued(e));
        Ok(())
    }

    /// Removes up to `n` events in priority order.
    pub fn dequeue_batch(&self, n: usize) -> Vec<EventRecord> {
        let mut heap = self.lock();
        let take = n.min(heap.len());
        (0..take).filter_map(|_| heap.pop().map(|q| q.0)).collect()
    }
}
