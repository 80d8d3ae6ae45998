use crate::invariant::Tick;
use crate::pipeline::EventRecord;

/// Corroboration test applied to an event before experts are alerted: at
/// least `min_corroborating` events of the same category (the event itself
/// included) from locations within `radius`, no more than `window` ticks
/// apart. The default of 1 lets every event through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfidenceCheck {
    pub min_corroborating: usize,
    pub radius: i64,
    pub window: Tick,
}

impl Default for ConfidenceCheck {
    fn default() -> Self {
        ConfidenceCheck {
            min_corroborating: 1,
            radius: 0,
            window: 0,
        }
    }
}

impl ConfidenceCheck {
    pub fn passes(&self, event: &EventRecord, recent: &[EventRecord]) -> bool {
        if self.min_corroborating <= 1 {
            return true;
        }
        let Some((x, y)) = event.location() else {
            return false;
        };
        let r2 = self.radius as i128 * self.radius as i128;
        let others = recent
            .iter()
            .filter(|e| e.id != event.id && e.category == event.category)
            .filter(|e| (e.timestamp - event.timestamp).abs() <= self.window)
            .filter(|e| {
                e.location().is_some_and(|(ex, ey)| {
                    let (dx, dy) = ((ex - x) as i128, (ey - y) as i128);
                    dx * dx + dy * dy <= r2
                })
            })
            .count();
        1 + others >= self.min_corroborating
    }
}
