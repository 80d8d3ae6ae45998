use std::collections::BTreeSet;

use super::{ReasoningError, SpatialSnapshot};
use crate::invariant::{Coord, GridBox};

pub const DEFAULT_DECOMPOSITION_CAP: u128 = 10_000_000;

pub type PointSet = BTreeSet<(Coord, Coord)>;

/// Enumerates every lattice point of `b`.
///
/// Fails with [`ReasoningError::CapExceeded`] instead of truncating when the
/// box holds more than `cap` points; use [`coverage`] for large areas.
pub fn decompose_to_points(b: &GridBox, cap: u128) -> Result<PointSet, ReasoningError> {
    let required = b.lattice_count();
    if required > cap {
        return Err(ReasoningError::CapExceeded(required));
    }
    let mut points = PointSet::new();
    for x in b.x1()..=b.x2() {
        for y in b.y1()..=b.y2() {
            points.insert((x, y));
        }
    }
    Ok(points)
}

/// Inclusive overlap: boxes sharing only an edge or corner overlap.
pub fn boxes_overlap(a: &GridBox, b: &GridBox) -> bool {
    a.x1() <= b.x2() && b.x1() <= a.x2() && a.y1() <= b.y2() && b.y1() <= a.y2()
}

/// Exact lattice-point coverage of an area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub covered: u128,
    pub total: u128,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }

    /// `covered / total >= threshold`.
    pub fn meets(&self, threshold: f64) -> bool {
        self.fraction() >= threshold
    }
}

/// Fraction of `area`'s lattice points covered by at least one box owned by
/// `owner` in the snapshot. Overlapping boxes count once.
pub fn coverage(snapshot: &SpatialSnapshot, owner: &str, area: &GridBox) -> Coverage {
    let clipped: Vec<GridBox> = snapshot
        .boxes_of(owner)
        .filter_map(|b| b.intersection(area))
        .collect();
    Coverage {
        covered: union_lattice_count(&clipped),
        total: area.lattice_count(),
    }
}

// Coordinate compression over half-open cells [x1, x2 + 1) x [y1, y2 + 1).
fn union_lattice_count(boxes: &[GridBox]) -> u128 {
    if boxes.is_empty() {
        return 0;
    }
    let mut xs: Vec<i128> = boxes
        .iter()
        .flat_map(|b| [b.x1() as i128, b.x2() as i128 + 1])
        .collect();
    let mut ys: Vec<i128> = boxes
        .iter()
        .flat_map(|b| [b.y1() as i128, b.y2() as i128 + 1])
        .collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();

    let mut total = 0u128;
    for xw in xs.windows(2) {
        let (xa, xb) = (xw[0], xw[1]);
        for yw in ys.windows(2) {
            let (ya, yb) = (yw[0], yw[1]);
            let covered = boxes.iter().any(|b| {
                (b.x1() as i128) <= xa
                    && xb <= b.x2() as i128 + 1
                    && (b.y1() as i128) <= ya
                    && yb <= b.y2() as i128 + 1
            });
            if covered {
                total += ((xb - xa) * (yb - ya)) as u128;
            }
        }
    }
    total
}
