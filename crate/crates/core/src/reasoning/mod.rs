//! Analysis of invariant terms: filtering by time and owner, extraction of
//! spatial snapshots, and lattice geometry over occupied boxes.

mod filter;
mod geometry;
mod snapshot;

use thiserror::Error;

pub use filter::{filter_by_owner, filter_by_time};
pub use geometry::{
    boxes_overlap, coverage, decompose_to_points, Coverage, PointSet, DEFAULT_DECOMPOSITION_CAP,
};
pub use snapshot::{extract_snapshot, OwnedBox, SpatialSnapshot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasoningError {
    #[error("term still contains temporal atoms; filter by time first")]
    Precondition,
    #[error("model term {0} is outside the supported guarded-occupancy form")]
    UnsupportedForm(usize),
    #[error("box holds {0} lattice points, over the decomposition cap")]
    CapExceeded(u128),
}
