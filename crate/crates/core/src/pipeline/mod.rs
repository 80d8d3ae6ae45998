//! Event intake, priority queueing, flood coalescing and dispatch to
//! category handlers.

mod coalesce;
mod dispatch;
mod event;
mod queue;

pub use coalesce::{coalesce, CoalescedEvent, DEFAULT_COALESCE_WINDOW};
pub use dispatch::{
    dispatch, BannerHandler, Dispatch, ExpertHandler, Handler, HandlerContext, HandlerFailure,
    HandlerRegistry, HANDLER_ERROR_CATEGORY,
};
pub use event::{parse_event_line, EventRecord, Intake, MalformedEvent};
pub use queue::{priority_key, EventQueue, QueueFull, DEFAULT_QUEUE_CAPACITY};
