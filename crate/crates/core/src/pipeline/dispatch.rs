use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use thiserror::Error;

use super::{CoalescedEvent, EventRecord};
use crate::decision::{ConfidenceCheck, Incident, StakeholderProfile};
use crate::invariant::Tick;
use crate::notification::{GeoPoint, Overlay, VisualizationCommand};
use crate::reasoning::SpatialSnapshot;

/// Category of the banner emitted when a handler fails.
pub const HANDLER_ERROR_CATEGORY: &str = "handler-error";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("handler for {category:?} failed: {detail}")]
pub struct HandlerFailure {
    pub category: String,
    pub detail: String,
}

/// What the handlers can see while processing one batch.
pub struct HandlerContext<'a> {
    pub tick: Tick,
    pub snapshot: &'a SpatialSnapshot,
    pub profiles: &'a [StakeholderProfile],
    /// Expert assigned to each incident, keyed by representative event id.
    pub assignments: &'a BTreeMap<String, String>,
    /// Every event of the current batch.
    pub recent: &'a [EventRecord],
    pub confidence: ConfidenceCheck,
}

impl HandlerContext<'_> {
    pub fn profile(&self, id: &str) -> Option<&StakeholderProfile> {
        self.profiles.iter().find(|p| p.id == id)
    }
}

/// Commands produced for one event and the stakeholders to deliver them to.
/// No recipients means device-independent delivery.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dispatch {
    pub commands: Vec<VisualizationCommand>,
    pub recipients: Vec<StakeholderProfile>,
}

pub trait Handler: Send + Sync {
    fn handle(
        &self,
        event: &CoalescedEvent,
        ctx: &HandlerContext<'_>,
    ) -> Result<Dispatch, HandlerFailure>;

    /// The incident this event raises, if it needs an expert.
    fn incident(&self, _event: &CoalescedEvent) -> Option<Incident> {
        None
    }
}

/// Emits a banner for the event and nothing else.
pub struct BannerHandler;

impl Handler for BannerHandler {
    fn handle(
        &self,
        event: &CoalescedEvent,
        _ctx: &HandlerContext<'_>,
    ) -> Result<Dispatch, HandlerFailure> {
        let e = &event.representative;
        Ok(Dispatch {
            commands: vec![VisualizationCommand::banner(&e.category, &e.id)],
            recipients: vec![],
        })
    }
}

/// Alarms and requests for help: alert the assigned expert with the
/// incident's banner, their profile window, and any image or map the event
/// carries.
///
/// Payload fields read: `x`,`y` (required), `need` (capability, defaults to
/// the category), `image`, `rect=x,y,w,h`, `msg`, `lat`, `long`, `zoom`, `height`.
pub struct ExpertHandler;

impl ExpertHandler {
    fn failure(e: &EventRecord, detail: impl Into<String>) -> HandlerFailure {
        HandlerFailure {
            category: e.category.clone(),
            detail: detail.into(),
        }
    }
}

impl Handler for ExpertHandler {
    fn incident(&self, event: &CoalescedEvent) -> Option<Incident> {
        let e = &event.representative;
        Some(Incident {
            event_id: e.id.clone(),
            location: e.location()?,
            required_capability: e.payload_value("need").unwrap_or(&e.category).to_string(),
            time: event.first_tick,
        })
    }

    fn handle(
        &self,
        event: &CoalescedEvent,
        ctx: &HandlerContext<'_>,
    ) -> Result<Dispatch, HandlerFailure> {
        let e = &event.representative;
        if e.location().is_none() {
            return Err(Self::failure(e, "event has no x/y location"));
        }
        if !ctx.confidence.passes(e, ctx.recent) {
            return Ok(Dispatch {
                commands: vec![VisualizationCommand::banner(
                    format!("unconfirmed-{}", e.category),
                    &e.id,
                )],
                recipients: vec![],
            });
        }

        let mut commands = vec![VisualizationCommand::banner(&e.category, &e.id)];
        let mut recipients = Vec::new();
        if let Some(expert) = ctx.assignments.get(&e.id).and_then(|id| ctx.profile(id)) {
            commands.push(VisualizationCommand::display(&expert.id));
            recipients.push(expert.clone());
        }

        if let Some(image) = e.payload_value("image") {
            let mut overlays = Vec::new();
            if let Some(rect) = e.payload_value("rect") {
                let [x, y, w, h] = crate::lineproto::parse_ints::<4>("rect", rect)
                    .map_err(|err| Self::failure(e, err.0))?;
                let (w, h) = (u32::try_from(w), u32::try_from(h));
                let (Ok(w), Ok(h)) = (w, h) else {
                    return Err(Self::failure(e, "rect size must be non-negative"));
                };
                overlays.push(Overlay::Rect { x, y, w, h });
                if let Some(msg) = e.payload_value("msg") {
                    overlays.push(Overlay::Text {
                        text: msg.to_string(),
                        x,
                        y,
                        color: "red".into(),
                    });
                }
            }
            commands.push(VisualizationCommand::CompositeImage {
                image: image.to_string(),
                overlays,
            });
        }

        if let (Some(lat), Some(long)) = (e.payload_value("lat"), e.payload_value("long")) {
            let parse = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Self::failure(e, format!("bad coordinate {v:?}")))
            };
            let at = GeoPoint::new(parse(lat)?, parse(long)?)
                .map_err(|err| Self::failure(e, err.to_string()))?;
            commands.push(VisualizationCommand::MapView {
                at,
                zoom: e.payload_value("zoom").unwrap_or("15z").to_string(),
            });
            commands.push(VisualizationCommand::EarthView {
                at,
                height: e.payload_value("height").unwrap_or("100m").to_string(),
            });
        }
        Ok(Dispatch {
            commands,
            recipients,
        })
    }
}

/// Category → handler table with a fallback for unknown categories.
#[derive(Clone)]
pub struct HandlerRegistry {
    handlers: BTreeMap<String, Arc<dyn Handler>>,
    fallback: Arc<dyn Handler>,
}

impl HandlerRegistry {
    pub fn new(fallback: Arc<dyn Handler>) -> Self {
        HandlerRegistry {
            handlers: BTreeMap::new(),
            fallback,
        }
    }

    /// Expert routing for `alarm`, `help-request` and `consulting-request`;
    /// banners for everything else.
    pub fn standard() -> Self {
        let expert: Arc<dyn Handler> = Arc::new(ExpertHandler);
        let mut r = HandlerRegistry::new(Arc::new(BannerHandler));
        for cat in ["alarm", "help-request", "consulting-request"] {
            r.register(cat, Arc::clone(&expert));
        }
        r
    }

    pub fn register(&mut self, category: impl Into<String>, handler: Arc<dyn Handler>) {
        self.handlers.insert(category.into(), handler);
    }

    pub fn handler_for(&self, category: &str) -> &dyn Handler {
        self.handlers
            .get(category)
            .unwrap_or(&self.fallback)
            .as_ref()
    }
}

/// Runs the category's handler. Failures, including panics, become a
/// `handler-error` banner so they stay visible to operators.
pub fn dispatch(
    event: &CoalescedEvent,
    registry: &HandlerRegistry,
    ctx: &HandlerContext<'_>,
) -> Dispatch {
    let handler = registry.handler_for(&event.representative.category);
    let result = catch_unwind(AssertUnwindSafe(|| handler.handle(event, ctx)));
    let detail = match result {
        Ok(Ok(d)) => return d,
        Ok(Err(f)) => f.to_string(),
        Err(panic) => panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "handler panicked".into()),
    };
    log::warn!("dispatch of {} failed: {detail}", event.representative.id);
    Dispatch {
        commands: vec![VisualizationCommand::banner(
            HANDLER_ERROR_CATEGORY,
            &event.representative.id,
        )],
        recipients: vec![],
    }
}
