pub mod app;
pub mod decision;
pub mod ingestion;
pub mod invariant;
pub mod lineproto;
pub mod notification;
pub mod pipeline;
pub mod reasoning;
