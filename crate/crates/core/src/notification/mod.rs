//! Visualization commands, device binding, and the XML command format.

mod binding;
mod command;
mod text;
mod xml;

use thiserror::Error;

pub use binding::{bind_devices, DeviceBinding, DeviceRegistry};
pub use command::{CommandKind, GeoPoint, Overlay, VisualizationCommand};
pub use text::{format_command_line, parse_command_line, parse_command_list};
pub use xml::{parse_xml, render_xml};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotificationError {
    #[error("xml error at byte {position}: {message}")]
    Xml { position: usize, message: String },
    #[error("unknown command type {0:?}")]
    UnknownCommandType(String),
    #[error("missing attribute {attribute:?} at byte {position}")]
    MissingAttribute { attribute: String, position: usize },
    #[error("{0}")]
    Invalid(String),
}
