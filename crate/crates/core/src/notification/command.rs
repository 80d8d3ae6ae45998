use std::fmt;

use super::NotificationError;

/// A validated latitude/longitude pair in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    long: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, long: f64) -> Result<Self, NotificationError> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&long) {
            return Err(NotificationError::Invalid(format!(
                "coordinates out of range: lat={lat} long={long}"
            )));
        }
        Ok(GeoPoint { lat, long })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn long(&self) -> f64 {
        self.long
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Overlay {
    Rect {
        x: i64,
        y: i64,
        w: u32,
        h: u32,
    },
    Text {
        text: String,
        x: i64,
        y: i64,
        color: String,
    },
}

/// One display instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum VisualizationCommand {
    EventBanner {
        category: String,
        id: String,
    },
    Display {
        profile: String,
    },
    CompositeImage {
        image: String,
        overlays: Vec<Overlay>,
    },
    MapView {
        at: GeoPoint,
        zoom: String,
    },
    EarthView {
        at: GeoPoint,
        height: String,
    },
}

/// What a device must support to show a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommandKind {
    Banner,
    Display,
    Image,
    Map,
    Earth,
}

impl CommandKind {
    pub const ALL: [CommandKind; 5] = [
        CommandKind::Banner,
        CommandKind::Display,
        CommandKind::Image,
        CommandKind::Map,
        CommandKind::Earth,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Banner => "banner",
            CommandKind::Display => "display",
            CommandKind::Image => "image",
            CommandKind::Map => "map",
            CommandKind::Earth => "earth",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        CommandKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl VisualizationCommand {
    pub fn banner(category: impl Into<String>, id: impl Into<String>) -> Self {
        VisualizationCommand::EventBanner {
            category: category.into(),
            id: id.into(),
        }
    }

    pub fn display(profile: impl Into<String>) -> Self {
        VisualizationCommand::Display {
            profile: profile.into(),
        }
    }

    pub fn kind(&self) -> CommandKind {
        match self {
            VisualizationCommand::EventBanner { .. } => CommandKind::Banner,
            VisualizationCommand::Display { .. } => CommandKind::Display,
            VisualizationCommand::CompositeImage { .. } => CommandKind::Image,
            VisualizationCommand::MapView { .. } => CommandKind::Map,
            VisualizationCommand::EarthView { .. } => CommandKind::Earth,
        }
    }

    /// The `type` attribute used on the wire.
    pub fn type_name(&self) -> &'static str {
        match self {
            VisualizationCommand::EventBanner { .. } => "event",
            VisualizationCommand::Display { .. } => "display",
            VisualizationCommand::CompositeImage { .. } => "composite_image",
            VisualizationCommand::MapView { .. } => "map",
            VisualizationCommand::EarthView { .. } => "earth",
        }
    }
}
