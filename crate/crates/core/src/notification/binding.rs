use std::collections::{BTreeMap, BTreeSet};

use super::{CommandKind, NotificationError, VisualizationCommand};
use crate::decision::StakeholderProfile;
use crate::lineproto::{content_lines, tokenize};

/// A command addressed to a device, or device-independent when `device` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceBinding {
    pub device: Option<String>,
    pub command: VisualizationCommand,
    /// Unrecognized attributes carried through parsing.
    pub extras: Vec<(String, String)>,
}

impl DeviceBinding {
    pub fn new(device: Option<String>, command: VisualizationCommand) -> Self {
        DeviceBinding {
            device,
            command,
            extras: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceRegistry {
    devices: BTreeMap<String, BTreeSet<CommandKind>>,
    default_device: String,
}

impl DeviceRegistry {
    pub fn new(
        devices: BTreeMap<String, BTreeSet<CommandKind>>,
        default_device: impl Into<String>,
    ) -> Result<Self, NotificationError> {
        let default_device = default_device.into();
        if !devices.contains_key(&default_device) {
            return Err(NotificationError::Invalid(format!(
                "default device {default_device:?} is not registered"
            )));
        }
        Ok(DeviceRegistry {
            devices,
            default_device,
        })
    }

    /// Reads `device id=<id> caps=<kind>,... [default=true]` records.
    /// Exactly one device must be marked default.
    pub fn parse(text: &str) -> Result<Self, NotificationError> {
        let mut devices = BTreeMap::new();
        let mut default = None;
        for (line, raw) in content_lines(text) {
            let bad = |m: String| NotificationError::Invalid(format!("line {line}: {m}"));
            let rec = tokenize(raw).map_err(|e| bad(e.0))?;
            if rec.kind != "device" {
                return Err(bad(format!(
                    "expected 'device' record, found {:?}",
                    rec.kind
                )));
            }
            let id = rec.require("id").map_err(|e| bad(e.0))?.to_string();
            let caps = rec
                .get("caps")
                .unwrap_or("")
                .split(',')
                .filter(|c| !c.is_empty())
                .map(|c| {
                    CommandKind::parse(c).ok_or_else(|| bad(format!("unknown capability {c:?}")))
                })
                .collect::<Result<BTreeSet<_>, _>>()?;
            if rec.get("default") == Some("true") && default.replace(id.clone()).is_some() {
                return Err(bad("more than one default device".into()));
            }
            if devices.insert(id.clone(), caps).is_some() {
                return Err(bad(format!("duplicate device {id:?}")));
            }
        }
        let default =
            default.ok_or_else(|| NotificationError::Invalid("no default device".into()))?;
        DeviceRegistry::new(devices, default)
    }

    pub fn default_device(&self) -> &str {
        &self.default_device
    }

    pub fn contains(&self, device: &str) -> bool {
        self.devices.contains_key(device)
    }

    pub fn supports(&self, device: &str, kind: CommandKind) -> bool {
        self.devices
            .get(device)
            .is_some_and(|caps| caps.contains(&kind))
    }

    pub fn devices(&self) -> impl Iterator<Item = &str> {
        self.devices.keys().map(String::as_str)
    }
}

/// Binds every command to every target's device, target-major. A device that
/// is unknown or lacks the command's capability falls back to the registry
/// default. With no targets the commands stay device-independent.
pub fn bind_devices(
    commands: &[VisualizationCommand],
    targets: &[StakeholderProfile],
    registry: &DeviceRegistry,
) -> Vec<DeviceBinding> {
    if targets.is_empty() {
        return commands
            .iter()
            .map(|c| DeviceBinding::new(None, c.clone()))
            .collect();
    }
    let mut out = Vec::with_capacity(targets.len() * commands.len());
    for target in targets {
        for command in commands {
            let device = if registry.supports(&target.device, command.kind()) {
                target.device.clone()
            } else {
                registry.default_device().to_string()
            };
            out.push(DeviceBinding::new(Some(device), command.clone()));
        }
    }
    out
}
