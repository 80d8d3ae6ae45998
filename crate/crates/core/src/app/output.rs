use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::notification::{render_xml, DeviceBinding, DeviceRegistry};

/// Writes each batch as one `<output>` document per device, appended to
/// `<dir>/<device>.xml`. Device-independent bindings go to the default device.
pub struct DeviceOutputs {
    dir: PathBuf,
    default_device: String,
}

impl DeviceOutputs {
    pub fn new(dir: impl Into<PathBuf>, registry: &DeviceRegistry) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(DeviceOutputs {
            dir,
            default_device: registry.default_device().to_string(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, device: &str) -> PathBuf {
        self.dir.join(format!("{device}.xml"))
    }

    /// Deletes earlier output for every registered device.
    pub fn truncate(&self, registry: &DeviceRegistry) -> std::io::Result<()> {
        for d in registry.devices() {
            match std::fs::remove_file(self.path_for(d)) {
                Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn write_batch(&self, batch: &[DeviceBinding]) -> std::io::Result<()> {
        let mut by_device: BTreeMap<&str, Vec<DeviceBinding>> = BTreeMap::new();
        for b in batch {
            let d = b.device.as_deref().unwrap_or(&self.default_device);
            by_device.entry(d).or_default().push(b.clone());
        }
        for (device, bindings) in by_device {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(self.path_for(device))?;
            f.write_all(render_xml(&bindings).as_bytes())?;
        }
        Ok(())
    }
}
