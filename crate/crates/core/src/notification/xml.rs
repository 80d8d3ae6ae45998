//! Rendering and parsing of the `<output>` command document.
//!
//! ```xml
//! <output>
//!   <command type="composite_image" image="gridsubstation.jpg">
//!     <display type="rect" x="350" y="600" w="120" h="150"></display>
//!     <display type="text" text="Incident at Grid Substation" x="130" y="90" color="red"></display>
//!   </command>
//!   <command type="earth" lat="-38.1771269" long="146.3428259" height="100m"></command>
//! </output>
//! ```
//!
//! Attributes are written in a fixed order (`device`, `type`, then the
//! variant's own attributes) so identical input gives identical bytes.

use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{DeviceBinding, GeoPoint, NotificationError, Overlay, VisualizationCommand};

fn escape_attr(out: &mut String, v: &str) {
    for c in v.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
}

fn attr(out: &mut String, key: &str, value: &str) {
    let _ = write!(out, " {key}=\"");
    escape_attr(out, value);
    out.push('"');
}

/// Variant-specific attributes in wire order, without `device`/`type`.
pub(crate) fn command_attrs(cmd: &VisualizationCommand) -> Vec<(&'static str, String)> {
    match cmd {
        VisualizationCommand::EventBanner { category, id } => {
            vec![("category", category.clone()), ("id", id.clone())]
        }
        VisualizationCommand::Display { profile } => vec![("profile", profile.clone())],
        VisualizationCommand::CompositeImage { image, .. } => vec![("image", image.clone())],
        VisualizationCommand::MapView { at, zoom } => vec![
            ("lat", at.lat().to_string()),
            ("long", at.long().to_string()),
            ("zoom", zoom.clone()),
        ],
        VisualizationCommand::EarthView { at, height } => vec![
            ("lat", at.lat().to_string()),
            ("long", at.long().to_string()),
            ("height", height.clone()),
        ],
    }
}

pub(crate) fn overlay_attrs(o: &Overlay) -> Vec<(&'static str, String)> {
    match o {
        Overlay::Rect { x, y, w, h } => vec![
            ("type", "rect".into()),
            ("x", x.to_string()),
            ("y", y.to_string()),
            ("w", w.to_string()),
            ("h", h.to_string()),
        ],
        Overlay::Text { text, x, y, color } => vec![
            ("type", "text".into()),
            ("text", text.clone()),
            ("x", x.to_string()),
            ("y", y.to_string()),
            ("color", color.clone()),
        ],
    }
}

/// Renders bindings as one `<output>` document, newline terminated.
pub fn render_xml(bindings: &[DeviceBinding]) -> String {
    if bindings.is_empty() {
        return "<output></output>\n".to_string();
    }
    let mut out = String::from("<output>\n");
    for b in bindings {
        out.push_str("  <command");
        if let Some(device) = &b.device {
            attr(&mut out, "device", device);
        }
        attr(&mut out, "type", b.command.type_name());
        for (k, v) in command_attrs(&b.command) {
            attr(&mut out, k, &v);
        }
        for (k, v) in &b.extras {
            attr(&mut out, k, v);
        }
        match &b.command {
            VisualizationCommand::CompositeImage { overlays, .. } if !overlays.is_empty() => {
                out.push_str(">\n");
                for o in overlays {
                    out.push_str("    <display");
                    for (k, v) in overlay_attrs(o) {
                        attr(&mut out, k, &v);
                    }
                    out.push_str("></display>\n");
                }
                out.push_str("  </command>\n");
            }
            _ => out.push_str("></command>\n"),
        }
    }
    out.push_str("</output>\n");
    out
}

/// Attribute bag that hands out known keys and keeps the rest as extras.
pub(crate) struct Attrs {
    items: Vec<(String, String)>,
    position: usize,
}

impl Attrs {
    pub(crate) fn new(items: Vec<(String, String)>, position: usize) -> Self {
        Attrs { items, position }
    }

    pub(crate) fn take(&mut self, key: &str) -> Option<String> {
        let idx = self.items.iter().position(|(k, _)| k == key)?;
        Some(self.items.remove(idx).1)
    }

    pub(crate) fn require(&mut self, key: &str) -> Result<String, NotificationError> {
        self.take(key)
            .ok_or_else(|| NotificationError::MissingAttribute {
                attribute: key.to_string(),
                position: self.position,
            })
    }

    pub(crate) fn number<T: std::str::FromStr>(
        &mut self,
        key: &str,
    ) -> Result<T, NotificationError> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| {
            NotificationError::Invalid(format!("attribute {key}={raw:?} at byte {}", self.position))
        })
    }

    fn geo(&mut self) -> Result<GeoPoint, NotificationError> {
        let lat = self.number("lat")?;
        let long = self.number("long")?;
        GeoPoint::new(lat, long)
    }

    pub(crate) fn into_extras(self) -> Vec<(String, String)> {
        self.items
    }
}

/// Builds a command of `type_name` from its attributes; legacy forms
/// (`catagory`, flat `view`) are accepted and normalized.
pub(crate) fn command_from_attrs(
    type_name: &str,
    attrs: &mut Attrs,
) -> Result<VisualizationCommand, NotificationError> {
    Ok(match type_name {
        "event" => {
            let category =
                match attrs.take("category") {
                    Some(c) => {
                        attrs.take("catagory");
                        c
                    }
                    None => attrs.take("catagory").ok_or_else(|| {
                        NotificationError::MissingAttribute {
                            attribute: "category".into(),
                            position: attrs.position,
                        }
                    })?,
                };
            VisualizationCommand::EventBanner {
                category,
                id: attrs.require("id")?,
            }
        }
        "display" => VisualizationCommand::Display {
            profile: attrs.require("profile")?,
        },
        "composite_image" => VisualizationCommand::CompositeImage {
            image: attrs.require("image")?,
            overlays: Vec::new(),
        },
        "view" => legacy_view(attrs)?,
        "map" => VisualizationCommand::MapView {
            at: attrs.geo()?,
            zoom: attrs.require("zoom")?,
        },
        "earth" => VisualizationCommand::EarthView {
            at: attrs.geo()?,
            height: attrs.require("height")?,
        },
        other => return Err(NotificationError::UnknownCommandType(other.to_string())),
    })
}

fn legacy_view(attrs: &mut Attrs) -> Result<VisualizationCommand, NotificationError> {
    let image = attrs.require("image")?;
    let mut overlays = Vec::new();
    if attrs.items.iter().any(|(k, _)| k == "rectx") {
        overlays.push(Overlay::Rect {
            x: attrs.number("rectx")?,
            y: attrs.number("recty")?,
            w: attrs.number("rectw")?,
            h: attrs.number("recth")?,
        });
    }
    if let Some(text) = attrs.take("text") {
        overlays.push(Overlay::Text {
            text,
            x: attrs.number("txtx")?,
            y: attrs.number("txty")?,
            color: attrs.take("txtcolor").unwrap_or_default(),
        });
    }
    Ok(VisualizationCommand::CompositeImage { image, overlays })
}

pub(crate) fn overlay_from_attrs(attrs: &mut Attrs) -> Result<Overlay, NotificationError> {
    let kind = attrs.require("type")?;
    match kind.as_str() {
        "rect" => Ok(Overlay::Rect {
            x: attrs.number("x")?,
            y: attrs.number("y")?,
            w: attrs.number("w")?,
            h: attrs.number("h")?,
        }),
        "text" => Ok(Overlay::Text {
            text: attrs.require("text")?,
            x: attrs.number("x")?,
            y: attrs.number("y")?,
            color: attrs.require("color")?,
        }),
        other => Err(NotificationError::Invalid(format!(
            "unknown overlay type {other:?} at byte {}",
            attrs.position
        ))),
    }
}

struct XmlReader<'a> {
    reader: Reader<&'a [u8]>,
}

impl<'a> XmlReader<'a> {
    fn position(&self) -> usize {
        self.reader.buffer_position() as usize
    }

    fn err(&self, message: impl Into<String>) -> NotificationError {
        NotificationError::Xml {
            position: self.position(),
            message: message.into(),
        }
    }

    /// Next structural event; whitespace text, comments and prologue skipped.
    fn next(&mut self) -> Result<Event<'a>, NotificationError> {
        loop {
            let ev = self
                .reader
                .read_event()
                .map_err(|e| NotificationError::Xml {
                    position: self.reader.error_position() as usize,
                    message: e.to_string(),
                })?;
            match ev {
                Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => continue,
                Event::Text(ref t) if t.chars().all(|c| c.is_ascii_whitespace()) => continue,
                Event::Text(_) | Event::CData(_) | Event::GeneralRef(_) => {
                    return Err(self.err("unexpected character data"))
                }
                ev => return Ok(ev),
            }
        }
    }

    fn attrs(&self, start: &BytesStart<'_>) -> Result<Attrs, NotificationError> {
        let position = self.position();
        let mut items = Vec::new();
        for a in start.attributes() {
            let a = a.map_err(|e| NotificationError::Xml {
                position,
                message: e.to_string(),
            })?;
            let key = a.key.as_ref().to_string();
            let value = a
                .normalized_value(quick_xml::XmlVersion::Implicit1_0)
                .map_err(|e| NotificationError::Xml {
                    position,
                    message: e.to_string(),
                })?
                .into_owned();
            items.push((key, value));
        }
        Ok(Attrs::new(items, position))
    }

    /// Parses one `<command>` and, for legacy documents, any commands nested
    /// inside it (emitted after the parent).
    fn command(
        &mut self,
        start: &BytesStart<'_>,
        has_body: bool,
        out: &mut Vec<DeviceBinding>,
    ) -> Result<(), NotificationError> {
        let mut attrs = self.attrs(start)?;
        let device = attrs.take("device");
        let type_name = attrs.require("type")?;
        let mut command = command_from_attrs(&type_name, &mut attrs)?;
        let extras = attrs.into_extras();

        let mut nested = Vec::new();
        if has_body {
            loop {
                match self.next()? {
                    Event::End(e) if e.name().as_ref() == "command" => break,
                    Event::Start(e) if e.name().as_ref() == "command" => {
                        self.command(&e, true, &mut nested)?
                    }
                    Event::Empty(e) if e.name().as_ref() == "command" => {
                        self.command(&e, false, &mut nested)?
                    }
                    ev @ (Event::Start(_) | Event::Empty(_)) => {
                        let (e, body) = match &ev {
                            Event::Start(e) => (e, true),
                            Event::Empty(e) => (e, false),
                            _ => unreachable!(),
                        };
                        if e.name().as_ref() != "display" {
                            return Err(
                                self.err(format!("unexpected element <{}>", e.name().as_ref()))
                            );
                        }
                        let VisualizationCommand::CompositeImage { overlays, .. } = &mut command
                        else {
                            return Err(self.err("overlay outside composite_image"));
                        };
                        let mut oa = self.attrs(e)?;
                        overlays.push(overlay_from_attrs(&mut oa)?);
                        if body {
                            match self.next()? {
                                Event::End(_) => {}
                                _ => return Err(self.err("expected </display>")),
                            }
                        }
                    }
                    Event::Eof => return Err(self.err("unexpected end of document")),
                    _ => return Err(self.err("unexpected content in <command>")),
                }
            }
        }
        out.push(DeviceBinding {
            device,
            command,
            extras,
        });
        out.append(&mut nested);
        Ok(())
    }
}

/// Parses an `<output>` document back into bindings.
pub fn parse_xml(text: &str) -> Result<Vec<DeviceBinding>, NotificationError> {
    let mut r = XmlReader {
        reader: Reader::from_str(text),
    };
    let root_has_body = match r.next()? {
        Event::Start(e) if e.name().as_ref() == "output" => true,
        Event::Empty(e) if e.name().as_ref() == "output" => false,
        Event::Eof => return Err(r.err("empty document")),
        _ => return Err(r.err("expected <output> root")),
    };
    let mut out = Vec::new();
    if root_has_body {
        loop {
            match r.next()? {
                Event::End(e) if e.name().as_ref() == "output" => break,
                Event::Start(e) if e.name().as_ref() == "command" => {
                    r.command(&e, true, &mut out)?
                }
                Event::Empty(e) if e.name().as_ref() == "command" => {
                    r.command(&e, false, &mut out)?
                }
                Event::Eof => return Err(r.err("unexpected end of document")),
                _ => return Err(r.err("expected <command>")),
            }
        }
    }
    match r.next()? {
        Event::Eof => Ok(out),
        _ => Err(r.err("content after </output>")),
    }
}
