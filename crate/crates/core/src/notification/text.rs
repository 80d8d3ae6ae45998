//! One-line text form of a binding, used for command lists and reaction
//! templates:
//!
//! ```text
//! event category=highrisk id=1001 device=vxportal6
//! composite_image image=gridsubstation.jpg rect=350,600,120,150 text="130,90,red,Incident at Grid Substation"
//! map lat=-38.1771269 long=146.3428259 zoom=15z
//! ```
//!
//! `rect=` and `text=` add overlays in the order they appear; the text value
//! is `x,y,color,<text>`.

use super::xml::{command_attrs, command_from_attrs, Attrs};
use super::{DeviceBinding, NotificationError, Overlay, VisualizationCommand};
use crate::lineproto::{content_lines, parse_ints, push_field, tokenize};

pub fn parse_command_line(line: &str) -> Result<DeviceBinding, NotificationError> {
    let rec = tokenize(line).map_err(|e| NotificationError::Invalid(e.0))?;
    let mut overlays = Vec::new();
    let mut rest = Vec::new();
    let composite = rec.kind == "composite_image";
    for (k, v) in rec.fields {
        match k.as_str() {
            "rect" if composite => {
                let [x, y, w, h] =
                    parse_ints::<4>("rect", &v).map_err(|e| NotificationError::Invalid(e.0))?;
                let dim = |d: i64| {
                    u32::try_from(d)
                        .map_err(|_| NotificationError::Invalid(format!("rect: bad size {d}")))
                };
                overlays.push(Overlay::Rect {
                    x,
                    y,
                    w: dim(w)?,
                    h: dim(h)?,
                });
            }
            "text" if composite => {
                let mut parts = v.splitn(4, ',');
                let (Some(x), Some(y), Some(color), Some(text)) =
                    (parts.next(), parts.next(), parts.next(), parts.next())
                else {
                    return Err(NotificationError::Invalid(format!(
                        "text overlay must be x,y,color,text: {v:?}"
                    )));
                };
                let num = |s: &str| {
                    s.trim().parse::<i64>().map_err(|_| {
                        NotificationError::Invalid(format!("text overlay: bad coordinate {s:?}"))
                    })
                };
                overlays.push(Overlay::Text {
                    text: text.to_string(),
                    x: num(x)?,
                    y: num(y)?,
                    color: color.to_string(),
                });
            }
            _ => rest.push((k, v)),
        }
    }
    let mut attrs = Attrs::new(rest, 0);
    let device = attrs.take("device");
    let mut command = command_from_attrs(&rec.kind, &mut attrs)?;
    if let VisualizationCommand::CompositeImage { overlays: o, .. } = &mut command {
        o.extend(overlays);
    }
    Ok(DeviceBinding {
        device,
        command,
        extras: attrs.into_extras(),
    })
}

pub fn format_command_line(b: &DeviceBinding) -> String {
    let mut out = b.command.type_name().to_string();
    for (k, v) in command_attrs(&b.command) {
        push_field(&mut out, k, &v);
    }
    if let VisualizationCommand::CompositeImage { overlays, .. } = &b.command {
        for o in overlays {
            match o {
                Overlay::Rect { x, y, w, h } => {
                    push_field(&mut out, "rect", &format!("{x},{y},{w},{h}"))
                }
                Overlay::Text { text, x, y, color } => {
                    push_field(&mut out, "text", &format!("{x},{y},{color},{text}"))
                }
            }
        }
    }
    if let Some(d) = &b.device {
        push_field(&mut out, "device", d);
    }
    for (k, v) in &b.extras {
        push_field(&mut out, k, v);
    }
    out
}

/// Parses a command list file; errors carry the 1-based line number.
pub fn parse_command_list(text: &str) -> Result<Vec<DeviceBinding>, NotificationError> {
    content_lines(text)
        .map(|(n, l)| {
            parse_command_line(l).map_err(|e| NotificationError::Invalid(format!("line {n}: {e}")))
        })
        .collect()
}
