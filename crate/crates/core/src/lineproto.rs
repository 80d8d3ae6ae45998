//! Tokenizer for the `kind key=value key="quoted value"` line format shared
//! by event, weather, rule, profile, device and command files.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct LineError(pub String);

/// One tokenized record: the leading keyword and its ordered fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

impl Record {
    /// First value for `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, LineError> {
        self.get(key)
            .ok_or_else(|| LineError(format!("missing {key}")))
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.fields
            .iter()
            .filter(move |(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn tokenize(line: &str) -> Result<Record, LineError> {
    let line = line.trim();
    let (kind, mut rest) = match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], &line[i..]),
        None => (line, ""),
    };
    if kind.is_empty() {
        return Err(LineError("empty line".into()));
    }
    let mut fields = Vec::new();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let eq = rest
            .find(|c: char| c == '=' || c.is_whitespace())
            .filter(|&i| rest.as_bytes()[i] == b'=')
            .ok_or_else(|| {
                let word = rest.split_whitespace().next().unwrap_or(rest);
                LineError(format!("expected key=value, found {word:?}"))
            })?;
        let key = &rest[..eq];
        if key.is_empty() {
            return Err(LineError("empty key".into()));
        }
        rest = &rest[eq + 1..];
        let value = if let Some(quoted) = rest.strip_prefix('"') {
            let mut value = String::new();
            let mut chars = quoted.char_indices();
            let mut end = None;
            while let Some((i, c)) = chars.next() {
                match c {
                    '"' => {
                        end = Some(i);
                        break;
                    }
                    '\\' => match chars.next() {
                        Some((_, e @ ('"' | '\\'))) => value.push(e),
                        Some((_, 'n')) => value.push('\n'),
                        _ => return Err(LineError(format!("bad escape in {key}"))),
                    },
                    c => value.push(c),
                }
            }
            let end = end.ok_or_else(|| LineError(format!("unterminated quote in {key}")))?;
            rest = &quoted[end + 1..];
            if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                return Err(LineError(format!("junk after quoted {key}")));
            }
            value
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            let v = rest[..end].to_string();
            rest = &rest[end..];
            v
        };
        fields.push((key.to_string(), value));
    }
    Ok(Record {
        kind: kind.to_string(),
        fields,
    })
}

/// Writes `value` bare when it is a plain token, quoted otherwise.
pub fn push_value(out: &mut String, value: &str) {
    let bare = !value.is_empty()
        && !value
            .chars()
            .any(|c| c.is_whitespace() || c == '"' || c == '\\');
    if bare {
        out.push_str(value);
    } else {
        out.push('"');
        for c in value.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('"');
    }
}

pub fn push_field(out: &mut String, key: &str, value: &str) {
    let _ = write!(out, " {key}=");
    push_value(out, value);
}

/// Content lines with their 1-based numbers; blanks and `#` comments dropped.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then_some((i + 1, l))
    })
}

pub fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, LineError> {
    v.parse()
        .map_err(|_| LineError(format!("{key}: not an integer: {v:?}")))
}

/// Parses `a,b,c,...` into exactly `N` integers.
pub fn parse_ints<const N: usize>(key: &str, v: &str) -> Result<[i64; N], LineError> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(LineError(format!(
            "{key}: expected {N} comma-separated integers, found {v:?}"
        )));
    }
    let mut out = [0i64; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = parse_int(key, p)?;
    }
    Ok(out)
}
