use thiserror::Error;

use super::{GridBox3, Invariant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("{constructor} takes {expected} argument(s), found {found} (at byte {position})")]
    Arity {
        constructor: String,
        expected: usize,
        found: usize,
        position: usize,
    },
    #[error("line {line}: {source}")]
    Model {
        line: usize,
        #[source]
        source: Box<ParseError>,
    },
}

impl ParseError {
    fn syntax(position: usize, expected: impl Into<String>) -> Self {
        ParseError::Syntax {
            position,
            expected: expected.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Arg {
    Term(Invariant),
    Int(i64),
    Str(String),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(ParseError::syntax(self.pos, format!("'{c}'")))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 || !rest.as_bytes()[0].is_ascii_alphabetic() {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let sign = usize::from(rest.starts_with('-') || rest.starts_with('+'));
        let digits = rest[sign..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len() - sign);
        if digits == 0 {
            return Err(ParseError::syntax(start, "integer"));
        }
        let text = &rest[..sign + digits];
        let value = text
            .parse()
            .map_err(|_| ParseError::syntax(start, "integer within 64-bit range"))?;
        self.pos += text.len();
        Ok(value)
    }

    fn string(&mut self) -> Result<String, ParseError> {
        self.expect('"')?;
        let mut out = String::new();
        let mut chars = self.src[self.pos..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e @ ('"' | '\\'))) => out.push(e),
                    Some((j, _)) => {
                        return Err(ParseError::syntax(self.pos + j, "'\"' or '\\' after '\\'"))
                    }
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(ParseError::syntax(self.src.len(), "closing '\"'"))
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        match self.peek() {
            Some('"') => self.string().map(Arg::Str),
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' => self.int().map(Arg::Int),
            _ => self.term().map(Arg::Term),
        }
    }

    fn term(&mut self) -> Result<Invariant, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let name = self
            .ident()
            .ok_or_else(|| ParseError::syntax(start, "constructor name"))?;
        self.expect('(')?;
        let mut args = Vec::new();
        if self.peek() != Some(')') {
            loop {
                args.push(self.arg()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => break,
                    _ => return Err(ParseError::syntax(self.pos, "',' or ')'")),
                }
            }
        }
        self.expect(')')?;
        build(name, args, start)
    }
}

fn build(name: &str, args: Vec<Arg>, position: usize) -> Result<Invariant, ParseError> {
    let arity = match name {
        "TRUE" | "FALSE" => 0,
        "NOT" | "TimePoint" | "Event" | "Owner" => 1,
        "AND" | "OR" | "IMPLIES" | "TimeInterval" | "OccupyPoint" | "Edge" => 2,
        "Transition" => 3,
        "OccupyBox" => 4,
        "Occupy3DBox" => 6,
        _ => return Err(ParseError::syntax(position, "known constructor name")),
    };
    if args.len() != arity {
        return Err(ParseError::Arity {
            constructor: name.to_string(),
            expected: arity,
            found: args.len(),
            position,
        });
    }
    let mismatch = |what: &str| ParseError::syntax(position, format!("{what} arguments to {name}"));
    let terms = || -> Result<Vec<Invariant>, ParseError> {
        args.iter()
            .map(|a| match a {
                Arg::Term(t) => Ok(t.clone()),
                _ => Err(mismatch("term")),
            })
            .collect()
    };
    let ints = || -> Result<Vec<i64>, ParseError> {
        args.iter()
            .map(|a| match a {
                Arg::Int(v) => Ok(*v),
                _ => Err(mismatch("integer")),
            })
            .collect()
    };
    let strs = || -> Result<Vec<String>, ParseError> {
        args.iter()
            .map(|a| match a {
                Arg::Str(s) => Ok(s.clone()),
                _ => Err(mismatch("string")),
            })
            .collect()
    };
    let inv = match name {
        "TRUE" => Invariant::True,
        "FALSE" => Invariant::False,
        "NOT" => Invariant::not(terms()?.remove(0)),
        "AND" | "OR" | "IMPLIES" => {
            let mut t = terms()?;
            let (b, a) = (t.pop().unwrap(), t.pop().unwrap());
            match name {
                "AND" => Invariant::and(a, b),
                "OR" => Invariant::or(a, b),
                _ => Invariant::implies(a, b),
            }
        }
        "TimePoint" => Invariant::TimePoint(ints()?[0]),
        "TimeInterval" => {
            let v = ints()?;
            Invariant::time_interval(v[0], v[1])
        }
        "OccupyPoint" => {
            let v = ints()?;
            Invariant::OccupyPoint(v[0], v[1])
        }
        "OccupyBox" => {
            let v = ints()?;
            Invariant::occupy_box(v[0], v[1], v[2], v[3])
        }
        "Occupy3DBox" => {
            let v = ints()?;
            Invariant::Occupy3DBox(GridBox3::new(v[0], v[1], v[2], v[3], v[4], v[5]))
        }
        "Event" => Invariant::Event(strs()?.remove(0)),
        "Owner" => Invariant::Owner(strs()?.remove(0)),
        "Edge" => {
            let mut s = strs()?;
            let t = s.pop().unwrap();
            Invariant::Edge(s.pop().unwrap(), t)
        }
        "Transition" => {
            let mut s = strs()?;
            let t = s.pop().unwrap();
            let e = s.pop().unwrap();
            Invariant::Transition(s.pop().unwrap(), e, t)
        }
        _ => unreachable!(),
    };
    Ok(inv)
}

/// Parses one term. Whitespace between tokens is ignored.
pub fn parse_invariant(text: &str) -> Result<Invariant, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let term = p.term()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(ParseError::syntax(p.pos, "end of input"));
    }
    Ok(term)
}

/// A term read from a model file together with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelLine {
    pub line: usize,
    pub term: Invariant,
}

/// Parses a model file: one term per line, blank lines and `#` comments skipped.
pub fn parse_model(text: &str) -> Result<Vec<ModelLine>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let term = parse_invariant(line).map_err(|e| ParseError::Model {
            line: idx + 1,
            source: Box::new(e),
        })?;
        out.push(ModelLine {
            line: idx + 1,
            term,
        });
    }
    Ok(out)
}
