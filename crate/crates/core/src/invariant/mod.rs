//! The invariant term language.
//!
//! An [`Invariant`] is a finite tree built from logical connectives and
//! atoms for time, ownership, events, space and graph structure. Terms have
//! a textual form that mirrors their constructors, e.g.
//!
//! ```text
//! IMPLIES(AND(OR(TimeInterval(800,950),TimeInterval(1000,1050)),Owner("A")),OccupyBox(143,2612,1536,4056))
//! ```
//!
//! [`parse_invariant`] reads that syntax and the [`Display`](fmt::Display)
//! impl prints the canonical form (no whitespace, normalized coordinates).

mod eval;
mod parse;
mod simplify;

use std::fmt;

pub use eval::{holds_at, AtomContext, Truth};
pub use parse::{parse_invariant, parse_model, ModelLine, ParseError};
pub use simplify::simplify;

/// Abstract integer time unit.
pub type Tick = i64;

/// Integer grid coordinate.
pub type Coord = i64;

/// A closed tick interval with `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    start: Tick,
    end: Tick,
}

impl Interval {
    /// Builds an interval from two endpoints in either order.
    pub fn new(a: Tick, b: Tick) -> Self {
        Interval {
            start: a.min(b),
            end: a.max(b),
        }
    }

    pub fn start(&self) -> Tick {
        self.start
    }

    pub fn end(&self) -> Tick {
        self.end
    }

    pub fn contains(&self, t: Tick) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Axis-aligned rectangle on the integer grid, inclusive on all edges.
///
/// Corners are normalized per axis at construction, so `(143,4056,1536,2612)`
/// and `(143,2612,1536,4056)` denote the same box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridBox {
    x1: Coord,
    y1: Coord,
    x2: Coord,
    y2: Coord,
}

impl GridBox {
    pub fn new(x1: Coord, y1: Coord, x2: Coord, y2: Coord) -> Self {
        GridBox {
            x1: x1.min(x2),
            y1: y1.min(y2),
            x2: x1.max(x2),
            y2: y1.max(y2),
        }
    }

    /// The degenerate box holding a single lattice point.
    pub fn point(x: Coord, y: Coord) -> Self {
        GridBox::new(x, y, x, y)
    }

    pub fn x1(&self) -> Coord {
        self.x1
    }
    pub fn y1(&self) -> Coord {
        self.y1
    }
    pub fn x2(&self) -> Coord {
        self.x2
    }
    pub fn y2(&self) -> Coord {
        self.y2
    }

    /// `(x1, y1, x2, y2)` in normalized order.
    pub fn corners(&self) -> (Coord, Coord, Coord, Coord) {
        (self.x1, self.y1, self.x2, self.y2)
    }

    pub fn contains(&self, x: Coord, y: Coord) -> bool {
        self.x1 <= x && x <= self.x2 && self.y1 <= y && y <= self.y2
    }

    /// Number of lattice points inside the box.
    pub fn lattice_count(&self) -> u128 {
        let w = (self.x2 as i128 - self.x1 as i128 + 1) as u128;
        let h = (self.y2 as i128 - self.y1 as i128 + 1) as u128;
        w.saturating_mul(h)
    }

    /// Intersection with `other`, or `None` when the boxes share no point.
    pub fn intersection(&self, other: &GridBox) -> Option<GridBox> {
        let x1 = self.x1.max(other.x1);
        let y1 = self.y1.max(other.y1);
        let x2 = self.x2.min(other.x2);
        let y2 = self.y2.min(other.y2);
        (x1 <= x2 && y1 <= y2).then_some(GridBox { x1, y1, x2, y2 })
    }
}

impl fmt::Display for GridBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x1, self.y1, self.x2, self.y2)
    }
}

/// Axis-aligned cuboid, normalized per axis like [`GridBox`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridBox3 {
    min: [Coord; 3],
    max: [Coord; 3],
}

impl GridBox3 {
    pub fn new(x1: Coord, y1: Coord, z1: Coord, x2: Coord, y2: Coord, z2: Coord) -> Self {
        GridBox3 {
            min: [x1.min(x2), y1.min(y2), z1.min(z2)],
            max: [x1.max(x2), y1.max(y2), z1.max(z2)],
        }
    }

    pub fn min(&self) -> [Coord; 3] {
        self.min
    }

    pub fn max(&self) -> [Coord; 3] {
        self.max
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Invariant {
    And(Box<Invariant>, Box<Invariant>),
    Or(Box<Invariant>, Box<Invariant>),
    Not(Box<Invariant>),
    Implies(Box<Invariant>, Box<Invariant>),
    True,
    False,
    TimePoint(Tick),
    TimeInterval(Interval),
    Event(String),
    Owner(String),
    OccupyPoint(Coord, Coord),
    OccupyBox(GridBox),
    Occupy3DBox(GridBox3),
    Edge(String, String),
    Transition(String, String, String),
}

impl Invariant {
    pub fn and(lhs: Invariant, rhs: Invariant) -> Self {
        Invariant::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Invariant, rhs: Invariant) -> Self {
        Invariant::Or(Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Invariant) -> Self {
        Invariant::Not(Box::new(inner))
    }

    pub fn implies(lhs: Invariant, rhs: Invariant) -> Self {
        Invariant::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn time_interval(a: Tick, b: Tick) -> Self {
        Invariant::TimeInterval(Interval::new(a, b))
    }

    pub fn owner(label: impl Into<String>) -> Self {
        Invariant::Owner(label.into())
    }

    pub fn event(label: impl Into<String>) -> Self {
        Invariant::Event(label.into())
    }

    pub fn occupy_box(x1: Coord, y1: Coord, x2: Coord, y2: Coord) -> Self {
        Invariant::OccupyBox(GridBox::new(x1, y1, x2, y2))
    }

    /// Number of constructor nodes in the tree.
    pub fn node_count(&self) -> usize {
        match self {
            Invariant::And(a, b) | Invariant::Or(a, b) | Invariant::Implies(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Invariant::Not(a) => 1 + a.node_count(),
            _ => 1,
        }
    }

    pub fn is_temporal_atom(&self) -> bool {
        matches!(self, Invariant::TimePoint(_) | Invariant::TimeInterval(_))
    }

    /// True if any node satisfies `pred`.
    pub fn any(&self, pred: &impl Fn(&Invariant) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Invariant::And(a, b) | Invariant::Or(a, b) | Invariant::Implies(a, b) => {
                a.any(pred) || b.any(pred)
            }
            Invariant::Not(a) => a.any(pred),
            _ => false,
        }
    }

    /// Rebuilds the tree, replacing every atom with `f(atom)`.
    pub fn map_atoms(&self, f: &impl Fn(&Invariant) -> Invariant) -> Invariant {
        match self {
            Invariant::And(a, b) => Invariant::and(a.map_atoms(f), b.map_atoms(f)),
            Invariant::Or(a, b) => Invariant::or(a.map_atoms(f), b.map_atoms(f)),
            Invariant::Implies(a, b) => Invariant::implies(a.map_atoms(f), b.map_atoms(f)),
            Invariant::Not(a) => Invariant::not(a.map_atoms(f)),
            atom => f(atom),
        }
    }
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::And(a, b) => write!(f, "AND({a},{b})"),
            Invariant::Or(a, b) => write!(f, "OR({a},{b})"),
            Invariant::Not(a) => write!(f, "NOT({a})"),
            Invariant::Implies(a, b) => write!(f, "IMPLIES({a},{b})"),
            Invariant::True => f.write_str("TRUE()"),
            Invariant::False => f.write_str("FALSE()"),
            Invariant::TimePoint(t) => write!(f, "TimePoint({t})"),
            Invariant::TimeInterval(i) => write!(f, "TimeInterval({},{})", i.start, i.end),
            Invariant::Event(l) => {
                f.write_str("Event(")?;
                write_quoted(f, l)?;
                f.write_str(")")
            }
            Invariant::Owner(l) => {
                f.write_str("Owner(")?;
                write_quoted(f, l)?;
                f.write_str(")")
            }
            Invariant::OccupyPoint(x, y) => write!(f, "OccupyPoint({x},{y})"),
            Invariant::OccupyBox(b) => write!(f, "OccupyBox({b})"),
            Invariant::Occupy3DBox(b) => {
                let ([x1, y1, z1], [x2, y2, z2]) = (b.min, b.max);
                write!(f, "Occupy3DBox({x1},{y1},{z1},{x2},{y2},{z2})")
            }
            Invariant::Edge(s, t) => {
                f.write_str("Edge(")?;
                write_quoted(f, s)?;
                f.write_str(",")?;
                write_quoted(f, t)?;
                f.write_str(")")
            }
            Invariant::Transition(s, e, t) => {
                f.write_str("Transition(")?;
                write_quoted(f, s)?;
                f.write_str(",")?;
                write_quoted(f, e)?;
                f.write_str(",")?;
                write_quoted(f, t)?;
                f.write_str(")")
            }
        }
    }
}

/// Canonical text of a term; inverse of [`parse_invariant`].
pub fn serialize_invariant(inv: &Invariant) -> String {
    inv.to_string()
}
