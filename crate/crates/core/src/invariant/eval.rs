use std::collections::BTreeSet;

use super::{Coord, Invariant, Tick};

/// Kleene three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    pub fn implies(self, other: Truth) -> Truth {
        self.not().or(other)
    }
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// The world a term is evaluated against.
///
/// Without a `point`, spatial atoms are indeterminate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomContext {
    pub time: Tick,
    pub point: Option<(Coord, Coord)>,
    pub owners: BTreeSet<String>,
    pub events: BTreeSet<String>,
}

impl AtomContext {
    pub fn at(time: Tick) -> Self {
        AtomContext {
            time,
            ..Default::default()
        }
    }

    pub fn with_point(mut self, x: Coord, y: Coord) -> Self {
        self.point = Some((x, y));
        self
    }

    pub fn with_owner(mut self, owner: impl Into<String>) -> Self {
        self.owners.insert(owner.into());
        self
    }

    pub fn with_event(mut self, event: impl Into<String>) -> Self {
        self.events.insert(event.into());
        self
    }
}

pub fn holds_at(inv: &Invariant, ctx: &AtomContext) -> Truth {
    match inv {
        Invariant::And(a, b) => holds_at(a, ctx).and(holds_at(b, ctx)),
        Invariant::Or(a, b) => holds_at(a, ctx).or(holds_at(b, ctx)),
        Invariant::Implies(a, b) => holds_at(a, ctx).implies(holds_at(b, ctx)),
        Invariant::Not(a) => holds_at(a, ctx).not(),
        Invariant::True => Truth::True,
        Invariant::False => Truth::False,
        Invariant::TimePoint(t) => (ctx.time == *t).into(),
        Invariant::TimeInterval(i) => i.contains(ctx.time).into(),
        Invariant::Owner(l) => ctx.owners.contains(l).into(),
        Invariant::Event(l) => ctx.events.contains(l).into(),
        Invariant::OccupyBox(b) => match ctx.point {
            Some((x, y)) => b.contains(x, y).into(),
            None => Truth::Unknown,
        },
        Invariant::OccupyPoint(px, py) => match ctx.point {
            Some((x, y)) => (x == *px && y == *py).into(),
            None => Truth::Unknown,
        },
        Invariant::Occupy3DBox(_) | Invariant::Edge(..) | Invariant::Transition(..) => {
            Truth::Unknown
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::{parse_invariant, strategy};
    use proptest::prelude::*;

    /// Independent evaluator: reduce to a truth table over {T, F, U} encoded as
    /// 1.0 / 0.0 / 0.5 with min/max/1-x, the fuzzy reading of Kleene logic.
    fn fuzzy(inv: &Invariant, ctx: &AtomContext) -> f64 {
        let b = |v: bool| if v { 1.0 } else { 0.0 };
        match inv {
            Invariant::And(a, c) => fuzzy(a, ctx).min(fuzzy(c, ctx)),
            Invariant::Or(a, c) => fuzzy(a, ctx).max(fuzzy(c, ctx)),
            Invariant::Implies(a, c) => (1.0 - fuzzy(a, ctx)).max(fuzzy(c, ctx)),
            Invariant::Not(a) => 1.0 - fuzzy(a, ctx),
            Invariant::True => 1.0,
            Invariant::False => 0.0,
            Invariant::TimePoint(t) => b(ctx.time == *t),
            Invariant::TimeInterval(i) => b(i.start() <= ctx.time && ctx.time <= i.end()),
            Invariant::Owner(l) => b(ctx.owners.iter().any(|o| o == l)),
            Invariant::Event(l) => b(ctx.events.iter().any(|o| o == l)),
            Invariant::OccupyBox(bx) => ctx.point.map_or(0.5, |(x, y)| {
                b((bx.x1()..=bx.x2()).contains(&x) && (bx.y1()..=bx.y2()).contains(&y))
            }),
            Invariant::OccupyPoint(px, py) => ctx.point.map_or(0.5, |p| b(p == (*px, *py))),
            _ => 0.5,
        }
    }

    fn as_truth(v: f64) -> Truth {
        if v == 1.0 {
            Truth::True
        } else if v == 0.0 {
            Truth::False
        } else {
            Truth::Unknown
        }
    }

    #[test]
    fn region_a_formula_holds_inside_window_box_and_owner() {
        let t = parse_invariant("IMPLIES(AND(OR(TimeInterval(800,950),TimeInterval(1000,1050)),Owner(\"A\")),OccupyBox(143,4056,1536,2612))").unwrap();
        let ctx = AtomContext::at(900).with_point(200, 3000).with_owner("A");
        assert_eq!(holds_at(&t, &ctx), Truth::True);
        assert_eq!(as_truth(fuzzy(&t, &ctx)), Truth::True);
        // antecedent true, point outside the box
        let outside = AtomContext::at(900).with_point(0, 0).with_owner("A");
        assert_eq!(holds_at(&t, &outside), Truth::False);
    }

    #[test]
    fn interval_bounds_are_inclusive() {
        let t = Invariant::time_interval(800, 950);
        assert_eq!(holds_at(&t, &AtomContext::at(950)), Truth::True);
        assert_eq!(holds_at(&t, &AtomContext::at(800)), Truth::True);
        assert_eq!(holds_at(&t, &AtomContext::at(951)), Truth::False);
    }

    #[test]
    fn spatial_atoms_unknown_without_point() {
        let t = Invariant::occupy_box(0, 0, 10, 10);
        assert_eq!(holds_at(&t, &AtomContext::at(0)), Truth::Unknown);
        assert_eq!(
            holds_at(&Invariant::OccupyPoint(1, 1), &AtomContext::at(0)),
            Truth::Unknown
        );
        assert_eq!(
            holds_at(
                &Invariant::Edge("a".into(), "b".into()),
                &AtomContext::at(0).with_point(0, 0)
            ),
            Truth::Unknown
        );
    }

    #[test]
    fn kleene_tables() {
        use Truth::*;
        assert_eq!(Unknown.and(False), False);
        assert_eq!(Unknown.or(True), True);
        assert_eq!(Unknown.and(True), Unknown);
        assert_eq!(False.implies(Unknown), True);
        assert_eq!(Unknown.implies(True), True);
        assert_eq!(Unknown.implies(False), Unknown);
    }

    fn context() -> impl Strategy<Value = AtomContext> {
        (
            -5i64..25,
            proptest::option::of((-3i64..8, -3i64..8)),
            proptest::collection::btree_set(prop_oneof![Just("A"), Just("B"), Just("cloud")], 0..3),
            proptest::collection::btree_set(prop_oneof![Just("A"), Just("B")], 0..2),
        )
            .prop_map(|(time, point, owners, events)| AtomContext {
                time,
                point,
                owners: owners.into_iter().map(String::from).collect(),
                events: events.into_iter().map(String::from).collect(),
            })
    }

    proptest! {
        #[test]
        fn agrees_with_fuzzy_oracle(t in strategy::term(), ctx in context()) {
            prop_assert_eq!(holds_at(&t, &ctx), as_truth(fuzzy(&t, &ctx)));
        }

        #[test]
        fn refining_point_only_resolves_unknown(t in strategy::term(), ctx in context(), x in -3i64..8, y in -3i64..8) {
            let mut coarse = ctx.clone();
            coarse.point = None;
            let fine = coarse.clone().with_point(x, y);
            let (a, b) = (holds_at(&t, &coarse), holds_at(&t, &fine));
            if a != Truth::Unknown {
                prop_assert_eq!(a, b);
            }
        }
    }
}
