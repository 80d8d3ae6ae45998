use super::ReasoningError;
use crate::invariant::{simplify, Invariant, Tick};

/// Fixes the time to `t`: temporal atoms become constants, then the term is
/// simplified. The result has no `TimePoint`/`TimeInterval` left.
pub fn filter_by_time(inv: &Invariant, t: Tick) -> Invariant {
    let fixed = inv.map_atoms(&|atom| match atom {
        Invariant::TimePoint(p) => bool_atom(*p == t),
        Invariant::TimeInterval(i) => bool_atom(i.contains(t)),
        other => other.clone(),
    });
    simplify(&fixed)
}

/// Resolves every `Owner` atom against `label`, then simplifies.
///
/// Requires a term without temporal atoms.
pub fn filter_by_owner(inv: &Invariant, label: &str) -> Result<Invariant, ReasoningError> {
    if inv.any(&Invariant::is_temporal_atom) {
        return Err(ReasoningError::Precondition);
    }
    let fixed = inv.map_atoms(&|atom| match atom {
        Invariant::Owner(l) => bool_atom(l == label),
        other => other.clone(),
    });
    Ok(simplify(&fixed))
}

fn bool_atom(b: bool) -> Invariant {
    if b {
        Invariant::True
    } else {
        Invariant::False
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::{holds_at, parse_invariant, strategy, AtomContext};
    use proptest::prelude::*;

    fn region_a() -> Invariant {
        parse_invariant("IMPLIES(AND(OR(TimeInterval(800,950),TimeInterval(1000,1050)),Owner(\"A\")),OccupyBox(143,4056,1536,2612))").unwrap()
    }

    #[test]
    fn region_a_formula_inside_first_interval() {
        let f = filter_by_time(&region_a(), 900);
        assert_eq!(
            f.to_string(),
            "IMPLIES(Owner(\"A\"),OccupyBox(143,2612,1536,4056))"
        );
        assert_eq!(
            filter_by_owner(&f, "A").unwrap(),
            Invariant::occupy_box(143, 2612, 1536, 4056)
        );
        assert_eq!(filter_by_owner(&f, "B").unwrap(), Invariant::True);
    }

    #[test]
    fn region_a_formula_between_intervals() {
        assert_eq!(filter_by_time(&region_a(), 975), Invariant::True);
    }

    #[test]
    fn direct_membership() {
        assert_eq!(
            filter_by_time(&Invariant::time_interval(0, 10), 5),
            Invariant::True
        );
        assert_eq!(
            filter_by_owner(&Invariant::owner("X"), "X").unwrap(),
            Invariant::True
        );
    }

    #[test]
    fn owner_filter_rejects_temporal_atoms() {
        assert_eq!(
            filter_by_owner(&region_a(), "A"),
            Err(ReasoningError::Precondition)
        );
    }

    #[test]
    fn time_filter_agrees_with_evaluation_at_900() {
        let f = filter_by_time(&region_a(), 900);
        for x in (100..1600).step_by(97) {
            for y in (2500..4200).step_by(113) {
                for owner in ["A", "B"] {
                    let ctx = AtomContext::at(900).with_point(x, y).with_owner(owner);
                    assert_eq!(holds_at(&f, &ctx), holds_at(&region_a(), &ctx));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn filters_are_sound(
            t in strategy::term(),
            time in -5i64..25,
            point in proptest::option::of((-3i64..8, -3i64..8)),
            owner in prop_oneof![Just("A"), Just("B"), Just("cloud")],
        ) {
            let mut ctx = AtomContext::at(time).with_owner(owner);
            ctx.point = point;
            let by_time = filter_by_time(&t, time);
            prop_assert!(!by_time.any(&Invariant::is_temporal_atom));
            prop_assert_eq!(holds_at(&by_time, &ctx), holds_at(&t, &ctx));
            let by_owner = filter_by_owner(&by_time, owner).unwrap();
            prop_assert_eq!(holds_at(&by_owner, &ctx), holds_at(&t, &ctx));
        }
    }
}
