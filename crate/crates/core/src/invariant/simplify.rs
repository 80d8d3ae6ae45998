use super::Invariant;

/// Rewrites `inv` to a fixpoint of the constant and idempotence laws.
///
/// Every rule is sound under three-valued evaluation and none grows the
/// term, so the result agrees with the input in every context and has at
/// most as many nodes.
pub fn simplify(inv: &Invariant) -> Invariant {
    let mut current = inv.clone();
    loop {
        let next = pass(&current);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn pass(inv: &Invariant) -> Invariant {
    use Invariant::*;
    match inv {
        And(a, b) => match (pass(a), pass(b)) {
            (False, _) | (_, False) => False,
            (True, x) | (x, True) => x,
            (x, y) if x == y => x,
            (x, y) => Invariant::and(x, y),
        },
        Or(a, b) => match (pass(a), pass(b)) {
            (True, _) | (_, True) => True,
            (False, x) | (x, False) => x,
            (x, y) if x == y => x,
            (x, y) => Invariant::or(x, y),
        },
        Implies(a, b) => match (pass(a), pass(b)) {
            (False, _) | (_, True) => True,
            (True, x) => x,
            (x, y) => Invariant::implies(x, y),
        },
        Not(a) => match pass(a) {
            True => False,
            False => True,
            Not(x) => *x,
            x => Invariant::not(x),
        },
        atom => atom.clone(),
    }
}
