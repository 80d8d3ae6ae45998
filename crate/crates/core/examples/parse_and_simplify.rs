//! Parse an invariant, evaluate it in a context, and simplify it.
//!
//!     cargo run --example parse_and_simplify -- 'AND(TRUE(), OR(Owner("A"), FALSE()))'

use decision_engine::invariant::{holds_at, parse_invariant, simplify, AtomContext};

fn main() {
    let src = std::env::args()
        .nth(1)
        .unwrap_or_else(|| r#"AND(TRUE(),OR(Owner("A"),AND(FALSE(),TimePoint(3))))"#.into());
    let term = match parse_invariant(&src) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("parse error: {e}");
            std::process::exit(1);
        }
    };
    let simple = simplify(&term);
    println!("input      {term}  ({} nodes)", term.node_count());
    println!("simplified {simple}  ({} nodes)", simple.node_count());
    for ctx in [AtomContext::at(3), AtomContext::at(3).with_owner("A")] {
        println!("{ctx:?}: {:?}", holds_at(&simple, &ctx));
    }
}
