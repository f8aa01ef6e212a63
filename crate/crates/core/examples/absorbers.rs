//! Absorbers and safe absorbers on small boards.
//!
//! cargo run --example absorbers

use std::collections::BTreeSet;

use nqueens_absorb::absorption::{self, AbsorptionOutcome};
use nqueens_absorb::{PartialConfig, Position};

fn show<'a>(ps: impl IntoIterator<Item = &'a Position>) -> String {
    ps.into_iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

fn main() {
    let cfg = PartialConfig::from_positions(5, [(1, 3), (3, 4), (4, 1), (5, 5)].map(Position::from)).unwrap();
    let q = Position::new(2, 2);
    let found = absorption::absorbers(&cfg, q);
    println!("absorbers for {q}: {}", show(&found));
    if let Some(&a) = found.first() {
        let next = absorption::apply_absorber(&cfg, q, a).unwrap();
        println!("after exchanging {a}: {}", show(next.queen_set()));
    }

    match absorption::run_absorption(&cfg, 0).unwrap() {
        AbsorptionOutcome::Completed { config, plan } => {
            println!("completed via {}: {}", show(&plan.choices), show(config.queen_set()))
        }
        AbsorptionOutcome::Aborted { step, query, .. } => println!("stuck at step {step} on {query}"),
    }

    let set: BTreeSet<Position> = [(4, 1), (7, 2), (1, 3), (3, 7), (8, 8)].into_iter().map(Position::from).collect();
    let q = Position::new(5, 4);
    println!("safe absorbers for {q} on the 8x8 set: {}", show(&absorption::safe_absorbers(&set, q, 8)));
}
