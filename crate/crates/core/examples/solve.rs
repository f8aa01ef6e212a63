//! Build one n-queens configuration, check it, and draw it when it is small.
//!
//! cargo run --release --example solve -- 500 7

use nqueens_absorb::board::{self, Rule};
use nqueens_absorb::cli;
use nqueens_absorb::greedy::StopRule;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(500, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));

    let rec = cli::solve(n, seed, StopRule::default(), cli::DEFAULT_RETRIES).expect("valid parameters");
    println!("n = {n}, greedy stop = {}, holes k = {}, attempts = {}", rec.stop, rec.k, rec.attempts.len());
    for a in &rec.attempts {
        println!("  seed {}: placed {}, absorption aborted at {:?}", a.seed, a.phase1.placed, a.phase2.abort_step);
    }
    if !rec.completed() {
        println!("no attempt completed");
        return;
    }
    println!("valid: {}", board::verify_positions(n, rec.positions(), Rule::Classical));
    if n <= 64 {
        let mut cols = vec![0; n + 1];
        for [r, c] in &rec.queens {
            cols[*r] = *c;
        }
        for &col in &cols[1..] {
            let line: String = (1..=n).map(|c| if col == c { 'Q' } else { '.' }).collect();
            println!("{line}");
        }
    }
}
