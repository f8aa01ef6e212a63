//! The rank coupling: unthreatened low-rank squares always end up in the greedy outcome.
//!
//! cargo run --release --example coupling -- 500

use nqueens_absorb::analysis;
use nqueens_absorb::greedy::default_stop;

fn main() {
    let n: usize = std::env::args().nth(1).map_or(500, |s| s.parse().expect("n"));
    let p = 1.0 / (4.0 * n as f64);
    for seed in 0..5 {
        let r = analysis::coupling_experiment(n, p, seed, default_stop(n)).unwrap();
        println!(
            "seed {seed}: |R| = {:>4}, |R~| = {:>4}, inside Q(T): {}, safe absorbers per query {:.1} (min {})",
            r.r_size, r.r_tilde_size, r.inclusion_holds, r.safe_counts.mean, r.safe_counts.min
        );
    }
}
