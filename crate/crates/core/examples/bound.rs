//! The per-run counting certificate log X - log Y next to n (ln n - 3).
//!
//! cargo run --release --example bound -- 2000

use nqueens_absorb::analysis;
use nqueens_absorb::greedy::{self, GreedyParams};

fn main() {
    let n: usize = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("n"));
    let out = greedy::run_greedy(&GreedyParams::new(n, 3)).unwrap();
    let w = analysis::counting_witness(&out.trajectory, n, n - out.stop).unwrap();
    println!("n = {n}, k = {}", w.k);
    println!("log X          = {:.2}", w.log_x);
    println!("log X (mean)   = {:.2}", w.log_x_band);
    println!("log Y          = {:.2}", w.log_y);
    println!("witness        = {:.2}  ({:.4} n ln n)", w.witness, w.witness / (n as f64 * (n as f64).ln()));
    println!("n (ln n - 3)   = {:.2}", w.theoretical);
}
