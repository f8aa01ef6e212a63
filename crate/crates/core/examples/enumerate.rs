//! Exact counts of classical and toroidal configurations.
//!
//! cargo run --release --example enumerate -- 12

use nqueens_absorb::oracles;

fn main() {
    let max: usize = std::env::args().nth(1).map_or(12, |s| s.parse().expect("n"));
    println!("{:>3} {:>10} {:>9}", "n", "classical", "toroidal");
    for n in 1..=max {
        let classic = oracles::enumerate_classic(n, true).unwrap();
        let toroidal = oracles::enumerate_toroidal(n, true).unwrap();
        println!("{n:>3} {:>10} {:>9}", classic.count, toroidal.count);
    }
}
