//! Draw the region S of balanced squares and report its row and pair counts.
//!
//! cargo run --example balanced_region -- 40

use nqueens_absorb::absorption;
use nqueens_absorb::Position;

fn main() {
    let n: usize = std::env::args().nth(1).map_or(40, |s| s.parse().expect("n"));
    for r in 1..=n {
        let line: String =
            (1..=n).map(|c| if absorption::in_balanced_region(Position::new(r, c), n) { '#' } else { '.' }).collect();
        println!("{line}");
    }
    let region = absorption::balanced_region(n);
    let row_min = (1..=n).map(|r| region.iter().filter(|p| p.row == r).count()).min().unwrap();
    let pair_min = (1..=n)
        .flat_map(|r| (1..=n).map(move |c| Position::new(r, c)))
        .map(|q| absorption::balanced_pair_count(n, q).unwrap())
        .min()
        .unwrap();
    println!(
        "|S| = {}, smallest row {row_min} (n/2 = {}), fewest pairs {pair_min} (n²/5 = {})",
        region.len(),
        n / 2,
        n * n / 5
    );
}
