//! Track |A(t)| against n²(1 - t/n)⁴ and the line counts against n(1 - t/n)³.
//!
//! cargo run --release --example trajectory -- 1000

use nqueens_absorb::analysis;
use nqueens_absorb::greedy::{self, GreedyParams, LineRecording};

fn main() {
    let n: usize = std::env::args().nth(1).map_or(1000, |s| s.parse().expect("n"));
    let out = greedy::run_greedy(&GreedyParams::new(n, 1).recording(LineRecording::Stats)).unwrap();
    let report = analysis::concentration_report(&out.trajectory, n, 0.1).unwrap();

    println!(
        "{:>6} {:>10} {:>12} {:>8} {:>6} {:>6} {:>8}",
        "t", "|A(t)|", "predicted", "ratio", "min S", "max S", "n p^3"
    );
    for step in report.steps.iter().step_by((n / 20).max(1)) {
        let pr = step.prediction;
        println!(
            "{:>6} {:>10} {:>12.0} {:>8.4} {:>6} {:>6} {:>8.1}",
            step.t,
            step.available,
            pr.a_pred,
            step.available as f64 / pr.a_pred,
            step.min_s,
            step.max_s,
            pr.s
        );
    }
    println!("within 10% of prediction at {:.1}% of steps", 100.0 * report.desk_band_rate);
}
