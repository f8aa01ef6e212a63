//! Success rate and counting witness over many seeded runs.
//!
//! cargo run --release --example campaign -- 500 50

use nqueens_absorb::cli::{self, CampaignOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(500, |s| s.parse().expect("n"));
    let trials: usize = args.next().map_or(50, |s| s.parse().expect("trials"));

    let summary = cli::campaign(&CampaignOptions::new(n, trials, 1)).unwrap();
    println!("n = {n}, stop = {}, success rate {:.3}", summary.stop, summary.success_rate);
    for d in &summary.mean_available_by_decile {
        println!("  t = {:>5}: mean |A| {:>12.1}, predicted {:>12.1}", d.t, d.mean_available, d.predicted);
    }
    if let Some(w) = &summary.witness_stats {
        println!(
            "witness / (n ln n): mean {:.4}, sd {:.4}, all positive: {}",
            w.normalized.mean, w.normalized.std, w.all_positive
        );
    }
}
