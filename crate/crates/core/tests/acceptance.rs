//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nqueens_absorb::absorption::{self, AbsorptionOutcome};
use nqueens_absorb::analysis::{self, predict};
use nqueens_absorb::board::{self, far_segment_sizes, PartialConfig, Position, Rule};
use nqueens_absorb::cli::{self, CampaignOptions};
use nqueens_absorb::greedy::{self, GreedyParams, LineRecording, StopRule};
use nqueens_absorb::{oracles, seeds};
use num_bigint::BigUint;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

type Criterion = (&'static str, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

fn over_budget(start: Instant, limit: Duration) -> Option<String> {
    let used = start.elapsed();
    (used > limit).then(|| format!("; runtime {:.1}s exceeds {}s", used.as_secs_f64(), limit.as_secs()))
}

fn timed(limit_secs: u64, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    match over_budget(start, Duration::from_secs(limit_secs)) {
        Some(msg) => {
            v.pass = false;
            v.detail.push_str(&msg);
        }
        None => v.detail.push_str(&format!(" [{:.1}s]", start.elapsed().as_secs_f64())),
    }
    v
}

fn c1_oracle_agreement() -> Verdict {
    timed(60, || {
        let mut mismatches = Vec::new();
        for n in 1..=10 {
            let fast = oracles::enumerate_classic(n, false).unwrap().count;
            let slow = oracles::permutation_filter_count(n);
            if fast != slow {
                mismatches.push(format!("n={n}: {fast} vs {slow}"));
            }
        }
        let tor4 = oracles::enumerate_toroidal(4, false).unwrap().count;
        let greedy4 = greedy::run_greedy(&GreedyParams::new(4, 0).with_stop(4)).unwrap();
        let pass = mismatches.is_empty() && tor4 == 0 && greedy4.aborted;
        Verdict::new(
            pass,
            format!(
                "classic n=1..10 mismatches {:?}; toroidal(4) = {tor4}; n=4 greedy to 4 aborted = {}",
                mismatches, greedy4.aborted
            ),
        )
    })
}

fn c2_pipeline_validity() -> Verdict {
    // quotas of completed runs per board size, 10,000 in total
    let quotas = [(8usize, 7000usize), (16, 1000), (32, 1000), (100, 1000)];
    timed(600, || {
        let mut invalid = 0usize;
        let mut parts = Vec::new();
        let mut total = 0;
        for (n, quota) in quotas {
            let mut done = 0;
            let mut seed = 0u64;
            while done < quota && seed < 5_000_000 {
                let rec = cli::solve(n, seed, StopRule::default(), cli::DEFAULT_RETRIES).unwrap();
                if rec.completed() {
                    done += 1;
                    let ok = rec.queens.len() == n && board::verify_positions(n, rec.positions(), Rule::Classical);
                    invalid += usize::from(!ok);
                }
                seed += 1;
            }
            total += done;
            parts.push(format!("n={n}: {done} completed of {seed} solves"));
        }
        Verdict::new(invalid == 0 && total == 10_000, format!("{}; invalid {invalid}", parts.join(", ")))
    })
}

fn c3_completion_rate() -> Verdict {
    timed(900, || {
        let mut pass = true;
        let mut parts = Vec::new();
        for n in [100, 500, 1000] {
            let mut opts = CampaignOptions::new(n, 100, 2024);
            opts.retries = 3;
            let s = cli::campaign(&opts).unwrap();
            pass &= s.success_rate >= 0.99;
            parts.push(format!("n={n}: {:.2}", s.success_rate));
        }
        Verdict::new(pass, format!("success with <= 3 retries (need >= 0.99): {}", parts.join(", ")))
    })
}

fn c4_concentration() -> Verdict {
    let n = 1000;
    let half = n / 2;
    let target_a = (n * n) as f64 / 16.0;
    let target_s = n as f64 / 8.0;
    timed(600, || {
        let mut a_sum = 0.0;
        let (mut inside, mut samples) = (0usize, 0usize);
        let (mut lo, mut hi) = (u32::MAX, 0);
        let mut band_ok = true;
        let mut vacuous = 0usize;
        for seed in 0..20 {
            let out = greedy::run_greedy(&GreedyParams::new(n, seed).recording(LineRecording::Full)).unwrap();
            let traj = &out.trajectory;
            a_sum += traj.available[half] as f64;
            for s in traj.line_counts.as_ref().unwrap()[half].iter().flatten() {
                samples += 1;
                inside += usize::from((*s as f64 - target_s).abs() <= 0.15 * target_s);
                lo = lo.min(*s);
                hi = hi.max(*s);
            }
            let report = analysis::concentration_report(traj, n, cli::DEFAULT_REL_TOL).unwrap();
            for step in &report.steps[..=half] {
                band_ok &= step.band_pass && step.line_band_pass;
                vacuous += usize::from(seed == 0 && step.band_vacuous);
            }
        }
        let mean_a = a_sum / 20.0;
        let a_ok = (mean_a - target_a).abs() <= 0.05 * target_a;
        let frac = inside as f64 / samples as f64;
        let s_ok = frac >= 0.95;
        let eps_half = predict(half, n).unwrap().eps;
        let band_meaningful = vacuous == 0;
        Verdict::new(
            a_ok && s_ok && band_ok && band_meaningful,
            format!(
                "mean |A(n/2)| = {mean_a:.0} (target 62500 ± 5%): {}; S_l in [{lo}, {hi}], {:.3} within 15% of 125: {}; \
                 stated band satisfied for t <= n/2: {band_ok}, vacuous at {vacuous} of {} steps (eps(n/2) = {eps_half:.3e})",
                ok(a_ok),
                frac,
                ok(s_ok),
                half + 1
            ),
        )
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "out of range"
    }
}

fn c5_step_audit() -> Verdict {
    timed(300, || {
        let mut runs = 0;
        let mut failed = 0;
        for (n, count) in [(8usize, 200u64), (50, 200), (200, 50), (1000, 5)] {
            for seed in 0..count {
                let out = greedy::run_greedy(&GreedyParams::new(n, seed).recording_lines()).unwrap();
                runs += 1;
                failed += usize::from(!greedy::step_change_audit(&out).unwrap());
            }
        }
        Verdict::new(failed == 0, format!("{} of {runs} recorded runs pass", runs - failed))
    })
}

/// `C(n, 2k) · (2k)!/(2^k k!) · 2^k · (n-k)!` evaluated exactly.
fn exact_multiplicity(n: u64, k: u64) -> BigUint {
    let fact = |m: u64| (1..=m).fold(BigUint::from(1u32), |acc, i| acc * i);
    let choose = fact(n) / (fact(2 * k) * fact(n - 2 * k));
    let pairings = fact(2 * k) / (BigUint::from(2u32).pow(k as u32) * fact(k));
    choose * pairings * BigUint::from(2u32).pow(k as u32) * fact(n - k)
}

fn c6_counting_witness() -> Verdict {
    let n = 1000;
    timed(600, || {
        let mut ratios = Vec::new();
        let mut all_positive = true;
        for seed in 0..20 {
            let out = greedy::run_greedy(&GreedyParams::new(n, seed)).unwrap();
            let w = analysis::counting_witness(&out.trajectory, n, n - out.stop).unwrap();
            all_positive &= w.witness > 0.0;
            ratios.push(w.witness / (n as f64 * (n as f64).ln()));
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let mut worst = 0.0f64;
        for big_n in 1..=30u64 {
            for k in 0..=5u64.min(big_n / 2) {
                let exact: f64 = exact_multiplicity(big_n, k).to_string().parse::<f64>().unwrap().ln();
                worst = worst.max((exact - analysis::log_multiplicity(big_n as usize, k as usize)).abs());
            }
        }
        let in_range = (0.5..=0.7).contains(&mean);
        Verdict::new(
            in_range && all_positive && worst <= 1e-6,
            format!(
                "witness/(n ln n) mean {mean:.4} (need [0.5, 0.7]): {}; all positive: {all_positive}; \
                 log Y max error vs exact {worst:.2e}",
                ok(in_range)
            ),
        )
    })
}

fn c7_coupling() -> Verdict {
    let n = 500;
    let p = 1.0 / (4.0 * n as f64);
    timed(600, || {
        let reports = cli::coupling_reports(n, p, 77, greedy::default_stop(n), 50, 0).unwrap();
        let within: Vec<_> = reports.iter().filter(|r| r.r_within_stop).collect();
        let held = within.iter().filter(|r| r.inclusion_holds).count();
        let mean = reports.iter().map(|r| r.r_size as f64).sum::<f64>() / reports.len() as f64;
        let cells = (n * n) as f64;
        let sigma = (cells * p * (1.0 - p) / reports.len() as f64).sqrt();
        let expected = n as f64 / 4.0;
        let mean_ok = (mean - expected).abs() <= 3.0 * sigma;
        Verdict::new(
            held == within.len() && !within.is_empty() && mean_ok,
            format!(
                "inclusion {held}/{} trials with |R| <= stop; mean |R| {mean:.2} vs {expected} (3 sigma = {:.2}): {}",
                within.len(),
                3.0 * sigma,
                ok(mean_ok)
            ),
        )
    })
}

fn random_toroidal(n: usize, rng: &mut impl Rng) -> PartialConfig {
    let stop = rng.random_range(0..=n);
    greedy::run_greedy_with(n, stop, LineRecording::Off, rng).config
}

fn random_classical(n: usize, rng: &mut impl Rng) -> PartialConfig {
    let mut cells: Vec<Position> = (1..=n).flat_map(|r| (1..=n).map(move |c| Position::new(r, c))).collect();
    cells.shuffle(rng);
    let target = rng.random_range(0..=n);
    let mut cfg = PartialConfig::new(n);
    for p in cells {
        if cfg.len() == target {
            break;
        }
        let _ = cfg.place(p, Rule::Classical);
    }
    cfg
}

fn random_query(n: usize, rng: &mut impl Rng) -> Position {
    Position::new(rng.random_range(1..=n), rng.random_range(1..=n))
}

fn c8_absorber_calculus() -> Verdict {
    timed(600, || {
        let mut rng = seeds::rng(8);
        let mut mismatches = 0usize;
        let mut violations = [0usize; 4];
        let mut absorbing = 0usize;
        let mut absorbing_aborts = 0usize;
        for i in 0..1000 {
            let n = rng.random_range(8..=16);
            let cfg = if i % 2 == 0 { random_toroidal(n, &mut rng) } else { random_classical(n, &mut rng) };
            let q = random_query(n, &mut rng);
            let fast = absorption::absorbers(&cfg, q);
            if fast != oracles::brute_absorbers(&cfg, q).unwrap() {
                mismatches += 1;
            }

            // removal
            for gone in cfg.queens() {
                let mut smaller = cfg.clone();
                smaller.remove(gone).unwrap();
                if absorption::absorbers(&smaller, q).len() + 1 < fast.len() {
                    violations[0] += 1;
                }
            }
            // addition
            let extra: Vec<Position> = (1..=n)
                .flat_map(|r| (1..=n).map(move |c| Position::new(r, c)))
                .filter(|&p| cfg.admits(p, Rule::Classical).is_ok())
                .collect();
            if let Some(&add) = extra.choose(&mut rng) {
                let mut larger = cfg.clone();
                larger.place(add, Rule::Classical).unwrap();
                if absorption::absorbers(&larger, q).len() + 4 < fast.len() {
                    violations[1] += 1;
                }
            }

            if board::verify(&cfg, Rule::Toroidal) {
                let set = cfg.queen_set().clone();
                let safe = absorption::safe_absorbers(&set, q, n);
                if safe != oracles::brute_safe_absorbers(&set, q, n).unwrap() {
                    mismatches += 1;
                }
                let open: Vec<Position> = board::available_set(&cfg);
                if let Some(&add) = open.choose(&mut rng) {
                    let mut bigger = set.clone();
                    bigger.insert(add);
                    let grown = absorption::safe_absorbers(&bigger, q, n);
                    if !safe.iter().all(|a| grown.contains(a)) {
                        violations[2] += 1;
                    }
                    if grown.len().abs_diff(safe.len()) > 5 {
                        violations[3] += 1;
                    }
                }
                if let Some(&gone) = set.iter().next() {
                    let mut fewer = set.clone();
                    fewer.remove(&gone);
                    if absorption::safe_absorbers(&fewer, q, n).len().abs_diff(safe.len()) > 5 {
                        violations[3] += 1;
                    }
                }
            }

            let k = n - cfg.len();
            if absorption::is_ell_absorbing(&cfg, 10 * k) {
                absorbing += 1;
                let out = absorption::run_absorption(&cfg, rng.random()).unwrap();
                if !matches!(out, AbsorptionOutcome::Completed { .. }) {
                    absorbing_aborts += 1;
                }
            }
        }
        Verdict::new(
            mismatches == 0 && violations == [0; 4] && absorbing_aborts == 0,
            format!(
                "oracle mismatches {mismatches}; violations removal/addition/monotonicity/lipschitz {violations:?}; \
                 10k-absorbing configs {absorbing}, aborts {absorbing_aborts}"
            ),
        )
    })
}

fn c9_geometry() -> Verdict {
    timed(600, || {
        let mut parts = Vec::new();
        let mut pass = true;
        for n in [20usize, 40, 100] {
            let region: BTreeSet<Position> = absorption::balanced_region(n).into_iter().collect();
            let row_min = (1..=n).map(|r| region.iter().filter(|p| p.row == r).count()).min().unwrap();
            let col_min = (1..=n).map(|c| region.iter().filter(|p| p.col == c).count()).min().unwrap();
            let pair_min = (1..=n)
                .flat_map(|r| (1..=n).map(move |c| Position::new(r, c)))
                .map(|q| absorption::balanced_pair_count(n, q).unwrap())
                .min()
                .unwrap();
            let lines_ok = 2 * row_min >= n && 2 * col_min >= n;
            let pairs_ok = 5 * pair_min >= n * n;
            pass &= lines_ok && pairs_ok;
            parts.push(format!(
                "n={n}: row/col min {row_min}/{col_min} (need {}) {}, pair min {pair_min} (need {}) {}",
                n / 2,
                ok(lines_ok),
                n * n / 5,
                ok(pairs_ok)
            ));
        }
        let mut far_mismatch = 0;
        for n in 1..=64 {
            for r in 1..=n {
                for c in 1..=n {
                    let p = Position::new(r, c);
                    far_mismatch += usize::from(far_segment_sizes(p, n).unwrap() != oracles::brute_far_sizes(p, n));
                }
            }
        }
        pass &= far_mismatch == 0;
        Verdict::new(pass, format!("{}; far-size mismatches for n <= 64: {far_mismatch}", parts.join("; ")))
    })
}

fn c10_golden() -> Verdict {
    let set: BTreeSet<Position> = [(4, 1), (7, 2), (1, 3), (3, 7), (8, 8)].into_iter().map(Position::from).collect();
    let q = Position::new(5, 4);
    let target = Position::new(8, 8);
    let fast = absorption::safe_absorbers(&set, q, 8).contains(&target);
    let brute = oracles::brute_safe_absorbers(&set, q, 8).unwrap().contains(&target);
    Verdict::new(fast && brute, format!("(8,8) safe for (5,4): optimized {fast}, brute {brute}"))
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 10] = [
        ("1", "oracle agreement", c1_oracle_agreement),
        ("2", "pipeline validity", c2_pipeline_validity),
        ("3", "completion rate", c3_completion_rate),
        ("4", "concentration", c4_concentration),
        ("5", "step audit", c5_step_audit),
        ("6", "counting witness", c6_counting_witness),
        ("7", "coupling", c7_coupling),
        ("8", "absorber calculus", c8_absorber_calculus),
        ("9", "geometry", c9_geometry),
        ("10", "golden instance", c10_golden),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id || name.contains(f.as_str())) {
            continue;
        }
        let v = run();
        failed += usize::from(!v.pass);
        println!("criterion {id:>2} {:<4} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
