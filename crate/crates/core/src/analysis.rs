//! Trajectory predictions, concentration reports, the counting certificate
//! and the rank-coupling experiment.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::absorption;
use crate::board::Position;
use crate::greedy::{self, GreedyError, RankGrid, Trajectory};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("step {t} is outside [0, {n}]")]
    StepOutOfRange { t: usize, n: usize },
    #[error("trajectory carries no per-line records")]
    MissingLineRecords,
    #[error("counting needs a non-aborted trajectory of {expected} steps, got {got}")]
    AbortedTrajectory { expected: usize, got: usize },
    #[error("density {0} is not in [0, 1)")]
    BadDensity(f64),
    #[error("coupling inclusion failed although |R| = {r_size} <= stop = {stop}")]
    CouplingInvariant { r_size: usize, stop: usize },
    #[error(transparent)]
    Greedy(#[from] GreedyError),
}

/// Predicted values of the greedy process at step `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPrediction {
    pub t: usize,
    /// Fraction of lines still unoccupied, `1 - t/n`.
    pub p: f64,
    /// Available squares on an unoccupied line, `n p³`.
    pub s: f64,
    /// Line band half-width `n^0.51 (p^-50 - 1)`; infinite at `p = 0`.
    pub eps: f64,
    /// Available squares on the board, `n² p⁴`.
    pub a_pred: f64,
    /// Board band half-width `n p eps`.
    pub a_band: f64,
}

impl TrajectoryPrediction {
    /// The line band is wider than a whole line, so it constrains nothing.
    pub fn band_vacuous(&self, n: usize) -> bool {
        self.eps > n as f64
    }
}

pub fn predict(t: usize, n: usize) -> Result<TrajectoryPrediction, AnalysisError> {
    if t > n || n == 0 {
        return Err(AnalysisError::StepOutOfRange { t, n });
    }
    let nf = n as f64;
    let p = 1.0 - t as f64 / nf;
    let eps = if t == 0 {
        0.0
    } else if t == n {
        f64::INFINITY
    } else {
        nf.powf(0.51) * (p.powi(-50) - 1.0)
    };
    let a_band = if t == n { f64::INFINITY } else { nf * p * eps };
    Ok(TrajectoryPrediction { t, p, s: nf * p.powi(3), eps, a_pred: nf * nf * p.powi(4), a_band })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepVerdict {
    pub t: usize,
    pub available: u64,
    pub prediction: TrajectoryPrediction,
    /// `|A(t)|` within `a_pred ± a_band`.
    pub band_pass: bool,
    /// `|A(t)|` within `a_pred (1 ± rel_tol)`.
    pub desk_band_pass: bool,
    pub min_s: u32,
    pub max_s: u32,
    /// Both line extremes within `s ± eps`.
    pub line_band_pass: bool,
    /// Both line extremes within `s (1 ± rel_tol)`.
    pub line_desk_pass: bool,
    pub band_vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub rel_tol: f64,
    pub steps: Vec<StepVerdict>,
    pub band_rate: f64,
    pub desk_band_rate: f64,
    pub line_band_rate: f64,
    pub line_desk_rate: f64,
    pub vacuous_steps: usize,
}

fn within(value: f64, center: f64, half: f64) -> bool {
    (value - center).abs() <= half
}

/// Checks every recorded step against the predicted band and against a
/// relative tolerance band.
pub fn concentration_report(traj: &Trajectory, n: usize, rel_tol: f64) -> Result<ConcentrationReport, AnalysisError> {
    let stats = traj.line_stats.as_ref().ok_or(AnalysisError::MissingLineRecords)?;
    let mut steps = Vec::with_capacity(traj.len());
    for (t, (&available, line)) in traj.available.iter().zip(stats).enumerate() {
        let pred = predict(t, n)?;
        let a = available as f64;
        let (lo, hi) = (line.min as f64, line.max as f64);
        steps.push(StepVerdict {
            t,
            available,
            prediction: pred,
            band_pass: within(a, pred.a_pred, pred.a_band),
            desk_band_pass: within(a, pred.a_pred, rel_tol * pred.a_pred),
            min_s: line.min,
            max_s: line.max,
            line_band_pass: within(lo, pred.s, pred.eps) && within(hi, pred.s, pred.eps),
            line_desk_pass: within(lo, pred.s, rel_tol * pred.s) && within(hi, pred.s, rel_tol * pred.s),
            band_vacuous: pred.band_vacuous(n),
        });
    }
    let rate = |f: fn(&StepVerdict) -> bool| {
        if steps.is_empty() {
            1.0
        } else {
            steps.iter().filter(|s| f(s)).count() as f64 / steps.len() as f64
        }
    };
    Ok(ConcentrationReport {
        n,
        rel_tol,
        band_rate: rate(|s| s.band_pass),
        desk_band_rate: rate(|s| s.desk_band_pass),
        line_band_rate: rate(|s| s.line_band_pass),
        line_desk_rate: rate(|s| s.line_desk_pass),
        vacuous_steps: steps.iter().filter(|s| s.band_vacuous).count(),
        steps,
    })
}

/// Log-space counting certificate for one greedy run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundWitness {
    pub n: usize,
    pub k: usize,
    /// `Σ ln |A(t)|` over the run's steps.
    pub log_x: f64,
    /// Same sum with `|A(t)|` replaced by `n² p(t)⁴`.
    pub log_x_band: f64,
    /// Upper bound on the log-number of ways one configuration arises.
    pub log_y: f64,
    pub witness: f64,
    /// `n (ln n - 3)`.
    pub theoretical: f64,
}

fn ln_factorial(m: usize) -> f64 {
    ln_gamma(m as f64 + 1.0)
}

/// `ln [ C(n, 2k) · (2k)!/(2^k k!) · 2^k · (n-k)! ]`.
pub fn log_multiplicity(n: usize, k: usize) -> f64 {
    assert!(2 * k <= n, "2k must not exceed n");
    let choose = ln_factorial(n) - ln_factorial(2 * k) - ln_factorial(n - 2 * k);
    let pairings = ln_factorial(2 * k) - k as f64 * std::f64::consts::LN_2 - ln_factorial(k);
    choose + pairings + k as f64 * std::f64::consts::LN_2 + ln_factorial(n - k)
}

pub fn counting_witness(traj: &Trajectory, n: usize, k: usize) -> Result<BoundWitness, AnalysisError> {
    let stop = n.checked_sub(k).ok_or(AnalysisError::AbortedTrajectory { expected: 0, got: traj.len() })?;
    if traj.len() != stop || traj.available.contains(&0) {
        return Err(AnalysisError::AbortedTrajectory { expected: stop, got: traj.len() });
    }
    let log_x: f64 = traj.available.iter().map(|&a| (a as f64).ln()).sum();
    let log_x_band: f64 = (0..stop).map(|t| predict(t, n).map(|p| p.a_pred.ln())).sum::<Result<f64, _>>()?;
    // Y needs 2k ≤ n; beyond that C(n, 2k) = 0 and the certificate is void.
    let log_y = if 2 * k <= n { log_multiplicity(n, k) } else { f64::INFINITY };
    let nf = n as f64;
    Ok(BoundWitness { n, k, log_x, log_x_band, log_y, witness: log_x - log_y, theoretical: nf * (nf.ln() - 3.0) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafeCountSummary {
    pub queries: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub n: usize,
    pub p_param: f64,
    pub stop: usize,
    pub seed: u64,
    pub r_size: usize,
    pub r_tilde_size: usize,
    pub r_within_stop: bool,
    pub inclusion_holds: bool,
    pub greedy_placed: usize,
    pub safe_counts: SafeCountSummary,
}

/// Members of `set` sharing no row, column or toroidal diagonal with another
/// member.
pub fn unthreatened(set: &[Position], n: usize) -> Vec<Position> {
    let mut counts = vec![0u32; 4 * n];
    let key =
        |p: Position| [p.row - 1, n + p.col - 1, 2 * n + (p.row + p.col) % n, 3 * n + (p.row + n - p.col % n) % n];
    for &p in set {
        for k in key(p) {
            counts[k] += 1;
        }
    }
    set.iter().copied().filter(|&p| key(p).iter().all(|&k| counts[k] == 1)).collect()
}

/// Number of random queries sampled for safe-absorber statistics.
pub const COUPLING_QUERIES: usize = 32;

/// Draws one rank grid, thresholds it at `p_param`, and checks that the
/// unthreatened part of the threshold set survives into the rank-coupled
/// greedy outcome at `stop`.
///
/// Whenever `|R| ≤ stop` the inclusion is guaranteed by the process; a
/// failure there is reported as [`AnalysisError::CouplingInvariant`].
pub fn coupling_experiment(n: usize, p_param: f64, seed: u64, stop: usize) -> Result<CouplingReport, AnalysisError> {
    if !(0.0..1.0).contains(&p_param) {
        return Err(AnalysisError::BadDensity(p_param));
    }
    let mut rng = seeds::rng(seed);
    let grid = RankGrid::sample(n, &mut rng);
    let r = grid.below(p_param);
    let r_tilde = unthreatened(&r, n);
    let outcome = greedy::run_greedy_coupled(&grid, stop)?;
    let inclusion_holds = r_tilde.iter().all(|&p| outcome.config.contains(p));
    let r_within_stop = r.len() <= stop;
    if r_within_stop && !inclusion_holds {
        return Err(AnalysisError::CouplingInvariant { r_size: r.len(), stop });
    }

    let queries: Vec<Position> =
        (0..COUPLING_QUERIES).map(|_| Position::new(rng.random_range(1..=n), rng.random_range(1..=n))).collect();
    let set: BTreeSet<Position> = r_tilde.iter().copied().collect();
    let counts = absorption::safe_absorber_counts(&set, &queries, n);
    let safe_counts = SafeCountSummary {
        queries: counts.len(),
        min: counts.iter().copied().min().unwrap_or(0),
        max: counts.iter().copied().max().unwrap_or(0),
        mean: counts.iter().sum::<usize>() as f64 / counts.len().max(1) as f64,
    };
    Ok(CouplingReport {
        n,
        p_param,
        stop,
        seed,
        r_size: r.len(),
        r_tilde_size: r_tilde.len(),
        r_within_stop,
        inclusion_holds,
        greedy_placed: outcome.placed,
        safe_counts,
    })
}
