//! Command implementations behind the `nqueens` binary.
//!
//! Each command returns a serializable document (or writes CSV) so that the
//! binary stays a thin argument parser. All JSON documents carry
//! `schema_version` [`SCHEMA_VERSION`].

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::absorption::{self, AbsorptionError, AbsorptionOutcome};
use crate::analysis::{self, AnalysisError, BoundWitness};
use crate::board::{self, Position, Rule};
use crate::greedy::{self, GreedyError, GreedyParams, LineRecording, StopRule};
use crate::oracles::{self, OracleError};
use crate::seeds;

pub const SCHEMA_VERSION: &str = "1";
pub const DEFAULT_RETRIES: u32 = 3;
pub const DEFAULT_REL_TOL: f64 = 0.1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error(transparent)]
    Absorption(#[from] AbsorptionError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    /// 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Oracle(_) => 2,
            CliError::Greedy(
                GreedyError::BadStopRule(_) | GreedyError::StopTooLarge { .. } | GreedyError::EmptyBoard,
            ) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase1Summary {
    pub placed: usize,
    pub aborted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase2Summary {
    pub completed: bool,
    pub abort_step: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub seed: u64,
    pub phase1: Phase1Summary,
    pub phase2: Phase2Summary,
}

/// Result of one `solve` invocation. Top-level phase fields describe the
/// last attempt; `attempts` lists all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: String,
    pub n: usize,
    pub stop: usize,
    pub k: usize,
    pub seed: u64,
    pub attempt_seed: u64,
    pub phase1: Phase1Summary,
    pub phase2: Phase2Summary,
    pub queens: Vec<[usize; 2]>,
    pub witness: Option<BoundWitness>,
    pub attempts: Vec<AttemptRecord>,
}

impl RunRecord {
    pub fn completed(&self) -> bool {
        self.phase2.completed
    }

    pub fn positions(&self) -> Vec<Position> {
        self.queens.iter().map(|&[r, c]| Position::new(r, c)).collect()
    }
}

struct Attempt {
    record: AttemptRecord,
    queens: Vec<Position>,
    witness: Option<BoundWitness>,
    available: Vec<u64>,
}

/// One pass of both phases. The absorption phase draws from a stream
/// derived from `seed` via [`seeds::absorption_seed`].
fn attempt(n: usize, stop: usize, seed: u64) -> Result<Attempt, CliError> {
    let phase1 = greedy::run_greedy(&GreedyParams::new(n, seed).with_stop(stop))?;
    let p1 = Phase1Summary { placed: phase1.placed, aborted: phase1.aborted };
    if phase1.aborted {
        return Ok(Attempt {
            record: AttemptRecord { seed, phase1: p1, phase2: Phase2Summary { completed: false, abort_step: None } },
            queens: phase1.placements,
            witness: None,
            available: phase1.trajectory.available,
        });
    }
    let witness = analysis::counting_witness(&phase1.trajectory, n, n - stop).ok();
    let outcome = absorption::run_absorption(&phase1.config, seeds::absorption_seed(seed))?;
    let (phase2, queens) = match outcome {
        AbsorptionOutcome::Completed { config, .. } => {
            let queens: Vec<Position> = config.queens().collect();
            let valid = queens.len() == n && board::verify_positions(n, queens.iter().copied(), Rule::Classical);
            (Phase2Summary { completed: valid, abort_step: None }, queens)
        }
        AbsorptionOutcome::Aborted { step, config, .. } => {
            (Phase2Summary { completed: false, abort_step: Some(step) }, config.queens().collect())
        }
    };
    Ok(Attempt {
        record: AttemptRecord { seed, phase1: p1, phase2 },
        queens,
        witness,
        available: phase1.trajectory.available,
    })
}

/// Runs the pipeline, retrying with `seed + i` (wrapping) up to `retries`
/// extra times.
pub fn solve(n: usize, seed: u64, stop: StopRule, retries: u32) -> Result<RunRecord, CliError> {
    solve_keeping_first(n, seed, stop, retries).map(|(rec, _)| rec)
}

/// [`solve`], also returning the first attempt's phase-1 data.
fn solve_keeping_first(n: usize, seed: u64, stop: StopRule, retries: u32) -> Result<(RunRecord, Attempt), CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let stop = stop.resolve(n);
    let first = attempt(n, stop, seed)?;
    let mut attempts = vec![first.record.clone()];
    let mut later: Option<Attempt> = None;
    for i in 1..=retries {
        if later.as_ref().unwrap_or(&first).record.phase2.completed {
            break;
        }
        let a = attempt(n, stop, seed.wrapping_add(i as u64))?;
        attempts.push(a.record.clone());
        later = Some(a);
    }
    let last = later.as_ref().unwrap_or(&first);
    let record = RunRecord {
        schema_version: SCHEMA_VERSION.into(),
        n,
        stop,
        k: n - stop,
        seed,
        attempt_seed: last.record.seed,
        phase1: last.record.phase1,
        phase2: last.record.phase2,
        queens: last.queens.iter().map(|p| [p.row, p.col]).collect(),
        witness: last.witness,
        attempts,
    };
    Ok((record, first))
}

fn csv_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub const TRAJECTORY_HEADER: &str =
    "t,available,pred_available,paper_band,desk_band_pass,min_s_ell,max_s_ell,pred_s,eps,band_vacuous";

/// Writes the trajectory CSV for one greedy run.
///
/// `paper_band` is the half-width `n p(t) eps(t)` of the predicted band on
/// `|A(t)|`; `desk_band_pass` checks `|A(t)|` against `pred_available` at
/// relative tolerance `rel_tol`.
pub fn trajectory_csv<W: Write>(
    n: usize,
    seed: u64,
    stop: StopRule,
    rel_tol: f64,
    out: &mut W,
) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage("trajectory needs n >= 2".into()));
    }
    if !(rel_tol.is_finite() && rel_tol >= 0.0) {
        return Err(CliError::Usage(format!("invalid --rel-tol {rel_tol}")));
    }
    let run =
        greedy::run_greedy(&GreedyParams::new(n, seed).with_stop(stop.resolve(n)).recording(LineRecording::Stats))?;
    let report = analysis::concentration_report(&run.trajectory, n, rel_tol)?;
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in &report.steps {
        let pr = &s.prediction;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.available,
            pr.a_pred,
            pr.a_band,
            csv_bool(s.desk_band_pass),
            s.min_s,
            s.max_s,
            pr.s,
            pr.eps,
            csv_bool(s.band_vacuous)
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateRecord {
    pub schema_version: String,
    pub n: usize,
    pub rule: Rule,
    pub count: u64,
}

pub fn enumerate(n: usize, toroidal: bool, allow_large: bool) -> Result<EnumerateRecord, CliError> {
    let res = if toroidal {
        oracles::enumerate_toroidal(n, allow_large)?
    } else {
        oracles::enumerate_classic(n, allow_large)?
    };
    Ok(EnumerateRecord { schema_version: SCHEMA_VERSION.into(), n, rule: res.rule, count: res.count })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl MeanStd {
    /// Sample statistics, summed in the given order.
    pub fn of(values: &[f64]) -> Option<MeanStd> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var =
            if count > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64 } else { 0.0 };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(MeanStd { count, mean, std: var.sqrt(), min, max })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessStats {
    pub witness: MeanStd,
    /// Witness divided by `n ln n`.
    pub normalized: MeanStd,
    pub all_positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecileMean {
    pub t: usize,
    pub runs: usize,
    pub mean_available: f64,
    pub predicted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingStats {
    pub p_param: f64,
    pub trials: usize,
    pub trials_within_stop: usize,
    pub inclusion_within_stop: usize,
    pub inclusion_rate_within_stop: f64,
    pub r_size: MeanStd,
    pub r_tilde_size: MeanStd,
    pub mean_safe_absorbers: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub schema_version: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub stop: usize,
    pub retries: u32,
    pub success_rate: f64,
    pub phase1_abort_rate: f64,
    pub mean_available_by_decile: Vec<DecileMean>,
    pub witness_stats: Option<WitnessStats>,
    pub coupling_stats: Option<CouplingStats>,
}

struct TrialResult {
    completed: bool,
    phase1_aborted: bool,
    available: Vec<u64>,
    witness: Option<f64>,
}

/// The first attempt's trajectory feeds the decile means and the witness.
fn run_trial(n: usize, stop: usize, seed: u64, retries: u32) -> Result<TrialResult, CliError> {
    let (record, first) = solve_keeping_first(n, seed, StopRule::Absolute(stop), retries)?;
    Ok(TrialResult {
        completed: record.completed(),
        phase1_aborted: first.record.phase1.aborted,
        available: first.available,
        witness: first.witness.map(|w| w.witness),
    })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| CliError::Pool(e.to_string()))
}

/// Options for [`campaign`].
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignOptions {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub stop: StopRule,
    pub retries: u32,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub coupling_p: Option<f64>,
}

impl CampaignOptions {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        CampaignOptions { n, trials, seed, stop: StopRule::default(), retries: 0, jobs: 0, coupling_p: None }
    }
}

/// Runs `trials` independent pipelines. Trial `i` uses
/// [`seeds::trial_seed`]`(seed, i)`; results are reduced in trial order, so the
/// summary does not depend on `jobs`.
pub fn campaign(opts: &CampaignOptions) -> Result<CampaignSummary, CliError> {
    let n = opts.n;
    if n == 0 || opts.trials == 0 {
        return Err(CliError::Usage("campaign needs n >= 1 and trials >= 1".into()));
    }
    let stop = opts.stop.resolve(n);
    let trials: Vec<TrialResult> = pool(opts.jobs)?.install(|| {
        (0..opts.trials)
            .into_par_iter()
            .map(|i| run_trial(n, stop, seeds::trial_seed(opts.seed, i as u64), opts.retries))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let completed = trials.iter().filter(|t| t.completed).count();
    let aborted = trials.iter().filter(|t| t.phase1_aborted).count();
    let mut deciles = Vec::new();
    for d in 0..10 {
        let t = d * n / 10;
        if t >= stop.max(1) {
            break;
        }
        let values: Vec<f64> = trials.iter().filter_map(|r| r.available.get(t).map(|&a| a as f64)).collect();
        let pred = analysis::predict(t, n)?.a_pred;
        deciles.push(DecileMean {
            t,
            runs: values.len(),
            mean_available: MeanStd::of(&values).map_or(0.0, |m| m.mean),
            predicted: pred,
        });
    }
    let witnesses: Vec<f64> = trials.iter().filter_map(|t| t.witness).collect();
    let scale = n as f64 * (n as f64).ln();
    let witness_stats = MeanStd::of(&witnesses).map(|w| WitnessStats {
        witness: w,
        normalized: MeanStd::of(&witnesses.iter().map(|v| v / scale).collect::<Vec<_>>()).expect("non-empty"),
        all_positive: witnesses.iter().all(|&v| v > 0.0),
    });
    let coupling_stats = match opts.coupling_p {
        Some(p) => Some(coupling_summary(n, p, opts.seed, stop, opts.trials, opts.jobs)?),
        None => None,
    };
    Ok(CampaignSummary {
        schema_version: SCHEMA_VERSION.into(),
        n,
        trials: opts.trials,
        seed: opts.seed,
        stop,
        retries: opts.retries,
        success_rate: completed as f64 / opts.trials as f64,
        phase1_abort_rate: aborted as f64 / opts.trials as f64,
        mean_available_by_decile: deciles,
        witness_stats,
        coupling_stats,
    })
}

/// Runs the coupling experiment for `trials` derived seeds.
pub fn coupling_reports(
    n: usize,
    p: f64,
    seed: u64,
    stop: usize,
    trials: usize,
    jobs: usize,
) -> Result<Vec<analysis::CouplingReport>, CliError> {
    pool(jobs)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                analysis::coupling_experiment(n, p, seeds::trial_seed(seed, i as u64), stop).map_err(CliError::from)
            })
            .collect()
    })
}

pub fn summarize_coupling(p: f64, reports: &[analysis::CouplingReport]) -> CouplingStats {
    let within: Vec<&analysis::CouplingReport> = reports.iter().filter(|r| r.r_within_stop).collect();
    let included = within.iter().filter(|r| r.inclusion_holds).count();
    let sizes = |f: fn(&analysis::CouplingReport) -> usize| {
        let v: Vec<f64> = reports.iter().map(|r| f(r) as f64).collect();
        MeanStd::of(&v).unwrap_or(MeanStd { count: 0, mean: 0.0, std: 0.0, min: 0.0, max: 0.0 })
    };
    CouplingStats {
        p_param: p,
        trials: reports.len(),
        trials_within_stop: within.len(),
        inclusion_within_stop: included,
        inclusion_rate_within_stop: if within.is_empty() { 1.0 } else { included as f64 / within.len() as f64 },
        r_size: sizes(|r| r.r_size),
        r_tilde_size: sizes(|r| r.r_tilde_size),
        mean_safe_absorbers: reports.iter().map(|r| r.safe_counts.mean).sum::<f64>() / reports.len().max(1) as f64,
    }
}

fn coupling_summary(
    n: usize,
    p: f64,
    seed: u64,
    stop: usize,
    trials: usize,
    jobs: usize,
) -> Result<CouplingStats, CliError> {
    Ok(summarize_coupling(p, &coupling_reports(n, p, seed, stop, trials, jobs)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingDocument {
    pub schema_version: String,
    pub n: usize,
    pub stop: usize,
    pub seed: u64,
    pub summary: CouplingStats,
    pub reports: Vec<analysis::CouplingReport>,
}

pub fn coupling(
    n: usize,
    p: Option<f64>,
    seed: u64,
    stop: StopRule,
    trials: usize,
    jobs: usize,
) -> Result<CouplingDocument, CliError> {
    if n == 0 || trials == 0 {
        return Err(CliError::Usage("coupling needs n >= 1 and trials >= 1".into()));
    }
    let p = p.unwrap_or(1.0 / (4.0 * n as f64));
    let stop = stop.resolve(n);
    let reports = coupling_reports(n, p, seed, stop, trials, jobs)?;
    Ok(CouplingDocument {
        schema_version: SCHEMA_VERSION.into(),
        n,
        stop,
        seed,
        summary: summarize_coupling(p, &reports),
        reports,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundDocument {
    pub schema_version: String,
    pub witness: BoundWitness,
    /// Whether the stored witness (if any) equals the replayed one.
    pub matches_stored: Option<bool>,
}

/// Recomputes the counting witness of a stored [`RunRecord`] by replaying
/// its successful greedy phase.
pub fn bound(record: &RunRecord) -> Result<BoundDocument, CliError> {
    if record.schema_version != SCHEMA_VERSION {
        return Err(CliError::Usage(format!("unsupported schema_version {:?}", record.schema_version)));
    }
    let run = greedy::run_greedy(&GreedyParams::new(record.n, record.attempt_seed).with_stop(record.stop))?;
    let witness = analysis::counting_witness(&run.trajectory, record.n, record.n - record.stop)?;
    Ok(BoundDocument {
        schema_version: SCHEMA_VERSION.into(),
        witness,
        matches_stored: record.witness.map(|w| w == witness),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_single_cell() {
        let rec = solve(1, 7, StopRule::Absolute(1), DEFAULT_RETRIES).unwrap();
        assert!(rec.completed());
        assert_eq!(rec.queens, vec![[1, 1]]);
        assert_eq!(rec.attempts.len(), 1);
    }

    #[test]
    fn solve_records_every_attempt() {
        // 4x4 greedy with stop 4 always aborts
        let rec = solve(4, 0, StopRule::Absolute(4), 2).unwrap();
        assert!(!rec.completed());
        assert_eq!(rec.attempts.len(), 3);
        assert_eq!(rec.attempts.iter().map(|a| a.seed).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(rec.attempts.iter().all(|a| a.phase1.aborted));
    }

    #[test]
    fn enumerate_documents() {
        let doc = enumerate(5, false, false).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(v["n"], 5);
        assert_eq!(v["rule"], "classical");
        assert_eq!(v["count"], 10);
        assert_eq!(enumerate(5, true, false).unwrap().count, 10);
        assert_eq!(enumerate(2, false, false).unwrap().count, 0);
        let err = enumerate(20, false, false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--allow-large"));
    }

    #[test]
    fn trajectory_first_row() {
        let mut buf = Vec::new();
        trajectory_csv(100, 3, StopRule::default(), DEFAULT_REL_TOL, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TRAJECTORY_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&first[..3], &["0", "10000", "10000"]);
        assert_eq!(text.lines().count(), 1 + 74);
        assert!(trajectory_csv(1, 0, StopRule::default(), 0.1, &mut Vec::new()).is_err());
    }

    #[test]
    fn campaign_trivial_board() {
        let mut opts = CampaignOptions::new(1, 5, 0);
        opts.stop = StopRule::Absolute(1);
        let s = campaign(&opts).unwrap();
        assert_eq!(s.success_rate, 1.0);
    }

    #[test]
    fn bound_replays_stored_witness() {
        let rec = solve(60, 11, StopRule::default(), 0).unwrap();
        assert!(rec.witness.is_some());
        let doc = bound(&rec).unwrap();
        assert_eq!(doc.matches_stored, Some(true));
    }
}
