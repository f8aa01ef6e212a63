//! The random greedy toroidal placement process.
//!
//! Starting from an empty board, each step places a queen on a uniformly
//! random *available* square: one whose row, column and both toroidal
//! diagonal classes are still empty. The run stops after `stop` placements,
//! or aborts early (freezing the configuration) if nothing is available.
//!
//! Availability is tracked incrementally. Every one of the `4n` toroidal
//! lines keeps its count `S_ℓ` of available squares, and a Fenwick tree over
//! the per-row counts lets a uniform index in `[0, |A(t)|)` be mapped to a
//! square in `O(n)`. No rejection sampling is involved, so a seed fixes the
//! run on every platform.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{PartialConfig, Position, Rule};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreedyError {
    #[error("board size must be at least 1")]
    EmptyBoard,
    #[error("stop {stop} exceeds board size {n}")]
    StopTooLarge { stop: usize, n: usize },
    #[error("rank grid for n={n} needs {expected} ranks, got {got}")]
    GridSize { n: usize, expected: usize, got: usize },
    #[error("rank {0} is not a finite value in [0, 1]")]
    BadRank(f64),
    #[error("trajectory carries no per-line records")]
    MissingLineRecords,
    #[error("invalid stop rule {0:?}")]
    BadStopRule(String),
}

/// `n - ⌈n^0.7⌉`, the default number of greedy placements.
pub fn default_stop(n: usize) -> usize {
    StopRule::default().resolve(n)
}

/// How the greedy stop count is derived from `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StopRule {
    /// A fixed count (clamped to `n`).
    Absolute(usize),
    /// Leave `⌈n^e⌉` holes: `n - ⌈n^e⌉`.
    Holes(f64),
    /// `⌊(1 - n^-α) n⌋`.
    Alpha(f64),
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule::Holes(0.7)
    }
}

impl StopRule {
    pub fn resolve(self, n: usize) -> usize {
        let nf = n as f64;
        match self {
            StopRule::Absolute(s) => s.min(n),
            StopRule::Holes(e) => n.saturating_sub(nf.powf(e).ceil() as usize),
            StopRule::Alpha(a) => ((1.0 - nf.powf(-a)) * nf).floor().max(0.0) as usize,
        }
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopRule::Absolute(s) => write!(f, "{s}"),
            StopRule::Holes(e) => write!(f, "holes:{e}"),
            StopRule::Alpha(a) => write!(f, "alpha:{a}"),
        }
    }
}

/// Parses `450`, `holes:0.7` or `alpha:0.0001`.
impl FromStr for StopRule {
    type Err = GreedyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GreedyError::BadStopRule(s.to_string());
        let exponent = |v: &str| v.parse::<f64>().ok().filter(|e| e.is_finite() && *e >= 0.0).ok_or_else(bad);
        if let Some(e) = s.strip_prefix("holes:") {
            Ok(StopRule::Holes(exponent(e)?))
        } else if let Some(a) = s.strip_prefix("alpha:") {
            Ok(StopRule::Alpha(exponent(a)?))
        } else {
            s.parse().map(StopRule::Absolute).map_err(|_| bad())
        }
    }
}

/// How much per-line data a run keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LineRecording {
    #[default]
    Off,
    /// Min, max and mean of `S_ℓ(t)` over unoccupied lines, per step.
    Stats,
    /// Stats plus every line's count at every step (`4n` values per step).
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyParams {
    pub n: usize,
    pub stop: usize,
    pub seed: u64,
    pub record_lines: LineRecording,
}

impl GreedyParams {
    /// Default stop, no line records.
    pub fn new(n: usize, seed: u64) -> Self {
        GreedyParams { n, stop: default_stop(n), seed, record_lines: LineRecording::Off }
    }

    pub fn with_stop(mut self, stop: usize) -> Self {
        self.stop = stop;
        self
    }

    /// Full per-line recording.
    pub fn recording_lines(mut self) -> Self {
        self.record_lines = LineRecording::Full;
        self
    }

    pub fn recording(mut self, record: LineRecording) -> Self {
        self.record_lines = record;
        self
    }

    pub fn validate(&self) -> Result<(), GreedyError> {
        if self.n == 0 {
            return Err(GreedyError::EmptyBoard);
        }
        if self.stop > self.n {
            return Err(GreedyError::StopTooLarge { stop: self.stop, n: self.n });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineStats {
    pub min: u32,
    pub max: u32,
    pub mean: f64,
}

/// Per-step record of a run.
///
/// `available[t]` is `|A(t)|` for every step at which a choice was made; an
/// aborted run additionally ends with the `0` that stopped it. Line data, when
/// recorded, is indexed the same way. Line `i` of a snapshot is row `i+1` for
/// `i < n`, column `i-n+1` for `i < 2n`, toroidal plus class `i-2n` for
/// `i < 3n` and toroidal minus class `i-3n` otherwise; `None` marks an
/// occupied line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub available: Vec<u64>,
    pub line_stats: Option<Vec<LineStats>>,
    pub line_counts: Option<Vec<Vec<Option<u32>>>>,
}

impl Trajectory {
    fn new(record: LineRecording) -> Self {
        Trajectory {
            available: Vec::new(),
            line_stats: (record != LineRecording::Off).then(Vec::new),
            line_counts: (record == LineRecording::Full).then(Vec::new),
        }
    }

    pub fn len(&self) -> usize {
        self.available.len()
    }

    pub fn is_empty(&self) -> bool {
        self.available.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyOutcome {
    pub n: usize,
    pub stop: usize,
    pub config: PartialConfig,
    /// Queens in the order they were placed.
    pub placements: Vec<Position>,
    pub placed: usize,
    pub aborted: bool,
    pub trajectory: Trajectory,
}

/// Fenwick tree over row weights.
struct RowTree {
    tree: Vec<i64>,
}

impl RowTree {
    fn filled(len: usize, w: i64) -> Self {
        let mut tree = vec![0; len + 1];
        for i in 1..=len {
            tree[i] += w;
            let j = i + (i & i.wrapping_neg());
            if j <= len {
                tree[j] += tree[i];
            }
        }
        RowTree { tree }
    }

    fn add(&mut self, row: usize, delta: i64) {
        let mut i = row;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest row whose prefix sum exceeds `k`, and the offset of `k` within it.
    fn find(&self, mut k: i64) -> (usize, i64) {
        let len = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = len.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= len && self.tree[next] <= k {
                pos = next;
                k -= self.tree[next];
            }
            step >>= 1;
        }
        (pos + 1, k)
    }
}

/// Incremental availability state for the toroidal process.
struct Availability {
    n: usize,
    occupied: Vec<bool>,
    counts: Vec<u32>,
    total: u64,
    rows: RowTree,
}

impl Availability {
    fn new(n: usize) -> Self {
        Availability {
            n,
            occupied: vec![false; 4 * n],
            counts: vec![n as u32; 4 * n],
            total: (n * n) as u64,
            rows: RowTree::filled(n, n as i64),
        }
    }

    fn lines_of(&self, p: Position) -> [usize; 4] {
        let n = self.n;
        [p.row - 1, n + p.col - 1, 2 * n + (p.row + p.col) % n, 3 * n + (p.row + n - p.col % n) % n]
    }

    fn is_available(&self, p: Position) -> bool {
        self.lines_of(p).iter().all(|&l| !self.occupied[l])
    }

    fn members(&self, line: usize) -> Vec<Position> {
        let n = self.n;
        let (family, class) = (line / n, line % n);
        (1..=n)
            .map(|i| match family {
                0 => Position::new(class + 1, i),
                1 => Position::new(i, class + 1),
                // col ≡ class - row (mod n), shifted into 1..=n
                2 => Position::new(i, (class + 2 * n - i - 1) % n + 1),
                _ => Position::new(i, (i + 2 * n - class - 1) % n + 1),
            })
            .collect()
    }

    fn kill(&mut self, p: Position) {
        for l in self.lines_of(p) {
            self.counts[l] -= 1;
        }
        self.total -= 1;
        self.rows.add(p.row, -1);
    }

    fn place(&mut self, p: Position) {
        for line in self.lines_of(p) {
            for q in self.members(line) {
                if self.is_available(q) {
                    self.kill(q);
                }
            }
            self.occupied[line] = true;
        }
    }

    /// The `k`-th available square in `(row, col)` order.
    fn nth_available(&self, k: u64) -> Position {
        let (row, mut offset) = self.rows.find(k as i64);
        for col in 1..=self.n {
            let p = Position::new(row, col);
            if self.is_available(p) {
                if offset == 0 {
                    return p;
                }
                offset -= 1;
            }
        }
        unreachable!("row weights out of sync with availability")
    }

    fn snapshot(&self) -> Vec<Option<u32>> {
        self.counts.iter().zip(&self.occupied).map(|(&c, &occ)| (!occ).then_some(c)).collect()
    }

    fn stats(&self) -> LineStats {
        let mut min = u32::MAX;
        let mut max = 0;
        let mut sum = 0u64;
        let mut count = 0u64;
        for (&c, &occ) in self.counts.iter().zip(&self.occupied) {
            if !occ {
                min = min.min(c);
                max = max.max(c);
                sum += c as u64;
                count += 1;
            }
        }
        if count == 0 {
            LineStats { min: 0, max: 0, mean: 0.0 }
        } else {
            LineStats { min, max, mean: sum as f64 / count as f64 }
        }
    }

    fn record(&self, traj: &mut Trajectory) {
        traj.available.push(self.total);
        if let Some(stats) = traj.line_stats.as_mut() {
            stats.push(self.stats());
        }
        if let Some(counts) = traj.line_counts.as_mut() {
            counts.push(self.snapshot());
        }
    }
}

fn finish(n: usize, stop: usize, placements: Vec<Position>, aborted: bool, trajectory: Trajectory) -> GreedyOutcome {
    let config = PartialConfig::with_rule(n, Rule::Toroidal, placements.iter().copied())
        .expect("greedy placements are toroidally independent");
    GreedyOutcome { n, stop, config, placed: placements.len(), placements, aborted, trajectory }
}

/// Runs the random greedy process with a ChaCha8 stream seeded from
/// `params.seed`.
pub fn run_greedy(params: &GreedyParams) -> Result<GreedyOutcome, GreedyError> {
    params.validate()?;
    let mut rng = seeds::rng(params.seed);
    Ok(run_greedy_with(params.n, params.stop, params.record_lines, &mut rng))
}

/// Same as [`run_greedy`] with a caller-supplied generator.
pub fn run_greedy_with<R: Rng + ?Sized>(
    n: usize,
    stop: usize,
    record_lines: LineRecording,
    rng: &mut R,
) -> GreedyOutcome {
    let mut state = Availability::new(n);
    let mut traj = Trajectory::new(record_lines);
    let mut placements = Vec::with_capacity(stop);
    let mut aborted = false;
    while placements.len() < stop {
        state.record(&mut traj);
        if state.total == 0 {
            aborted = true;
            break;
        }
        let p = state.nth_available(rng.random_range(0..state.total));
        state.place(p);
        placements.push(p);
    }
    finish(n, stop, placements, aborted, traj)
}

/// I.i.d. uniform ranks on `[n]²`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RankGrid {
    n: usize,
    ranks: Vec<f64>,
}

impl RankGrid {
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        RankGrid { n, ranks: (0..n * n).map(|_| rng.random::<f64>()).collect() }
    }

    pub fn from_seed(n: usize, seed: u64) -> Self {
        Self::sample(n, &mut seeds::rng(seed))
    }

    /// Row-major ranks; `ranks[(row-1)*n + (col-1)]`.
    pub fn from_ranks(n: usize, ranks: Vec<f64>) -> Result<Self, GreedyError> {
        if n == 0 {
            return Err(GreedyError::EmptyBoard);
        }
        if ranks.len() != n * n {
            return Err(GreedyError::GridSize { n, expected: n * n, got: ranks.len() });
        }
        if let Some(&bad) = ranks.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(GreedyError::BadRank(bad));
        }
        Ok(RankGrid { n, ranks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self, p: Position) -> f64 {
        self.ranks[(p.row - 1) * self.n + p.col - 1]
    }

    /// Squares with rank strictly below `threshold`: a binomial subset of
    /// density `threshold`.
    pub fn below(&self, threshold: f64) -> Vec<Position> {
        self.cells().filter(|&p| self.rank(p) < threshold).collect()
    }

    fn cells(&self) -> impl Iterator<Item = Position> {
        let n = self.n;
        (1..=n).flat_map(move |r| (1..=n).map(move |c| Position::new(r, c)))
    }

    /// All squares by increasing rank, ties broken by `(row, col)`.
    pub fn order(&self) -> Vec<Position> {
        let mut cells: Vec<Position> = self.cells().collect();
        cells.sort_by(|&a, &b| self.rank(a).partial_cmp(&self.rank(b)).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        cells
    }
}

/// The rank-coupled greedy process: each step places the available square
/// of smallest rank. Its law equals that of [`run_greedy`].
///
/// Placements after `stop` cannot change the first `stop`, so the scan ends
/// there.
pub fn run_greedy_coupled(grid: &RankGrid, stop: usize) -> Result<GreedyOutcome, GreedyError> {
    let n = grid.n();
    if stop > n {
        return Err(GreedyError::StopTooLarge { stop, n });
    }
    let mut state = Availability::new(n);
    let mut traj = Trajectory::new(LineRecording::Off);
    let mut placements = Vec::with_capacity(stop);
    let mut cells = grid.order().into_iter();
    while placements.len() < stop {
        state.record(&mut traj);
        if state.total == 0 {
            return Ok(finish(n, stop, placements, true, traj));
        }
        let p = cells.by_ref().find(|&p| state.is_available(p)).expect("an available square remains in the scan");
        state.place(p);
        placements.push(p);
    }
    Ok(finish(n, stop, placements, false, traj))
}

/// Checks that every line available-count changed by at most 4 between
/// consecutive steps at which the line was unoccupied.
pub fn step_change_audit(outcome: &GreedyOutcome) -> Result<bool, GreedyError> {
    let counts = outcome.trajectory.line_counts.as_ref().ok_or(GreedyError::MissingLineRecords)?;
    Ok(counts.windows(2).all(|w| {
        w[0].iter().zip(&w[1]).all(|pair| match pair {
            (Some(a), Some(b)) => a.abs_diff(*b) <= 4,
            _ => true,
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{available_set, verify};

    #[test]
    fn stop_rules() {
        assert_eq!(default_stop(1000), 874);
        assert_eq!(default_stop(100), 74);
        assert_eq!(default_stop(1), 0);
        assert_eq!("450".parse::<StopRule>().unwrap(), StopRule::Absolute(450));
        assert_eq!("holes:0.5".parse::<StopRule>().unwrap().resolve(100), 90);
        assert_eq!("alpha:0.0001".parse::<StopRule>().unwrap().resolve(1000), 0);
        assert!("holes:x".parse::<StopRule>().is_err());
        assert!("-3".parse::<StopRule>().is_err());
        assert_eq!(StopRule::Absolute(20).resolve(10), 10);
    }

    #[test]
    fn fenwick_find_matches_prefix_scan() {
        let weights = [3i64, 0, 5, 1, 0, 2];
        let mut t = RowTree::filled(6, 0);
        for (i, &w) in weights.iter().enumerate() {
            t.add(i + 1, w);
        }
        let mut k = 0;
        for (i, &w) in weights.iter().enumerate() {
            for off in 0..w {
                assert_eq!(t.find(k), (i + 1, off));
                k += 1;
            }
        }
    }

    #[test]
    fn line_members_match_board_geometry() {
        for n in 1..=9 {
            let s = Availability::new(n);
            for line in 0..4 * n {
                let members = s.members(line);
                assert_eq!(members.len(), n);
                for p in members {
                    assert!(p.in_range(n));
                    assert!(s.lines_of(p).contains(&line), "n={n} line={line} p={p}");
                }
            }
        }
    }

    #[test]
    fn single_cell_board() {
        let out = run_greedy(&GreedyParams::new(1, 3).with_stop(1)).unwrap();
        assert_eq!(out.placed, 1);
        assert!(!out.aborted);
        assert_eq!(out.placements, vec![Position::new(1, 1)]);
    }

    #[test]
    fn four_by_four_always_aborts() {
        for seed in 0..50 {
            let out = run_greedy(&GreedyParams::new(4, seed).with_stop(4)).unwrap();
            assert!(out.aborted);
            assert!(out.placed <= 3);
            assert_eq!(out.trajectory.available.last(), Some(&0));
        }
    }

    #[test]
    fn stop_beyond_n_is_rejected() {
        assert_eq!(run_greedy(&GreedyParams::new(5, 0).with_stop(6)), Err(GreedyError::StopTooLarge { stop: 6, n: 5 }));
        assert_eq!(run_greedy(&GreedyParams::new(0, 0)), Err(GreedyError::EmptyBoard));
    }

    #[test]
    fn replayed_placements_were_available() {
        for seed in 0..20 {
            let out = run_greedy(&GreedyParams::new(23, seed).with_stop(23).recording_lines()).unwrap();
            let mut cfg = PartialConfig::new(23);
            for (t, &p) in out.placements.iter().enumerate() {
                let avail = available_set(&cfg);
                assert_eq!(avail.len() as u64, out.trajectory.available[t]);
                assert!(avail.contains(&p));
                cfg.place(p, Rule::Toroidal).unwrap();
            }
            assert!(verify(&out.config, Rule::Toroidal));
            assert!(step_change_audit(&out).unwrap());
        }
    }

    #[test]
    fn coupled_two_by_two() {
        let grid = RankGrid::from_ranks(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let out = run_greedy_coupled(&grid, 2).unwrap();
        assert!(out.aborted);
        assert_eq!(out.placements, vec![Position::new(1, 1)]);
        let one = RankGrid::from_ranks(1, vec![0.5]).unwrap();
        assert_eq!(run_greedy_coupled(&one, 1).unwrap().placements, vec![Position::new(1, 1)]);
    }

    #[test]
    fn coupled_ties_break_by_position() {
        let grid = RankGrid::from_ranks(3, vec![0.5; 9]).unwrap();
        let out = run_greedy_coupled(&grid, 3).unwrap();
        assert_eq!(out.placements[0], Position::new(1, 1));
    }

    #[test]
    fn audit_flags_injected_jump() {
        let mut out = run_greedy(&GreedyParams::new(8, 1).with_stop(4).recording_lines()).unwrap();
        assert!(step_change_audit(&out).unwrap());
        let counts = out.trajectory.line_counts.as_mut().unwrap();
        let line = counts[1].iter().position(|c| c.is_some()).unwrap();
        let prev = counts[0][line].unwrap();
        counts[1][line] = Some(prev - 5);
        assert!(!step_change_audit(&out).unwrap());

        let plain = run_greedy(&GreedyParams::new(8, 1)).unwrap();
        assert_eq!(step_change_audit(&plain), Err(GreedyError::MissingLineRecords));
        let single = run_greedy(&GreedyParams::new(1, 1).with_stop(1).recording_lines()).unwrap();
        assert!(step_change_audit(&single).unwrap());
    }

    #[test]
    fn rank_grid_validation() {
        assert!(RankGrid::from_ranks(2, vec![0.1; 3]).is_err());
        assert!(matches!(RankGrid::from_ranks(1, vec![1.5]), Err(GreedyError::BadRank(_))));
        assert!(RankGrid::from_ranks(1, vec![f64::NAN]).is_err());
    }
}
