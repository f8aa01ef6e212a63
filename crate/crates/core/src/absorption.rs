//! Absorbers and the completion phase.
//!
//! A queen `(x, y)` is an *absorber* for the square `(r, c)` when swapping it
//! for the pair `(r, y)`, `(x, c)` keeps the configuration valid:
//!
//! 1. `(x, y)` and `(r, c)` share no ordinary diagonal (equivalently `(r, y)`
//!    and `(x, c)` share none), and
//! 2. the four ordinary diagonals through `(r, y)` and `(x, c)` hold no queen
//!    other than `(x, y)` itself.
//!
//! If row `r` and column `c` are both empty the swap covers them while keeping
//! every previously covered row and column covered. [`run_absorption`] uses
//! this to finish a partial configuration one uncovered row/column pair at a
//! time.
//!
//! *Safe* absorbers are absorbers whose four toroidal diagonals through
//! `(r, y)` and `(x, c)` are each held by a queen on the far side (off the
//! ordinary diagonal). Later toroidal placements can never block them.

use std::collections::{BTreeSet, HashMap};

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{self, BoardError, PartialConfig, Position, Rule};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbsorptionError {
    #[error("query {0} is outside the board")]
    QueryOutOfRange(Position),
    #[error("{absorber} is not an absorber for {query}")]
    NotAnAbsorber { query: Position, absorber: Position },
    #[error("row {0} is already covered")]
    RowCovered(usize),
    #[error("column {0} is already covered")]
    ColCovered(usize),
    #[error("configuration is not a valid partial classical configuration")]
    InvalidConfig,
    #[error(transparent)]
    Board(#[from] BoardError),
}

/// Uncovered rows paired with uncovered columns, and the absorber used at
/// each step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorptionPlan {
    pub matching: Vec<(usize, usize)>,
    pub choices: Vec<Position>,
    /// `|B_i|`, the number of absorbers available at each executed step.
    pub candidate_counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AbsorptionOutcome {
    Completed {
        config: PartialConfig,
        plan: AbsorptionPlan,
    },
    Aborted {
        /// 1-based index of the step whose absorber set was empty.
        step: usize,
        query: Position,
        /// The configuration reached before the failing step.
        config: PartialConfig,
        plan: AbsorptionPlan,
    },
}

impl AbsorptionOutcome {
    pub fn is_completed(&self) -> bool {
        matches!(self, AbsorptionOutcome::Completed { .. })
    }

    pub fn config(&self) -> &PartialConfig {
        match self {
            AbsorptionOutcome::Completed { config, .. } | AbsorptionOutcome::Aborted { config, .. } => config,
        }
    }

    pub fn plan(&self) -> &AbsorptionPlan {
        match self {
            AbsorptionOutcome::Completed { plan, .. } | AbsorptionOutcome::Aborted { plan, .. } => plan,
        }
    }
}

fn check_query(q: Position, n: usize) -> Result<(), AbsorptionError> {
    if q.in_range(n) {
        Ok(())
    } else {
        Err(AbsorptionError::QueryOutOfRange(q))
    }
}

fn shares_diagonal(a: Position, b: Position) -> bool {
    a.diag_sum() == b.diag_sum() || a.diag_diff() == b.diag_diff()
}

fn is_absorber(cfg: &PartialConfig, q: Position, a: Position) -> bool {
    if shares_diagonal(q, a) {
        return false;
    }
    // occupancy of an ordinary diagonal, not counting `a`
    let plus = |s: i64| cfg.diag_plus_count(s) - u32::from(a.diag_sum() == s);
    let minus = |d: i64| cfg.diag_minus_count(d) - u32::from(a.diag_diff() == d);
    let ry = Position::new(q.row, a.col);
    let xc = Position::new(a.row, q.col);
    plus(ry.diag_sum()) == 0 && minus(ry.diag_diff()) == 0 && plus(xc.diag_sum()) == 0 && minus(xc.diag_diff()) == 0
}

/// All absorbers for `q` in `cfg`, in `(row, col)` order.
pub fn absorbers(cfg: &PartialConfig, q: Position) -> Vec<Position> {
    if !q.in_range(cfg.n()) {
        return Vec::new();
    }
    cfg.queens().filter(|&a| is_absorber(cfg, q, a)).collect()
}

/// Performs the exchange `(cfg ∖ {a}) ∪ {(r, a.col), (a.row, c)}`.
pub fn apply_absorber(cfg: &PartialConfig, q: Position, a: Position) -> Result<PartialConfig, AbsorptionError> {
    check_query(q, cfg.n())?;
    if !cfg.contains(a) || !is_absorber(cfg, q, a) {
        return Err(AbsorptionError::NotAnAbsorber { query: q, absorber: a });
    }
    if cfg.row_covered(q.row) {
        return Err(AbsorptionError::RowCovered(q.row));
    }
    if cfg.col_covered(q.col) {
        return Err(AbsorptionError::ColCovered(q.col));
    }
    let mut next = cfg.clone();
    next.remove(a)?;
    next.place(Position::new(q.row, a.col), Rule::Classical)?;
    next.place(Position::new(a.row, q.col), Rule::Classical)?;
    Ok(next)
}

/// Completes `cfg` by absorbing its uncovered rows and columns.
///
/// The `i`-th smallest uncovered row is paired with the `i`-th smallest
/// uncovered column. At each step an absorber is drawn uniformly from a
/// ChaCha8 stream seeded with `seed`.
pub fn run_absorption(cfg: &PartialConfig, seed: u64) -> Result<AbsorptionOutcome, AbsorptionError> {
    if !board::verify(cfg, Rule::Classical) {
        return Err(AbsorptionError::InvalidConfig);
    }
    let matching: Vec<(usize, usize)> = cfg.uncovered_rows().into_iter().zip(cfg.uncovered_cols()).collect();
    let mut rng = seeds::rng(seed);
    let mut plan = AbsorptionPlan { matching: matching.clone(), ..Default::default() };
    let mut current = cfg.clone();
    for (i, &(r, c)) in matching.iter().enumerate() {
        let query = Position::new(r, c);
        let candidates = absorbers(&current, query);
        let Some(&choice) = candidates.choose(&mut rng) else {
            return Ok(AbsorptionOutcome::Aborted { step: i + 1, query, config: current, plan });
        };
        plan.candidate_counts.push(candidates.len());
        plan.choices.push(choice);
        current = apply_absorber(&current, query, choice)?;
    }
    Ok(AbsorptionOutcome::Completed { config: current, plan })
}

/// Smallest absorber count over all `n²` queries.
pub fn min_absorber_count(cfg: &PartialConfig) -> usize {
    let n = cfg.n();
    (1..=n).flat_map(|r| (1..=n).map(move |c| Position::new(r, c))).map(|q| absorbers(cfg, q).len()).min().unwrap_or(0)
}

/// Whether every square of the board has at least `ell` absorbers.
pub fn is_ell_absorbing(cfg: &PartialConfig, ell: usize) -> bool {
    ell == 0 || min_absorber_count(cfg) >= ell
}

/// Lookup structure for the general safe-absorber definition over an
/// arbitrary set of squares.
struct SafeIndex<'a> {
    n: usize,
    set: &'a BTreeSet<Position>,
    isolated: BTreeSet<Position>,
    // toroidal class -> unique member, if the class holds exactly one square
    plus_owner: HashMap<usize, Option<Position>>,
    minus_owner: HashMap<usize, Option<Position>>,
}

impl<'a> SafeIndex<'a> {
    fn new(set: &'a BTreeSet<Position>, n: usize) -> Self {
        let tor = |p: Position| board::tor_classes(p, n).expect("square in range");
        let mut counts: [HashMap<usize, u32>; 4] = Default::default();
        for &p in set {
            let (s, d) = tor(p);
            for (m, key) in counts.iter_mut().zip([p.row, p.col, s, d]) {
                *m.entry(key).or_default() += 1;
            }
        }
        let isolated = set
            .iter()
            .copied()
            .filter(|&p| {
                let (s, d) = tor(p);
                counts.iter().zip([p.row, p.col, s, d]).all(|(m, key)| m[&key] == 1)
            })
            .collect();
        let mut plus_owner: HashMap<usize, Option<Position>> = HashMap::new();
        let mut minus_owner: HashMap<usize, Option<Position>> = HashMap::new();
        for &p in set {
            let (s, d) = tor(p);
            plus_owner.entry(s).and_modify(|o| *o = None).or_insert(Some(p));
            minus_owner.entry(d).and_modify(|o| *o = None).or_insert(Some(p));
        }
        SafeIndex { n, set, isolated, plus_owner, minus_owner }
    }

    /// Whether an isolated member of the set lies on the far segment of the
    /// plus (`plus = true`) or minus toroidal diagonal through `p`.
    fn far_witness(&self, p: Position, plus: bool) -> bool {
        let (s, d) = board::tor_classes(p, self.n).expect("square in range");
        let owner = if plus { self.plus_owner.get(&s) } else { self.minus_owner.get(&d) };
        match owner {
            Some(Some(w)) => {
                let on_near = if plus { w.diag_sum() == p.diag_sum() } else { w.diag_diff() == p.diag_diff() };
                !on_near && self.isolated.contains(w)
            }
            _ => false,
        }
    }

    fn is_safe(&self, q: Position, a: Position) -> bool {
        if !self.isolated.contains(&a) || shares_diagonal(q, a) {
            return false;
        }
        let ry = Position::new(q.row, a.col);
        let xc = Position::new(a.row, q.col);
        self.far_witness(ry, true)
            && self.far_witness(ry, false)
            && self.far_witness(xc, true)
            && self.far_witness(xc, false)
    }
}

/// Safe absorbers for `q` in an arbitrary set `set ⊆ [n]²`.
///
/// `(x, y) ∈ set` qualifies when it shares no ordinary diagonal with `q` and
/// there are squares `a₁, a₂` on the far segments through `(r, y)` and
/// `b₁, b₂` on those through `(x, c)`, all in `set`, such that none of the
/// five squares shares a row, column or toroidal diagonal with any other
/// member of `set`. Coinciding witnesses are allowed.
pub fn safe_absorbers(set: &BTreeSet<Position>, q: Position, n: usize) -> Vec<Position> {
    if !q.in_range(n) || set.iter().any(|p| !p.in_range(n)) {
        return Vec::new();
    }
    let index = SafeIndex::new(set, n);
    index.set.iter().copied().filter(|&a| index.is_safe(q, a)).collect()
}

/// `safe_absorbers` for every query in `queries`, sharing one index.
pub fn safe_absorber_counts(set: &BTreeSet<Position>, queries: &[Position], n: usize) -> Vec<usize> {
    if set.iter().any(|p| !p.in_range(n)) {
        return vec![0; queries.len()];
    }
    let index = SafeIndex::new(set, n);
    queries
        .iter()
        .map(|&q| if q.in_range(n) { index.set.iter().filter(|&&a| index.is_safe(q, a)).count() } else { 0 })
        .collect()
}

/// Whether both far segments through `p` have at least `n/10` squares
/// (exact integer comparison).
pub fn is_balanced(p: Position, n: usize) -> Result<bool, BoardError> {
    let (plus, minus) = board::far_segment_sizes(p, n)?;
    Ok(10 * plus >= n && 10 * minus >= n)
}

/// Whether `(x, y)` lies in the region `S`: outside both bands
/// `x - n/10 ≤ y ≤ x + n/10` and `9n/10 - x ≤ y ≤ 11n/10 - x`.
pub fn in_balanced_region(p: Position, n: usize) -> bool {
    let (x, y, n) = (p.row as i64, p.col as i64, n as i64);
    let near_main = 10 * x - n <= 10 * y && 10 * y <= 10 * x + n;
    let near_anti = 9 * n - 10 * x <= 10 * y && 10 * y <= 11 * n - 10 * x;
    !near_main && !near_anti
}

/// The region `S`, in `(row, col)` order.
///
/// When `n` is a multiple of 10 every member is balanced. Otherwise the
/// anti-diagonal band can leave cells whose plus far segment is one short of
/// `n/10` (e.g. `(3, 25)` at `n = 25`).
pub fn balanced_region(n: usize) -> Vec<Position> {
    (1..=n).flat_map(|r| (1..=n).map(move |c| Position::new(r, c))).filter(|&p| in_balanced_region(p, n)).collect()
}

/// Number of `(x, y)` with `x ≠ r`, `y ≠ c`, off both ordinary diagonals
/// through `(r, c)`, such that `(r, y)` and `(x, c)` both lie in `S`.
pub fn balanced_pair_count(n: usize, q: Position) -> Result<usize, AbsorptionError> {
    check_query(q, n)?;
    let rows: Vec<usize> = (1..=n).filter(|&x| x != q.row && in_balanced_region(Position::new(x, q.col), n)).collect();
    let cols: Vec<usize> = (1..=n).filter(|&y| y != q.col && in_balanced_region(Position::new(q.row, y), n)).collect();
    Ok(rows
        .iter()
        .flat_map(|&x| cols.iter().map(move |&y| Position::new(x, y)))
        .filter(|&p| !shares_diagonal(p, q))
        .count())
}
