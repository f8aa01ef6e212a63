//! Board geometry, line indexing and configuration state.
//!
//! Squares are 1-based `(row, col)` pairs in `[1..n]²`. Toroidal diagonal
//! classes are residues of `row + col` and `row - col` modulo `n`, normalized
//! to `[0..n-1]`. Ordinary (non-toroidal) diagonals are indexed by the exact
//! sum in `[2..2n]` and the exact difference in `[-(n-1)..n-1]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A board square. Both coordinates are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub const fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }

    pub fn in_range(self, n: usize) -> bool {
        (1..=n).contains(&self.row) && (1..=n).contains(&self.col)
    }

    /// Exact sum, the index of the ordinary "plus" diagonal.
    pub fn diag_sum(self) -> i64 {
        (self.row + self.col) as i64
    }

    /// Exact difference, the index of the ordinary "minus" diagonal.
    pub fn diag_diff(self) -> i64 {
        self.row as i64 - self.col as i64
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl From<(usize, usize)> for Position {
    fn from((row, col): (usize, usize)) -> Self {
        Position { row, col }
    }
}

/// Which lines count as attacking lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Rows, columns and toroidal (wrapping) diagonals.
    Toroidal,
    /// Rows, columns and ordinary chess diagonals.
    Classical,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Toroidal => f.write_str("toroidal"),
            Rule::Classical => f.write_str("classical"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LineKind {
    Row,
    Col,
    TorDiagPlus,
    TorDiagMinus,
    DiagPlus,
    DiagMinus,
}

impl LineKind {
    pub const ALL: [LineKind; 6] = [
        LineKind::Row,
        LineKind::Col,
        LineKind::TorDiagPlus,
        LineKind::TorDiagMinus,
        LineKind::DiagPlus,
        LineKind::DiagMinus,
    ];

    /// The four families that make up the toroidal "lines".
    pub const TOROIDAL: [LineKind; 4] = [LineKind::Row, LineKind::Col, LineKind::TorDiagPlus, LineKind::TorDiagMinus];

    pub const CLASSICAL: [LineKind; 4] = [LineKind::Row, LineKind::Col, LineKind::DiagPlus, LineKind::DiagMinus];

    pub fn families(rule: Rule) -> [LineKind; 4] {
        match rule {
            Rule::Toroidal => Self::TOROIDAL,
            Rule::Classical => Self::CLASSICAL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineId {
    pub kind: LineKind,
    pub index: i64,
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.kind, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("board size must be at least 1")]
    EmptyBoard,
    #[error("position {pos} is outside the {n}x{n} board")]
    OutOfRange { pos: Position, n: usize },
    #[error("position {0} already holds a queen")]
    Duplicate(Position),
    #[error("placing {pos} violates the {rule} rule on line {line}")]
    Conflict { pos: Position, rule: Rule, line: LineId },
    #[error("no queen at {0}")]
    NotPresent(Position),
    #[error("line {0} does not exist on this board")]
    BadLine(LineId),
}

fn check(p: Position, n: usize) -> Result<(), BoardError> {
    if p.in_range(n) {
        Ok(())
    } else {
        Err(BoardError::OutOfRange { pos: p, n })
    }
}

fn residue(v: i64, n: usize) -> usize {
    v.rem_euclid(n as i64) as usize
}

/// Toroidal diagonal classes `((row+col) mod n, (row-col) mod n)`.
pub fn tor_classes(p: Position, n: usize) -> Result<(usize, usize), BoardError> {
    check(p, n)?;
    Ok((residue(p.diag_sum(), n), residue(p.diag_diff(), n)))
}

/// Sizes of the two far segments through `p`: the toroidal diagonal minus the
/// ordinary diagonal it contains.
pub fn far_segment_sizes(p: Position, n: usize) -> Result<(usize, usize), BoardError> {
    check(p, n)?;
    let plus = (p.diag_sum() - (n as i64 + 1)).unsigned_abs() as usize;
    let minus = p.diag_diff().unsigned_abs() as usize;
    Ok((plus, minus))
}

/// The far segment through `p` on the plus (`kind = TorDiagPlus`) or minus
/// (`kind = TorDiagMinus`) toroidal diagonal, listed by row.
pub fn far_segment(p: Position, n: usize, kind: LineKind) -> Result<Vec<Position>, BoardError> {
    check(p, n)?;
    let (tor, near) = match kind {
        LineKind::TorDiagPlus | LineKind::DiagPlus => (
            LineId { kind: LineKind::TorDiagPlus, index: residue(p.diag_sum(), n) as i64 },
            LineId { kind: LineKind::DiagPlus, index: p.diag_sum() },
        ),
        LineKind::TorDiagMinus | LineKind::DiagMinus => (
            LineId { kind: LineKind::TorDiagMinus, index: residue(p.diag_diff(), n) as i64 },
            LineId { kind: LineKind::DiagMinus, index: p.diag_diff() },
        ),
        _ => return Err(BoardError::BadLine(LineId { kind, index: 0 })),
    };
    let near: BTreeSet<Position> = line_members(near, n)?.into_iter().collect();
    Ok(line_members(tor, n)?.into_iter().filter(|q| !near.contains(q)).collect())
}

/// The six lines through `p`, in [`LineKind::ALL`] order.
pub fn lines_through(p: Position, n: usize) -> Result<[LineId; 6], BoardError> {
    let (ts, td) = tor_classes(p, n)?;
    Ok([
        LineId { kind: LineKind::Row, index: p.row as i64 },
        LineId { kind: LineKind::Col, index: p.col as i64 },
        LineId { kind: LineKind::TorDiagPlus, index: ts as i64 },
        LineId { kind: LineKind::TorDiagMinus, index: td as i64 },
        LineId { kind: LineKind::DiagPlus, index: p.diag_sum() },
        LineId { kind: LineKind::DiagMinus, index: p.diag_diff() },
    ])
}

/// Every line of the given families, in a fixed order.
pub fn all_lines(n: usize, kinds: &[LineKind]) -> Vec<LineId> {
    let n_i = n as i64;
    let mut out = Vec::new();
    for &kind in kinds {
        let range: Box<dyn Iterator<Item = i64>> = match kind {
            LineKind::Row | LineKind::Col => Box::new(1..=n_i),
            LineKind::TorDiagPlus | LineKind::TorDiagMinus => Box::new(0..n_i),
            LineKind::DiagPlus => Box::new(2..=2 * n_i),
            LineKind::DiagMinus => Box::new(-(n_i - 1)..=n_i - 1),
        };
        out.extend(range.map(|index| LineId { kind, index }));
    }
    out
}

/// Member squares of a line, listed by row.
pub fn line_members(line: LineId, n: usize) -> Result<Vec<Position>, BoardError> {
    let n_i = n as i64;
    let bad = || BoardError::BadLine(line);
    let idx = line.index;
    let members = match line.kind {
        LineKind::Row => {
            if !(1..=n_i).contains(&idx) {
                return Err(bad());
            }
            (1..=n).map(|c| Position::new(idx as usize, c)).collect()
        }
        LineKind::Col => {
            if !(1..=n_i).contains(&idx) {
                return Err(bad());
            }
            (1..=n).map(|r| Position::new(r, idx as usize)).collect()
        }
        LineKind::TorDiagPlus => {
            if !(0..n_i).contains(&idx) {
                return Err(bad());
            }
            (1..=n).map(|r| Position::new(r, residue(idx - r as i64 - 1, n) + 1)).collect()
        }
        LineKind::TorDiagMinus => {
            if !(0..n_i).contains(&idx) {
                return Err(bad());
            }
            (1..=n).map(|r| Position::new(r, residue(r as i64 - idx - 1, n) + 1)).collect()
        }
        LineKind::DiagPlus => {
            if !(2..=2 * n_i).contains(&idx) {
                return Err(bad());
            }
            (1..=n)
                .filter_map(|r| {
                    let c = idx - r as i64;
                    (1..=n_i).contains(&c).then(|| Position::new(r, c as usize))
                })
                .collect()
        }
        LineKind::DiagMinus => {
            if !(-(n_i - 1)..=n_i - 1).contains(&idx) {
                return Err(bad());
            }
            (1..=n)
                .filter_map(|r| {
                    let c = r as i64 - idx;
                    (1..=n_i).contains(&c).then(|| Position::new(r, c as usize))
                })
                .collect()
        }
    };
    Ok(members)
}

/// A set of queens together with per-line occupant counts for all six line
/// families. The counts are maintained incrementally and always agree with a
/// from-scratch recount.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialConfig {
    n: usize,
    queens: BTreeSet<Position>,
    rows: Vec<u32>,
    cols: Vec<u32>,
    tor_plus: Vec<u32>,
    tor_minus: Vec<u32>,
    // index: sum - 2
    diag_plus: Vec<u32>,
    // index: diff + n - 1
    diag_minus: Vec<u32>,
}

impl PartialConfig {
    /// An empty `n`x`n` board.
    ///
    /// # Panics
    ///
    /// If `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "board size must be at least 1");
        PartialConfig {
            n,
            queens: BTreeSet::new(),
            rows: vec![0; n],
            cols: vec![0; n],
            tor_plus: vec![0; n],
            tor_minus: vec![0; n],
            diag_plus: vec![0; 2 * n - 1],
            diag_minus: vec![0; 2 * n - 1],
        }
    }

    /// Builds a configuration from arbitrary squares without enforcing any
    /// attack rule. Only range and duplicate checks apply.
    pub fn from_positions<I>(n: usize, positions: I) -> Result<Self, BoardError>
    where
        I: IntoIterator<Item = Position>,
    {
        if n == 0 {
            return Err(BoardError::EmptyBoard);
        }
        let mut cfg = PartialConfig::new(n);
        for p in positions {
            check(p, n)?;
            if cfg.queens.contains(&p) {
                return Err(BoardError::Duplicate(p));
            }
            cfg.insert(p);
        }
        Ok(cfg)
    }

    /// Builds a configuration, placing every square under `rule`.
    pub fn with_rule<I>(n: usize, rule: Rule, positions: I) -> Result<Self, BoardError>
    where
        I: IntoIterator<Item = Position>,
    {
        if n == 0 {
            return Err(BoardError::EmptyBoard);
        }
        let mut cfg = PartialConfig::new(n);
        for p in positions {
            cfg.place(p, rule)?;
        }
        Ok(cfg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.queens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queens.is_empty()
    }

    pub fn contains(&self, p: Position) -> bool {
        self.queens.contains(&p)
    }

    /// Queens in `(row, col)` order.
    pub fn queens(&self) -> impl ExactSizeIterator<Item = Position> + '_ {
        self.queens.iter().copied()
    }

    pub fn queen_set(&self) -> &BTreeSet<Position> {
        &self.queens
    }

    fn slots(&self, p: Position) -> [usize; 6] {
        let n = self.n;
        [
            p.row - 1,
            p.col - 1,
            residue(p.diag_sum(), n),
            residue(p.diag_diff(), n),
            (p.diag_sum() - 2) as usize,
            (p.diag_diff() + n as i64 - 1) as usize,
        ]
    }

    fn family(&self, kind: LineKind) -> &[u32] {
        match kind {
            LineKind::Row => &self.rows,
            LineKind::Col => &self.cols,
            LineKind::TorDiagPlus => &self.tor_plus,
            LineKind::TorDiagMinus => &self.tor_minus,
            LineKind::DiagPlus => &self.diag_plus,
            LineKind::DiagMinus => &self.diag_minus,
        }
    }

    fn bump(&mut self, p: Position, up: bool) {
        let s = self.slots(p);
        let fams: [&mut Vec<u32>; 6] = [
            &mut self.rows,
            &mut self.cols,
            &mut self.tor_plus,
            &mut self.tor_minus,
            &mut self.diag_plus,
            &mut self.diag_minus,
        ];
        for (fam, i) in fams.into_iter().zip(s) {
            if up {
                fam[i] += 1;
            } else {
                fam[i] -= 1;
            }
        }
    }

    fn insert(&mut self, p: Position) {
        self.queens.insert(p);
        self.bump(p, true);
    }

    /// Occupant count of a line.
    pub fn line_count(&self, line: LineId) -> Result<u32, BoardError> {
        let n = self.n as i64;
        let slot = match line.kind {
            LineKind::Row | LineKind::Col if (1..=n).contains(&line.index) => line.index - 1,
            LineKind::TorDiagPlus | LineKind::TorDiagMinus if (0..n).contains(&line.index) => line.index,
            LineKind::DiagPlus if (2..=2 * n).contains(&line.index) => line.index - 2,
            LineKind::DiagMinus if (-(n - 1)..n).contains(&line.index) => line.index + n - 1,
            _ => return Err(BoardError::BadLine(line)),
        };
        Ok(self.family(line.kind)[slot as usize])
    }

    /// Occupant count of the ordinary plus diagonal with the given exact sum
    /// (0 for sums off the board).
    pub fn diag_plus_count(&self, sum: i64) -> u32 {
        let n = self.n as i64;
        if (2..=2 * n).contains(&sum) {
            self.diag_plus[(sum - 2) as usize]
        } else {
            0
        }
    }

    /// Occupant count of the ordinary minus diagonal with the given exact
    /// difference (0 for differences off the board).
    pub fn diag_minus_count(&self, diff: i64) -> u32 {
        let n = self.n as i64;
        if (-(n - 1)..n).contains(&diff) {
            self.diag_minus[(diff + n - 1) as usize]
        } else {
            0
        }
    }

    pub fn row_covered(&self, row: usize) -> bool {
        self.rows[row - 1] > 0
    }

    pub fn col_covered(&self, col: usize) -> bool {
        self.cols[col - 1] > 0
    }

    pub fn uncovered_rows(&self) -> Vec<usize> {
        (1..=self.n).filter(|&r| self.rows[r - 1] == 0).collect()
    }

    pub fn uncovered_cols(&self) -> Vec<usize> {
        (1..=self.n).filter(|&c| self.cols[c - 1] == 0).collect()
    }

    /// Whether `p` could be added under `rule` without a shared line.
    pub fn admits(&self, p: Position, rule: Rule) -> Result<(), BoardError> {
        check(p, self.n)?;
        if self.queens.contains(&p) {
            return Err(BoardError::Duplicate(p));
        }
        let lines = lines_through(p, self.n)?;
        let slots = self.slots(p);
        for (i, kind) in LineKind::ALL.iter().enumerate() {
            if LineKind::families(rule).contains(kind) && self.family(*kind)[slots[i]] > 0 {
                return Err(BoardError::Conflict { pos: p, rule, line: lines[i] });
            }
        }
        Ok(())
    }

    /// Adds a queen, rejecting it if it shares a line of `rule` with an
    /// existing queen.
    pub fn place(&mut self, p: Position, rule: Rule) -> Result<(), BoardError> {
        self.admits(p, rule)?;
        self.insert(p);
        Ok(())
    }

    pub fn remove(&mut self, p: Position) -> Result<(), BoardError> {
        if !self.queens.remove(&p) {
            return Err(BoardError::NotPresent(p));
        }
        self.bump(p, false);
        Ok(())
    }

    /// Whether row, column and both toroidal classes of `p` are free.
    pub fn is_available(&self, p: Position) -> bool {
        let s = self.slots(p);
        self.rows[s[0]] == 0 && self.cols[s[1]] == 0 && self.tor_plus[s[2]] == 0 && self.tor_minus[s[3]] == 0
    }

    /// Whether the incremental counts equal a recount from `queens`.
    pub fn occupancy_consistent(&self) -> bool {
        let mut fresh = PartialConfig::new(self.n);
        for &p in &self.queens {
            fresh.insert(p);
        }
        fresh == *self
    }
}

/// Checks every line of `rule` for at most one queen, recounting from the
/// queen set alone.
pub fn verify(cfg: &PartialConfig, rule: Rule) -> bool {
    verify_positions(cfg.n(), cfg.queens(), rule)
}

/// Same as [`verify`] for a bare list of squares. Out-of-range or repeated
/// squares fail.
pub fn verify_positions<I>(n: usize, positions: I, rule: Rule) -> bool
where
    I: IntoIterator<Item = Position>,
{
    use std::collections::HashSet;
    let mut seen: [HashSet<i64>; 4] = Default::default();
    for p in positions {
        if !p.in_range(n) {
            return false;
        }
        let keys = match rule {
            Rule::Toroidal => {
                [p.row as i64, p.col as i64, residue(p.diag_sum(), n) as i64, residue(p.diag_diff(), n) as i64]
            }
            Rule::Classical => [p.row as i64, p.col as i64, p.diag_sum(), p.diag_diff()],
        };
        for (set, key) in seen.iter_mut().zip(keys) {
            if !set.insert(key) {
                return false;
            }
        }
    }
    true
}

/// All squares whose row, column and toroidal classes are free, by brute
/// force over the whole board.
pub fn available_set(cfg: &PartialConfig) -> Vec<Position> {
    let n = cfg.n();
    (1..=n).flat_map(|r| (1..=n).map(move |c| Position::new(r, c))).filter(|&p| cfg.is_available(p)).collect()
}
