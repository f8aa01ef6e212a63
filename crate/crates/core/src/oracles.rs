//! Brute-force ground truth.
//!
//! Nothing here reuses the board module's line indexing or occupancy
//! counters; geometry is recomputed from coordinates so that a shared bug
//! cannot hide in both sides of a differential test.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::board::{PartialConfig, Position, Rule};

/// Default ceiling for exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 14;
/// Hard ceiling: diagonal masks are 64 bits wide.
pub const ENUMERATION_MAX: usize = 32;
/// Ceiling for the definition-literal absorber oracles.
pub const BRUTE_LIMIT: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the enumeration limit of {limit}; pass --allow-large to override")]
    SizeGuard { n: usize, limit: usize },
    #[error("n = {n} exceeds the brute-force limit of {limit}")]
    BruteLimit { n: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationResult {
    pub n: usize,
    pub rule: Rule,
    pub count: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn guard(n: usize, allow_large: bool) -> Result<(), OracleError> {
    let limit = if allow_large { ENUMERATION_MAX } else { ENUMERATION_LIMIT };
    if n > limit {
        Err(OracleError::SizeGuard { n, limit })
    } else {
        Ok(())
    }
}

/// Bitmasks of the columns and diagonal keys in use, keys already reduced
/// for the rule.
#[derive(Clone, Copy)]
struct Masks {
    cols: u64,
    plus: u64,
    minus: u64,
}

/// Row-by-row backtracking.
fn backtrack(n: usize, rule: Rule, m: Masks, partial: &mut Vec<usize>, sink: &mut dyn FnMut(&[usize])) {
    let row = partial.len();
    if row == n {
        sink(partial);
        return;
    }
    for col in 0..n {
        let (s, d) = match rule {
            Rule::Classical => (row + col, row + n - 1 - col),
            Rule::Toroidal => ((row + col) % n, (row + n - col) % n),
        };
        if m.cols & (1 << col) != 0 || m.plus & (1 << s) != 0 || m.minus & (1 << d) != 0 {
            continue;
        }
        let next = Masks { cols: m.cols | 1 << col, plus: m.plus | 1 << s, minus: m.minus | 1 << d };
        partial.push(col);
        backtrack(n, rule, next, partial, sink);
        partial.pop();
    }
}

const EMPTY: Masks = Masks { cols: 0, plus: 0, minus: 0 };

fn enumerate(n: usize, rule: Rule, allow_large: bool) -> Result<EnumerationResult, OracleError> {
    guard(n, allow_large)?;
    let start = Instant::now();
    let mut count = 0u64;
    backtrack(n, rule, EMPTY, &mut Vec::with_capacity(n), &mut |_| count += 1);
    Ok(EnumerationResult { n, rule, count, elapsed: start.elapsed() })
}

/// Exact number of n-queens configurations.
pub fn enumerate_classic(n: usize, allow_large: bool) -> Result<EnumerationResult, OracleError> {
    enumerate(n, Rule::Classical, allow_large)
}

/// Exact number of toroidal n-queens configurations.
pub fn enumerate_toroidal(n: usize, allow_large: bool) -> Result<EnumerationResult, OracleError> {
    enumerate(n, Rule::Toroidal, allow_large)
}

/// Every configuration under `rule`, each listed by row.
pub fn solutions(n: usize, rule: Rule) -> Result<Vec<Vec<Position>>, OracleError> {
    guard(n, false)?;
    let mut out = Vec::new();
    backtrack(n, rule, EMPTY, &mut Vec::with_capacity(n), &mut |cols| {
        out.push(cols.iter().enumerate().map(|(r, &c)| Position::new(r + 1, c + 1)).collect());
    });
    Ok(out)
}

/// Counts classical configurations by filtering all `n!` permutations.
pub fn permutation_filter_count(n: usize) -> u64 {
    fn distinct_diagonals(perm: &[usize]) -> bool {
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i].abs_diff(perm[j]) == j - i {
                    return false;
                }
            }
        }
        true
    }
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = u64::from(distinct_diagonals(&perm));
    let mut c = vec![0; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            count += u64::from(distinct_diagonals(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    count
}

fn cells(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |a| (1..=n).map(move |b| (a, b)))
}

fn to_i(p: (usize, usize)) -> (i64, i64) {
    (p.0 as i64, p.1 as i64)
}

/// Squares on the ordinary diagonals through `p`.
fn ordinary_diagonals(p: (usize, usize), n: usize) -> BTreeSet<(usize, usize)> {
    let (r, c) = to_i(p);
    cells(n)
        .filter(|&q| {
            let (a, b) = to_i(q);
            a + b == r + c || a - b == r - c
        })
        .collect()
}

/// Squares on the toroidal diagonal through `p` (sum when `plus`).
fn wrapped_diagonal(p: (usize, usize), n: usize, plus: bool) -> BTreeSet<(usize, usize)> {
    let (r, c) = to_i(p);
    let m = n as i64;
    cells(n)
        .filter(|&q| {
            let (a, b) = to_i(q);
            if plus {
                (a + b - r - c) % m == 0
            } else {
                (a - b - r + c) % m == 0
            }
        })
        .collect()
}

/// Toroidal diagonal through `p` minus its ordinary part.
fn far_part(p: (usize, usize), n: usize, plus: bool) -> BTreeSet<(usize, usize)> {
    let (r, c) = to_i(p);
    wrapped_diagonal(p, n, plus)
        .into_iter()
        .filter(|&q| {
            let (a, b) = to_i(q);
            if plus {
                a + b != r + c
            } else {
                a - b != r - c
            }
        })
        .collect()
}

fn brute_guard(n: usize) -> Result<(), OracleError> {
    if n > BRUTE_LIMIT {
        Err(OracleError::BruteLimit { n, limit: BRUTE_LIMIT })
    } else {
        Ok(())
    }
}

/// Absorbers for `q`, re-derived by materializing every diagonal involved.
pub fn brute_absorbers(cfg: &PartialConfig, q: Position) -> Result<Vec<Position>, OracleError> {
    let n = cfg.n();
    brute_guard(n)?;
    let queens: Vec<(usize, usize)> = cfg.queens().map(|p| (p.row, p.col)).collect();
    let (r, c) = (q.row, q.col);
    let mut out = Vec::new();
    for &(x, y) in &queens {
        if ordinary_diagonals((r, c), n).contains(&(x, y)) {
            continue;
        }
        let mut blocked: BTreeSet<(usize, usize)> = ordinary_diagonals((r, y), n);
        blocked.extend(ordinary_diagonals((x, c), n));
        let clear = queens.iter().filter(|&&other| other != (x, y)).all(|other| !blocked.contains(other));
        if clear {
            out.push(Position::new(x, y));
        }
    }
    Ok(out)
}

/// The far-segment sizes of `p` by explicit set construction.
pub fn brute_far_sizes(p: Position, n: usize) -> (usize, usize) {
    let p = (p.row, p.col);
    (far_part(p, n, true).len(), far_part(p, n, false).len())
}

fn shares_line(a: (usize, usize), b: (usize, usize), n: usize) -> bool {
    a.0 == b.0 || a.1 == b.1 || wrapped_diagonal(a, n, true).contains(&b) || wrapped_diagonal(a, n, false).contains(&b)
}

/// Safe absorbers for `q` in `set`, by exhaustive search over witness tuples.
pub fn brute_safe_absorbers(set: &BTreeSet<Position>, q: Position, n: usize) -> Result<Vec<Position>, OracleError> {
    brute_guard(n)?;
    let members: Vec<(usize, usize)> = set.iter().map(|p| (p.row, p.col)).collect();
    let isolated = |z: (usize, usize)| members.iter().all(|&w| w == z || !shares_line(z, w, n));
    let in_set = |seg: BTreeSet<(usize, usize)>| -> Vec<(usize, usize)> {
        seg.into_iter().filter(|z| members.contains(z)).collect()
    };
    let (r, c) = (q.row, q.col);
    let mut out = Vec::new();
    for &(x, y) in &members {
        if ordinary_diagonals((r, c), n).contains(&(x, y)) || !isolated((x, y)) {
            continue;
        }
        let a1s = in_set(far_part((r, y), n, true));
        let a2s = in_set(far_part((r, y), n, false));
        let b1s = in_set(far_part((x, c), n, true));
        let b2s = in_set(far_part((x, c), n, false));
        let found = a1s.iter().any(|&a1| {
            a2s.iter()
                .any(|&a2| b1s.iter().any(|&b1| b2s.iter().any(|&b2| [a1, a2, b1, b2].into_iter().all(&isolated))))
        });
        if found {
            out.push(Position::new(x, y));
        }
    }
    Ok(out)
}
