//! Young diagrams and the explicit diagram algebra used to assemble
//! Kronecker relations.
//!
//! A [`Partition`] is stored as its weakly decreasing list of positive row
//! lengths. Trailing zeros are stripped on construction, so `[3,1,0]` and
//! `[3,1]` are the same value.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    rows: Vec<usize>,
}

impl Partition {
    /// Builds a partition from row lengths, rejecting increasing sequences.
    pub fn new(mut rows: Vec<usize>) -> Result<Self> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!(
                "row lengths must be weakly decreasing and positive: {rows:?}"
            )));
        }
        Ok(Partition { rows })
    }

    /// Sorts arbitrary row lengths into a partition; zeros are dropped.
    pub fn from_unsorted(mut rows: Vec<usize>) -> Self {
        rows.retain(|&r| r > 0);
        rows.sort_unstable_by(|a, b| b.cmp(a));
        Partition { rows }
    }

    /// Builds the partition whose columns have the given lengths.
    pub fn from_columns(columns: Vec<usize>) -> Self {
        Partition::from_unsorted(columns).conjugate()
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<usize>) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(rows.last() != Some(&0));
        Partition { rows }
    }

    pub fn empty() -> Self {
        Partition { rows: Vec::new() }
    }

    /// The single row `1_n`; empty for `n = 0`.
    pub fn row(n: usize) -> Self {
        if n == 0 {
            Partition::empty()
        } else {
            Partition { rows: vec![n] }
        }
    }

    /// The single column `1^n`; empty for `n = 0`.
    pub fn column(n: usize) -> Self {
        Partition { rows: vec![1; n] }
    }

    /// `(r, r-1, ..., 1)`.
    pub fn staircase(r: usize) -> Self {
        Partition {
            rows: (1..=r).rev().collect(),
        }
    }

    /// `a` columns and `b` rows. Empty when either side is zero.
    pub fn rect(a: usize, b: usize) -> Self {
        if a == 0 {
            Partition::empty()
        } else {
            Partition { rows: vec![a; b] }
        }
    }

    /// A row of length `a` and a column of length `b` sharing a corner.
    pub fn hook(a: usize, b: usize) -> Self {
        if a == 0 || b == 0 {
            return Partition::empty();
        }
        let mut rows = vec![1; b];
        rows[0] = a;
        Partition { rows }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Row `i` (0-based); zero past the last row.
    pub fn row_len(&self, i: usize) -> usize {
        self.rows.get(i).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Number of rows.
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Length of the first row.
    pub fn width(&self) -> usize {
        self.row_len(0)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.width();
        let mut cols = Vec::with_capacity(width);
        for c in 0..width {
            cols.push(self.rows.iter().take_while(|&&r| r > c).count());
        }
        Partition { rows: cols }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.conjugate()
    }

    /// Adds row lengths componentwise.
    pub fn hsum(&self, other: &Partition) -> Partition {
        let len = self.height().max(other.height());
        let rows = (0..len)
            .map(|i| self.row_len(i) + other.row_len(i))
            .collect();
        Partition { rows }
    }

    /// Unions the multisets of row lengths.
    pub fn vsum(&self, other: &Partition) -> Partition {
        let mut rows = Vec::with_capacity(self.height() + other.height());
        let (mut i, mut j) = (0, 0);
        while i < self.rows.len() || j < other.rows.len() {
            let a = self.rows.get(i).copied().unwrap_or(0);
            let b = other.rows.get(j).copied().unwrap_or(0);
            if a >= b {
                rows.push(a);
                i += 1;
            } else {
                rows.push(b);
                j += 1;
            }
        }
        Partition { rows }
    }

    /// Number of cells of `self` outside `other`, with upper-left corners aligned.
    pub fn blockwise_distance(&self, other: &Partition) -> Result<usize> {
        if self.size() != other.size() {
            return Err(Error::invalid(format!(
                "blockwise distance needs equal sizes, got {} and {}",
                self.size(),
                other.size()
            )));
        }
        Ok(self
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| r.saturating_sub(other.row_len(i)))
            .sum())
    }

    pub fn distinct_row_lengths(&self) -> BTreeSet<usize> {
        self.rows.iter().copied().collect()
    }

    pub fn dist_rows(&self) -> usize {
        let mut n = 0;
        let mut prev = 0;
        for &r in &self.rows {
            if r != prev {
                n += 1;
                prev = r;
            }
        }
        n
    }

    /// Cells `(row, col)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| (0..r).map(move |j| (i, j)))
    }

    pub fn hook_lengths(&self) -> HookTable {
        let conj = self.conjugate();
        let arms = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| (0..r).map(|j| (r - j - 1, conj.rows[j] - i - 1)).collect())
            .collect();
        HookTable { arms_legs: arms }
    }

    /// `n! / prod H(s)`, exact.
    pub fn dimension(&self) -> BigUint {
        let n = self.size();
        let mut num = factorial(n);
        let mut den = BigUint::one();
        for row in self.hook_lengths().arms_legs {
            for (arm, leg) in row {
                den *= BigUint::from(arm + leg + 1);
            }
        }
        num /= den;
        num
    }

    /// Splits off `r` distinct rows as `nu +_H staircase(r)`, leaving the rest
    /// as `mu`, so that `self == mu +_V (nu +_H staircase(r))`.
    ///
    /// `chosen` names the row lengths to extract; by default the `r` largest
    /// distinct lengths are used. One row of each chosen length is moved.
    pub fn staircase_decompose(
        &self,
        r: usize,
        chosen: Option<&[usize]>,
    ) -> Result<(Partition, Partition)> {
        if r == 0 {
            return Err(Error::invalid("staircase size must be positive"));
        }
        let distinct = self.distinct_row_lengths();
        if distinct.len() < r {
            return Err(Error::precondition(format!(
                "{self} has {} distinct row lengths, need {r}",
                distinct.len()
            )));
        }
        let mut picked: Vec<usize> = match chosen {
            Some(lengths) => {
                let set: BTreeSet<usize> = lengths.iter().copied().collect();
                if set.len() != lengths.len() || set.len() != r {
                    return Err(Error::invalid(format!(
                        "expected {r} distinct chosen lengths, got {lengths:?}"
                    )));
                }
                if let Some(bad) = set.iter().find(|l| !distinct.contains(l)) {
                    return Err(Error::precondition(format!(
                        "{bad} is not a row length of {self}"
                    )));
                }
                set.into_iter().collect()
            }
            None => distinct.iter().rev().take(r).copied().collect(),
        };
        picked.sort_unstable_by(|a, b| b.cmp(a));

        let mut rest = self.rows.clone();
        for len in &picked {
            let pos = rest.iter().position(|x| x == len).expect("length present");
            rest.remove(pos);
        }
        let nu: Vec<usize> = picked
            .iter()
            .enumerate()
            .map(|(i, &len)| len - (r - i))
            .collect();
        Ok((
            Partition::from_rows_unchecked(rest),
            Partition::new(nu).expect("strictly decreasing lengths give a partition"),
        ))
    }

    /// Groups rows into blocks of `k` and writes each block as
    /// `Rect(k*h, k) +_H nu`, with `h = floor(a_{ki} / k)`.
    pub fn krect_decompose(&self, k: usize) -> Result<Vec<KRectBlock>> {
        if k == 0 {
            return Err(Error::invalid("block height k must be positive"));
        }
        let groups = self.height().div_ceil(k);
        let blocks = (0..groups)
            .map(|g| {
                let last = self.row_len(k * (g + 1) - 1);
                let h = last / k;
                let nu = (0..k).map(|t| self.row_len(k * g + t) - k * h).collect();
                KRectBlock {
                    h,
                    k,
                    nu: Partition::new(nu).expect("block rows stay decreasing"),
                }
            })
            .collect();
        Ok(blocks)
    }

    /// Replaces the first row by `M = max(a_2, b_1)` and returns the removed
    /// strip length `m = a_1 - M`, so that `self == hat +_H 1_m`.
    pub fn hat_decompose(&self) -> Result<(Partition, usize)> {
        if self.is_empty() {
            return Err(Error::invalid("hat decomposition of the empty partition"));
        }
        let top = self.max_second_or_column();
        if top > self.width() {
            return Err(Error::precondition(format!(
                "{self}: first column ({}) is longer than the first row",
                self.height()
            )));
        }
        let mut rows = self.rows.clone();
        rows[0] = top;
        Ok((Partition::from_rows_unchecked(rows), self.width() - top))
    }

    fn max_second_or_column(&self) -> usize {
        self.row_len(1).max(self.height())
    }
}

/// Builds the named shape, rejecting zero parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Trivial(usize),
    Column(usize),
    Staircase(usize),
    Rect(usize, usize),
    Hook(usize, usize),
}

impl ShapeKind {
    pub fn build(self) -> Result<Partition> {
        let ok = match self {
            ShapeKind::Trivial(n) | ShapeKind::Column(n) | ShapeKind::Staircase(n) => n >= 1,
            ShapeKind::Rect(a, b) | ShapeKind::Hook(a, b) => a >= 1 && b >= 1,
        };
        if !ok {
            return Err(Error::invalid(format!("{self:?}: parameters must be >= 1")));
        }
        Ok(match self {
            ShapeKind::Trivial(n) => Partition::row(n),
            ShapeKind::Column(n) => Partition::column(n),
            ShapeKind::Staircase(r) => Partition::staircase(r),
            ShapeKind::Rect(a, b) => Partition::rect(a, b),
            ShapeKind::Hook(a, b) => Partition::hook(a, b),
        })
    }
}

pub fn make_shape(kind: ShapeKind) -> Result<Partition> {
    kind.build()
}

/// Number of row lengths common to every partition in the list.
pub fn shared_dist_rows(ps: &[Partition]) -> Result<usize> {
    Ok(shared_row_lengths(ps)?.len())
}

pub fn shared_row_lengths(ps: &[Partition]) -> Result<BTreeSet<usize>> {
    let (first, rest) = ps
        .split_first()
        .ok_or_else(|| Error::invalid("shared row lengths of an empty list"))?;
    let mut common = first.distinct_row_lengths();
    for p in rest {
        let other = p.distinct_row_lengths();
        common.retain(|l| other.contains(l));
    }
    Ok(common)
}

/// Arm and leg of every cell; `H = arm + leg + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HookTable {
    arms_legs: Vec<Vec<(usize, usize)>>,
}

impl HookTable {
    pub fn hook(&self, row: usize, col: usize) -> usize {
        let (a, l) = self.arms_legs[row][col];
        a + l + 1
    }

    /// Cells from `(row, col)` to the end of its row, inclusive.
    pub fn row_part(&self, row: usize, col: usize) -> usize {
        self.arms_legs[row][col].0 + 1
    }

    /// Cells from `(row, col)` to the bottom of its column, inclusive.
    pub fn col_part(&self, row: usize, col: usize) -> usize {
        self.arms_legs[row][col].1 + 1
    }

    /// Hook lengths row by row.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.arms_legs
            .iter()
            .map(|r| r.iter().map(|(a, l)| a + l + 1).collect())
            .collect()
    }

    /// All hook lengths, sorted decreasing.
    pub fn sorted(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.rows().into_iter().flatten().collect();
        all.sort_unstable_by(|a, b| b.cmp(a));
        all
    }
}

/// One block `Rect(k*h, k) +_H nu` of a [`Partition::krect_decompose`] result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRectBlock {
    pub h: usize,
    pub k: usize,
    pub nu: Partition,
}

impl KRectBlock {
    pub fn block(&self) -> Partition {
        Partition::rect(self.k * self.h, self.k).hsum(&self.nu)
    }
}

pub fn krect_reconstruct(blocks: &[KRectBlock]) -> Partition {
    blocks
        .iter()
        .fold(Partition::empty(), |acc, b| acc.vsum(&b.block()))
}

/// Greedy column split: each part receives the next consecutive column
/// lengths while they fit, then one leftover column to reach its size.
/// The horizontal sum of the results has many distinct row lengths.
pub fn finish_split(parts: &[usize]) -> Result<Vec<Partition>> {
    if parts.is_empty() {
        return Err(Error::invalid("finish_split needs at least one part"));
    }
    if let Some(&bad) = parts.iter().find(|&&p| p == 0) {
        return Err(Error::invalid(format!("part sizes must be positive, got {bad}")));
    }
    let mut next = 1;
    let out = parts
        .iter()
        .map(|&target| {
            let mut cols = Vec::new();
            let mut used = 0;
            while used + next <= target {
                cols.push(next);
                used += next;
                next += 1;
            }
            if used < target {
                cols.push(target - used);
            }
            Partition::from_columns(cols)
        })
        .collect();
    Ok(out)
}

pub fn hsum_all<'a>(ps: impl IntoIterator<Item = &'a Partition>) -> Partition {
    ps.into_iter()
        .fold(Partition::empty(), |acc, p| acc.hsum(p))
}

pub fn vsum_all<'a>(ps: impl IntoIterator<Item = &'a Partition>) -> Partition {
    ps.into_iter()
        .fold(Partition::empty(), |acc, p| acc.vsum(p))
}

/// `p(0), ..., p(n)` by Euler's pentagonal recurrence.
pub fn partition_numbers(n: usize) -> Vec<BigUint> {
    use num_bigint::BigInt;
    use num_traits::Signed;
    let mut p: Vec<BigInt> = Vec::with_capacity(n + 1);
    p.push(BigInt::one());
    for m in 1..=n {
        let mut acc = BigInt::default();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let positive = k % 2 == 1;
            let mut term = p[m - g1].clone();
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                term += &p[m - g2];
            }
            if positive {
                acc += term;
            } else {
                acc -= term;
            }
        }
        p.push(acc);
    }
    p.into_iter()
        .map(|x| {
            debug_assert!(!x.is_negative());
            x.to_biguint().expect("partition numbers are positive")
        })
        .collect()
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Natural log of a big integer, accurate to f64 precision.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let f: f64 = num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY);
        return f.ln();
    }
    let shift = bits - 64;
    let top: f64 = num_traits::ToPrimitive::to_f64(&(x >> shift)).unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses `[a,b,c]`; whitespace is ignored and `[]` is the empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::invalid(format!("partition must look like [a,b,...]: {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let rows = inner
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad row length {x:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(rows)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(rows: Vec<usize>) -> Result<Self> {
        Partition::new(rows)
    }
}

/// Shorthand for literal partitions in code and tests. Panics on invalid input.
#[macro_export]
macro_rules! part {
    () => { $crate::Partition::empty() };
    ($($r:expr),+ $(,)?) => {
        $crate::Partition::new(vec![$($r),+]).expect("valid partition literal")
    };
}
