//! Irreducible characters of `S_n` by the Murnaghan–Nakayama rule.
//!
//! Character values are computed by removing border strips in the beta-set
//! (abacus) picture: a strip of length `k` corresponds to moving one bead
//! from position `b` to the free position `b - k`, with sign `(-1)^h` where
//! `h` counts the beads jumped over. Recursion consumes cycles largest first
//! and is memoized on `(remaining shape, remaining cycles)`.
//!
//! Full tables are built in parallel over classes and may be persisted to a
//! versioned text cache, see [`CharacterTable::write_cache`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::{factorial, Partition};

pub const CACHE_MAGIC: &str = "kroncover-character-table";
pub const CACHE_VERSION: u32 = 1;

/// All partitions of `n` in reverse-lexicographic order.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Partition::empty());
        return out;
    }
    // rows in decreasing order; step to the next partition in reverse-lex
    let mut rows = vec![n];
    loop {
        out.push(Partition::new(rows.clone()).expect("generated rows are decreasing"));
        let mut ones = 0;
        while rows.last() == Some(&1) {
            rows.pop();
            ones += 1;
        }
        let Some(last) = rows.pop() else { break };
        let part = last - 1;
        let mut rest = ones + 1;
        rows.push(part);
        while rest > part {
            rows.push(part);
            rest -= part;
        }
        if rest > 0 {
            rows.push(rest);
        }
    }
    out
}

/// [`partitions_of`] with an explicit size limit.
pub fn partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n > cap {
        return Err(Error::ResourceLimit {
            what: "enumeration size n",
            value: n,
            cap,
        });
    }
    Ok(partitions_of(n))
}

/// Cycle type of a conjugacy class of `S_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel(Partition);

impl ClassLabel {
    pub fn new(cycle_type: Partition) -> Self {
        ClassLabel(cycle_type)
    }

    pub fn cycle_type(&self) -> &Partition {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.size()
    }

    /// `(-1)^(n - #cycles)`.
    pub fn sign(&self) -> i64 {
        if (self.n() - self.0.height()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Centralizer order `z = prod i^{m_i} m_i!`.
    pub fn order(&self) -> BigUint {
        let mut z = BigUint::one();
        let rows = self.0.rows();
        let mut i = 0;
        while i < rows.len() {
            let len = rows[i];
            let mult = rows[i..].iter().take_while(|&&r| r == len).count();
            z *= BigUint::from(len).pow(mult as u32) * factorial(mult);
            i += mult;
        }
        z
    }

    /// Number of permutations in the class, `n! / z`.
    pub fn class_size(&self) -> BigUint {
        factorial(self.n()) / self.order()
    }
}

impl From<Partition> for ClassLabel {
    fn from(p: Partition) -> Self {
        ClassLabel(p)
    }
}

pub fn class_order(rho: &ClassLabel) -> BigUint {
    rho.order()
}

/// Memoizing Murnaghan–Nakayama evaluator.
#[derive(Default)]
pub struct MnEvaluator {
    memo: HashMap<(Vec<usize>, Vec<usize>), i64>,
}

impl MnEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// `chi^lambda(rho)`.
    pub fn character(&mut self, lambda: &Partition, rho: &ClassLabel) -> Result<i64> {
        if lambda.size() != rho.n() {
            return Err(Error::invalid(format!(
                "character needs equal sizes: {lambda} vs class {}",
                rho.cycle_type()
            )));
        }
        self.eval(lambda.rows(), rho.cycle_type().rows())
    }

    fn eval(&mut self, shape: &[usize], cycles: &[usize]) -> Result<i64> {
        if cycles.is_empty() {
            return Ok(if shape.is_empty() { 1 } else { 0 });
        }
        if cycles[0] == 1 {
            return syt_count(shape);
        }
        let key = (shape.to_vec(), cycles.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let k = cycles[0];
        let len = shape.len();
        let beta: Vec<usize> = shape
            .iter()
            .enumerate()
            .map(|(i, &r)| r + len - 1 - i)
            .collect();
        let mut total: i64 = 0;
        for i in 0..len {
            if beta[i] < k {
                continue;
            }
            let target = beta[i] - k;
            if beta.binary_search_by(|b| target.cmp(b)).is_ok() {
                continue;
            }
            // beads strictly between target and beta[i]
            let jumped = beta[i + 1..].iter().take_while(|&&b| b > target).count();
            let mut next = beta.clone();
            next[i] = target;
            next.sort_unstable_by(|a, b| b.cmp(a));
            let rows: Vec<usize> = next
                .iter()
                .enumerate()
                .map(|(t, &b)| b - (len - 1 - t))
                .take_while(|&r| r > 0)
                .collect();
            let sub = self.eval(&rows, &cycles[1..])?;
            let term = if jumped % 2 == 0 { sub } else { -sub };
            total = total.checked_add(term).ok_or(Error::Overflow("character value"))?;
        }
        self.memo.insert(key, total);
        Ok(total)
    }
}

/// Number of standard Young tableaux, i.e. the character at the identity.
fn syt_count(shape: &[usize]) -> Result<i64> {
    let p = Partition::new(shape.to_vec())?;
    p.dimension()
        .to_i64()
        .ok_or(Error::Overflow("character value"))
}

/// `chi^lambda(rho)` with a fresh evaluator.
pub fn character(lambda: &Partition, rho: &ClassLabel) -> Result<i64> {
    MnEvaluator::new().character(lambda, rho)
}

/// Exact character table of `S_n`. Irreducibles and classes are both indexed
/// by the partitions of `n` in reverse-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    n: usize,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    class_orders: Vec<BigUint>,
    values: Vec<i64>,
}

impl CharacterTable {
    /// Builds the table, parallel over classes.
    pub fn build(n: usize, cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::ResourceLimit {
                what: "character table size n",
                value: n,
                cap,
            });
        }
        let partitions = partitions_of(n);
        let classes: Vec<ClassLabel> = partitions.iter().cloned().map(ClassLabel).collect();
        let columns: Vec<Vec<i64>> = classes
            .par_iter()
            .map_init(MnEvaluator::new, |mn, rho| {
                partitions
                    .iter()
                    .map(|lambda| mn.character(lambda, rho))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<_>>()?;
        let p = partitions.len();
        let mut values = vec![0i64; p * p];
        for (j, col) in columns.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                values[i * p + j] = v;
            }
        }
        let class_orders = classes.iter().map(ClassLabel::order).collect();
        Ok(Self::assemble(n, partitions, class_orders, values))
    }

    fn assemble(
        n: usize,
        partitions: Vec<Partition>,
        class_orders: Vec<BigUint>,
        values: Vec<i64>,
    ) -> Self {
        let index = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        CharacterTable {
            n,
            partitions,
            index,
            class_orders,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn irreps(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn classes(&self) -> Vec<ClassLabel> {
        self.partitions.iter().cloned().map(ClassLabel).collect()
    }

    pub fn class_orders(&self) -> &[BigUint] {
        &self.class_orders
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn partition(&self, i: usize) -> &Partition {
        &self.partitions[i]
    }

    /// `chi^{irreps[irrep]}(classes[class])`.
    pub fn value(&self, irrep: usize, class: usize) -> i64 {
        self.values[irrep * self.len() + class]
    }

    pub fn row(&self, irrep: usize) -> &[i64] {
        let p = self.len();
        &self.values[irrep * p..(irrep + 1) * p]
    }

    /// Index of the identity class `(1^n)`.
    pub fn identity_class(&self) -> usize {
        self.len() - 1
    }

    /// `n! / z_rho` for every class.
    pub fn class_sizes(&self) -> Vec<BigUint> {
        let fact = factorial(self.n);
        self.class_orders.iter().map(|z| &fact / z).collect()
    }

    /// `sum_rho (n!/z_rho) chi^a chi^b == n! [a == b]` for all pairs.
    pub fn row_orthogonality_holds(&self) -> bool {
        let sizes: Vec<BigInt> = self.class_sizes().into_iter().map(BigInt::from).collect();
        let fact = BigInt::from(factorial(self.n));
        let p = self.len();
        (0..p).into_par_iter().all(|a| {
            (a..p).all(|b| {
                let s: BigInt = (0..p)
                    .map(|c| &sizes[c] * (self.value(a, c) as i128 * self.value(b, c) as i128))
                    .sum();
                if a == b {
                    s == fact
                } else {
                    s.is_zero()
                }
            })
        })
    }

    /// `sum_lambda chi(rho) chi(sigma) == z_rho [rho == sigma]` for all pairs.
    pub fn column_orthogonality_holds(&self) -> bool {
        let p = self.len();
        (0..p).into_par_iter().all(|c| {
            (c..p).all(|d| {
                let s: i128 = (0..p)
                    .map(|i| self.value(i, c) as i128 * self.value(i, d) as i128)
                    .sum();
                if c == d {
                    BigInt::from(s) == BigInt::from(self.class_orders[c].clone())
                } else {
                    s == 0
                }
            })
        })
    }

    /// Serializes the table in the versioned text format.
    pub fn to_cache_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{CACHE_MAGIC} {CACHE_VERSION}");
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "count {}", self.len());
        s.push_str("irreps\n");
        for p in &self.partitions {
            let _ = writeln!(s, "{p}");
        }
        s.push_str("classes\n");
        for (p, z) in self.partitions.iter().zip(&self.class_orders) {
            let _ = writeln!(s, "{p} {z}");
        }
        s.push_str("values\n");
        for i in 0..self.len() {
            let row: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s.push_str("end\n");
        s
    }

    /// Parses and validates a cached table for `n`.
    pub fn from_cache_str(text: &str, n: usize) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })
        };
        let bad = |line: usize, message: String| Error::Parse { line, message };

        let (ln, header) = next("header")?;
        if header != format!("{CACHE_MAGIC} {CACHE_VERSION}") {
            return Err(bad(ln, format!("unsupported header {header:?}")));
        }
        let (ln, nline) = next("n")?;
        if nline != format!("n {n}") {
            return Err(bad(ln, format!("expected n {n}, found {nline:?}")));
        }
        let expected = partitions_of(n);
        let (ln, cline) = next("count")?;
        if cline != format!("count {}", expected.len()) {
            return Err(bad(ln, format!("expected count {}, found {cline:?}", expected.len())));
        }
        let (ln, tag) = next("irreps")?;
        if tag != "irreps" {
            return Err(bad(ln, "expected irreps section".into()));
        }
        for want in &expected {
            let (ln, l) = next("irrep")?;
            let got: Partition = l.parse().map_err(|e| bad(ln, format!("{e}")))?;
            if &got != want {
                return Err(bad(ln, format!("irrep {got} out of order, expected {want}")));
            }
        }
        let (ln, tag) = next("classes")?;
        if tag != "classes" {
            return Err(bad(ln, "expected classes section".into()));
        }
        let mut orders = Vec::with_capacity(expected.len());
        for want in &expected {
            let (ln, l) = next("class")?;
            let (p, z) = l
                .rsplit_once(' ')
                .ok_or_else(|| bad(ln, "expected '<class> <order>'".into()))?;
            let got: Partition = p.parse().map_err(|e| bad(ln, format!("{e}")))?;
            let z: BigUint = z.parse().map_err(|_| bad(ln, format!("bad order {z:?}")))?;
            if &got != want || z != ClassLabel(want.clone()).order() {
                return Err(bad(ln, format!("class line {l:?} does not match {want}")));
            }
            orders.push(z);
        }
        let (ln, tag) = next("values")?;
        if tag != "values" {
            return Err(bad(ln, "expected values section".into()));
        }
        let p = expected.len();
        let mut values = Vec::with_capacity(p * p);
        for _ in 0..p {
            let (ln, l) = next("value row")?;
            let row = l
                .split(' ')
                .map(|x| x.parse::<i64>().map_err(|_| bad(ln, format!("bad value {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != p {
                return Err(bad(ln, format!("expected {p} values, found {}", row.len())));
            }
            values.extend(row);
        }
        let (ln, tag) = next("end")?;
        if tag != "end" {
            return Err(bad(ln, "expected end marker".into()));
        }
        let table = Self::assemble(n, expected, orders, values);
        let id = table.identity_class();
        for i in 0..p {
            if BigUint::from(table.value(i, id).max(0) as u64) != table.partitions[i].dimension() {
                return Err(bad(0, format!("identity column wrong for {}", table.partitions[i])));
            }
        }
        Ok(table)
    }

    pub fn cache_path(dir: &Path, n: usize) -> PathBuf {
        dir.join(format!("chartable-v{CACHE_VERSION}-n{n}.txt"))
    }

    pub fn write_cache(&self, dir: &Path) -> Result<PathBuf> {
        let path = Self::cache_path(dir, self.n);
        let io = |source| Error::Io {
            path: path.clone(),
            source,
        };
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(&path, self.to_cache_string()).map_err(io)?;
        Ok(path)
    }

    /// Loads the cached table when present and valid, otherwise builds it
    /// and refreshes the cache.
    pub fn load_or_build(n: usize, cap: usize, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else {
            return Self::build(n, cap);
        };
        if n > cap {
            return Self::build(n, cap);
        }
        let path = Self::cache_path(dir, n);
        if let Ok(text) = fs::read_to_string(&path) {
            match Self::from_cache_str(&text, n) {
                Ok(t) => return Ok(t),
                Err(e) => log::warn!("rebuilding corrupt cache {}: {e}", path.display()),
            }
        }
        let table = Self::build(n, cap)?;
        table.write_cache(dir)?;
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::part;

    #[test]
    fn enumeration() {
        assert_eq!(partitions_of(0), vec![Partition::empty()]);
        assert_eq!(
            partitions_of(4),
            vec![part![4], part![3, 1], part![2, 2], part![2, 1, 1], part![1, 1, 1, 1]]
        );
        assert_eq!(partitions_of(10).len(), 42);
        assert!(matches!(partitions_capped(61, 60), Err(Error::ResourceLimit { .. })));
    }

    /// p(n) by the recurrence on partitions with bounded largest part,
    /// independent of the enumerator.
    fn count_bounded(n: usize, k: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        if k == 0 {
            return 0;
        }
        count_bounded(n, k - 1) + if n >= k { count_bounded(n - k, k) } else { 0 }
    }

    #[test]
    fn enumeration_counts_match_recurrence() {
        for n in 0..=18 {
            let ps = partitions_of(n);
            assert_eq!(ps.len() as u64, count_bounded(n, n), "n={n}");
            assert!(ps.windows(2).all(|w| w[0] > w[1]), "reverse-lex at n={n}");
            assert!(ps.iter().all(|p| p.size() == n));
        }
    }

    #[test]
    fn class_orders() {
        assert_eq!(ClassLabel::new(part![1, 1, 1]).order(), BigUint::from(6u32));
        assert_eq!(ClassLabel::new(part![2, 1]).order(), BigUint::from(2u32));
        assert_eq!(ClassLabel::new(part![3]).order(), BigUint::from(3u32));
        assert_eq!(ClassLabel::new(part![2, 2]).order(), BigUint::from(8u32));
        assert_eq!(ClassLabel::new(part![2, 2]).class_size(), BigUint::from(3u32));
    }

    #[test]
    fn characters_small() {
        let c = |l: Partition, r: Partition| character(&l, &ClassLabel::new(r)).unwrap();
        assert_eq!(c(part![2, 1], part![1, 1, 1]), 2);
        assert_eq!(c(part![2, 1], part![3]), -1);
        assert_eq!(c(part![2, 1], part![2, 1]), 0);
        for rho in partitions_of(6) {
            let label = ClassLabel::new(rho.clone());
            assert_eq!(c(part![6], rho.clone()), 1);
            assert_eq!(c(Partition::column(6), rho), label.sign());
        }
        assert!(character(&part![2, 1], &ClassLabel::new(part![2])).is_err());
    }

    #[test]
    fn s3_table() {
        let t = CharacterTable::build(3, 20).unwrap();
        assert_eq!(t.row(0), &[1, 1, 1]);
        assert_eq!(t.row(1), &[-1, 0, 2]);
        assert_eq!(t.row(2), &[1, -1, 1]);
        let t1 = CharacterTable::build(1, 20).unwrap();
        assert_eq!(t1.row(0), &[1]);
        assert!(matches!(CharacterTable::build(21, 20), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn s8_orthogonality() {
        let t = CharacterTable::build(8, 20).unwrap();
        assert_eq!(t.len(), 22);
        assert!(t.row_orthogonality_holds());
        assert!(t.column_orthogonality_holds());
    }

    #[test]
    fn conjugate_twists_by_sign() {
        let t = CharacterTable::build(7, 20).unwrap();
        let classes = t.classes();
        for (i, p) in t.irreps().iter().enumerate() {
            let j = t.index_of(&p.conjugate()).unwrap();
            for (c, rho) in classes.iter().enumerate() {
                assert_eq!(t.value(i, c), t.value(j, c) * rho.sign());
            }
        }
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let t = CharacterTable::build(6, 20).unwrap();
        let text = t.to_cache_string();
        let back = CharacterTable::from_cache_str(&text, 6).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_cache_string(), text);
        assert!(CharacterTable::from_cache_str(&text, 5).is_err());
        assert!(CharacterTable::from_cache_str(&text.replace("version", "x"), 6).is_ok());
        let broken = text.replacen(" 1\n", " 2\n", 1);
        assert!(CharacterTable::from_cache_str(&broken, 6).is_err());

        let path = t.write_cache(dir.path()).unwrap();
        std::fs::write(&path, "garbage").unwrap();
        let rebuilt = CharacterTable::load_or_build(6, 20, Some(dir.path())).unwrap();
        assert_eq!(rebuilt, t);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    }
}
