//! Brute-force Kronecker coefficients and tensor-product supports.
//!
//! Everything here is computed from exact character tables:
//! `n! * g(l_1, .., l_k) = sum_rho (n!/z_rho) prod_i chi^{l_i}(rho)`.
//! Products of representations are tracked at the level of supports only,
//! since positivity distributes over direct sums.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::characters::{partitions_capped, CharacterTable};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::partition::{factorial, Partition};

/// A set of irreducibles of `S_n`, without multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Support {
    n: usize,
    members: BTreeSet<Partition>,
}

impl Support {
    pub fn new(n: usize, members: impl IntoIterator<Item = Partition>) -> Result<Self> {
        let members: BTreeSet<Partition> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|p| p.size() != n) {
            return Err(Error::invalid(format!("{bad} is not a partition of {n}")));
        }
        Ok(Support { n, members })
    }

    pub fn singleton(p: Partition) -> Self {
        Support {
            n: p.size(),
            members: BTreeSet::from([p]),
        }
    }

    /// The standard permutation representation `(n) + (n-1,1)`.
    pub fn tau(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("tau needs n >= 2"));
        }
        Support::new(n, [Partition::row(n), Partition::new(vec![n - 1, 1])?])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &BTreeSet<Partition> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.members.contains(p)
    }

    /// Members in reverse-lexicographic order, matching table indices.
    pub fn sorted(&self) -> Vec<Partition> {
        self.members.iter().rev().cloned().collect()
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.sorted().iter().map(Partition::to_string).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Outcome of [`KroneckerOracle::min_cover_power`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverPower {
    /// Least `t` with `l^{(x)t}` covering.
    Covers(usize),
    /// No power up to `t_max` covers and no repetition was detected.
    Exceeds(usize),
    /// The support sequence became periodic without ever covering; `support`
    /// is the last support computed, `period` the cycle length.
    Never {
        first_repeat: usize,
        period: usize,
        support: Support,
    },
}

impl fmt::Display for CoverPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverPower::Covers(t) => write!(f, "{t}"),
            CoverPower::Exceeds(t) => write!(f, "exceeds {t}"),
            CoverPower::Never { support, .. } => write!(f, "never (stabilized at {support})"),
        }
    }
}

struct Tables {
    table: Arc<CharacterTable>,
    /// `n!/z_rho` per class.
    class_sizes: Vec<BigUint>,
    class_sizes_i128: Option<Vec<i128>>,
    factorial: BigUint,
}

type PairKey = (usize, usize, usize);

/// Caching front end for all coefficient and support queries.
pub struct KroneckerOracle {
    caps: Caps,
    cache_dir: Option<PathBuf>,
    tables: Mutex<HashMap<usize, Arc<Tables>>>,
    pairs: Mutex<HashMap<PairKey, Arc<FixedBitSet>>>,
}

impl Default for KroneckerOracle {
    fn default() -> Self {
        Self::new(Caps::default())
    }
}

impl KroneckerOracle {
    pub fn new(caps: Caps) -> Self {
        KroneckerOracle {
            caps,
            cache_dir: None,
            tables: Mutex::new(HashMap::new()),
            pairs: Mutex::new(HashMap::new()),
        }
    }

    /// Uses `dir` as the on-disk character-table cache.
    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    fn tables(&self, n: usize) -> Result<Arc<Tables>> {
        if let Some(t) = self.tables.lock().unwrap().get(&n) {
            return Ok(t.clone());
        }
        let table = CharacterTable::load_or_build(n, self.caps.oracle, self.cache_dir.as_deref())?;
        let class_sizes = table.class_sizes();
        let class_sizes_i128 = class_sizes.iter().map(|c| c.to_i128()).collect();
        let t = Arc::new(Tables {
            table: Arc::new(table),
            class_sizes,
            class_sizes_i128,
            factorial: factorial(n),
        });
        self.tables.lock().unwrap().insert(n, t.clone());
        Ok(t)
    }

    /// The character table of `S_n`, built or loaded once per oracle.
    pub fn table(&self, n: usize) -> Result<Arc<CharacterTable>> {
        Ok(self.tables(n)?.table.clone())
    }

    fn common_size(ls: &[Partition]) -> Result<usize> {
        let n = ls.first().map(Partition::size).unwrap_or(0);
        if let Some(bad) = ls.iter().find(|p| p.size() != n) {
            return Err(Error::invalid(format!(
                "partitions must have equal sizes: {} vs {bad}",
                ls[0]
            )));
        }
        Ok(n)
    }

    fn check_product_cap(&self, n: usize) -> Result<()> {
        if n > self.caps.product {
            return Err(Error::ResourceLimit {
                what: "support product size n",
                value: n,
                cap: self.caps.product,
            });
        }
        Ok(())
    }

    fn indices(&self, t: &Tables, ls: &[Partition]) -> Vec<usize> {
        ls.iter()
            .map(|p| t.table.index_of(p).expect("partition of n is in the table"))
            .collect()
    }

    /// `n! * g` for the irreducibles with the given table indices.
    fn scaled_sum(t: &Tables, idx: &[usize]) -> BigInt {
        let classes = t.table.len();
        if let Some(sizes) = &t.class_sizes_i128 {
            let fast = (0..classes).try_fold(0i128, |acc, c| {
                let mut term = sizes[c];
                for &i in idx {
                    term = term.checked_mul(t.table.value(i, c) as i128)?;
                }
                acc.checked_add(term)
            });
            if let Some(s) = fast {
                return BigInt::from(s);
            }
        }
        (0..classes)
            .map(|c| {
                let mut term = BigInt::from(t.class_sizes[c].clone());
                for &i in idx {
                    term *= t.table.value(i, c);
                }
                term
            })
            .sum()
    }

    fn coefficient(t: &Tables, idx: &[usize]) -> Result<BigUint> {
        let s = Self::scaled_sum(t, idx);
        let (q, r) = s.div_rem(&BigInt::from(t.factorial.clone()));
        if !r.is_zero() || q.sign() == Sign::Minus {
            return Err(Error::Inconsistency(format!(
                "character sum {s} is not a nonnegative multiple of n!"
            )));
        }
        Ok(q.magnitude().clone())
    }

    /// `g(l, m, v)`.
    pub fn kronecker(&self, l: &Partition, m: &Partition, v: &Partition) -> Result<BigUint> {
        self.extended_kronecker(&[l.clone(), m.clone(), v.clone()])
    }

    /// Multiplicity of the trivial representation in `l_1 (x) .. (x) l_k`.
    pub fn extended_kronecker(&self, ls: &[Partition]) -> Result<BigUint> {
        if ls.len() < 2 {
            return Err(Error::invalid("extended Kronecker coefficients need at least two entries"));
        }
        let n = Self::common_size(ls)?;
        if n == 0 {
            return Ok(BigUint::from(1u32));
        }
        let t = self.tables(n)?;
        let idx = self.indices(&t, ls);
        Self::coefficient(&t, &idx)
    }

    pub fn is_positive(&self, ls: &[Partition]) -> Result<bool> {
        Ok(!self.extended_kronecker(ls)?.is_zero())
    }

    fn pair_bits(&self, n: usize, t: &Tables, a: usize, b: usize) -> Arc<FixedBitSet> {
        let key = (n, a.min(b), a.max(b));
        if let Some(s) = self.pairs.lock().unwrap().get(&key) {
            return s.clone();
        }
        let p = t.table.len();
        let mut bits = FixedBitSet::with_capacity(p);
        for v in 0..p {
            if Self::scaled_sum(t, &[a, b, v]).sign() == Sign::Plus {
                bits.insert(v);
            }
        }
        let bits = Arc::new(bits);
        self.pairs.lock().unwrap().insert(key, bits.clone());
        bits
    }

    fn to_bits(&self, t: &Tables, s: &Support) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(t.table.len());
        for p in &s.members {
            bits.insert(t.table.index_of(p).expect("member of support is a partition of n"));
        }
        bits
    }

    fn from_bits(&self, n: usize, t: &Tables, bits: &FixedBitSet) -> Support {
        Support {
            n,
            members: bits.ones().map(|i| t.table.partition(i).clone()).collect(),
        }
    }

    fn product_bits(&self, n: usize, t: &Tables, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
        let pairs: Vec<(usize, usize)> = a
            .ones()
            .flat_map(|i| b.ones().map(move |j| (i, j)))
            .collect();
        let p = t.table.len();
        pairs
            .par_iter()
            .fold(
                || FixedBitSet::with_capacity(p),
                |mut acc, &(i, j)| {
                    acc.union_with(&self.pair_bits(n, t, i, j));
                    acc
                },
            )
            .reduce(
                || FixedBitSet::with_capacity(p),
                |mut x, y| {
                    x.union_with(&y);
                    x
                },
            )
    }

    /// `{ v : g(l, m, v) > 0 }`.
    pub fn tensor_support(&self, l: &Partition, m: &Partition) -> Result<Support> {
        let n = Self::common_size(&[l.clone(), m.clone()])?;
        if n == 0 {
            return Ok(Support::singleton(Partition::empty()));
        }
        let t = self.tables(n)?;
        let idx = self.indices(&t, &[l.clone(), m.clone()]);
        let bits = self.pair_bits(n, &t, idx[0], idx[1]);
        Ok(self.from_bits(n, &t, &bits))
    }

    /// Support of the tensor product of the factors, folded left.
    pub fn product_support(&self, factors: &[Support]) -> Result<Support> {
        let Some(first) = factors.first() else {
            return Err(Error::invalid("product of no factors"));
        };
        let n = first.n;
        if let Some(bad) = factors.iter().find(|s| s.n != n) {
            return Err(Error::invalid(format!(
                "supports of different sizes {n} and {}",
                bad.n
            )));
        }
        if n == 0 || factors.len() == 1 {
            return Ok(first.clone());
        }
        self.check_product_cap(n)?;
        let t = self.tables(n)?;
        let mut acc = self.to_bits(&t, first);
        for f in &factors[1..] {
            acc = self.product_bits(n, &t, &acc, &self.to_bits(&t, f));
        }
        Ok(self.from_bits(n, &t, &acc))
    }

    /// Support of `l^{(x)t}`.
    pub fn power_support(&self, l: &Partition, t: usize) -> Result<Support> {
        if t == 0 {
            return Err(Error::invalid("tensor power must be at least 1"));
        }
        self.product_support(&vec![Support::singleton(l.clone()); t])
    }

    /// Whether `s` contains every irreducible of `S_n`.
    pub fn covers(&self, s: &Support) -> Result<bool> {
        let all = partitions_capped(s.n, self.caps.enumeration)?;
        Ok(all.len() == s.members.len() && all.iter().all(|p| s.members.contains(p)))
    }

    pub fn saxl_check(&self, l: &Partition) -> Result<bool> {
        let s = self.tensor_support(l, l)?;
        self.covers(&s)
    }

    /// Least `t <= t_max` with `l^{(x)t}` covering. A repeated support means
    /// the sequence is periodic from then on, so covering never happens.
    pub fn min_cover_power(&self, l: &Partition, t_max: usize) -> Result<CoverPower> {
        if t_max == 0 {
            return Err(Error::invalid("t_max must be at least 1"));
        }
        let n = l.size();
        if n == 0 {
            return Ok(CoverPower::Covers(1));
        }
        self.check_product_cap(n)?;
        let t = self.tables(n)?;
        let p = t.table.len();
        let base = self.to_bits(&t, &Support::singleton(l.clone()));
        let mut seen: HashMap<FixedBitSet, usize> = HashMap::new();
        let mut cur = base.clone();
        for power in 1..=t_max {
            if cur.count_ones(..) == p {
                return Ok(CoverPower::Covers(power));
            }
            if let Some(&prev) = seen.get(&cur) {
                return Ok(CoverPower::Never {
                    first_repeat: power,
                    period: power - prev,
                    support: self.from_bits(n, &t, &cur),
                });
            }
            seen.insert(cur.clone(), power);
            if power < t_max {
                cur = self.product_bits(n, &t, &cur, &base);
            }
        }
        Ok(CoverPower::Exceeds(t_max))
    }

    /// Every constituent of `l (x) m` has at most `ht(l) * ht(m)` rows.
    pub fn height_bound_check(&self, l: &Partition, m: &Partition) -> Result<bool> {
        let bound = l.height() * m.height();
        Ok(self
            .tensor_support(l, m)?
            .members
            .iter()
            .all(|v| v.height() <= bound))
    }
}

/// Worst normalized covering exponent at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub n: usize,
    /// `max t_min(l) * ln dim(l) / (n ln n)` over `l` with `dim(l) > 1`.
    pub ratio: f64,
    pub argmax: Partition,
    pub t_min: usize,
    /// Partitions whose powers never covered within `t_max`.
    pub uncovered: Vec<Partition>,
}

/// Scans every `l |- n` with `dim(l) > 1` and reports the largest
/// `t_min(l) * ln dim(l) / (n ln n)`.
pub fn constant_audit(oracle: &KroneckerOracle, n: usize, t_max: usize) -> Result<AuditRow> {
    if n < 2 {
        return Err(Error::invalid("constant audit needs n >= 2"));
    }
    let all = partitions_capped(n, oracle.caps().enumeration)?;
    let scale = n as f64 * (n as f64).ln();
    let powers = all
        .par_iter()
        .filter(|l| l.dimension() > BigUint::from(1u32))
        .map(|l| Ok((l.clone(), oracle.min_cover_power(l, t_max)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, Partition, usize)> = None;
    let mut uncovered = Vec::new();
    for (l, cp) in powers {
        let CoverPower::Covers(t) = cp else {
            uncovered.push(l);
            continue;
        };
        let r = t as f64 * crate::partition::ln_big(&l.dimension()) / scale;
        if best.as_ref().is_none_or(|b| r > b.0) {
            best = Some((r, l, t));
        }
    }
    let (ratio, argmax, t_min) =
        best.ok_or_else(|| Error::precondition(format!("no partition of {n} covers within {t_max}")))?;
    Ok(AuditRow {
        n,
        ratio,
        argmax,
        t_min,
        uncovered,
    })
}

/// Largest `ratio(n') / ratio(n)` over `n < n'` in `rows` (1 when flat or shrinking).
pub fn audit_growth(rows: &[AuditRow]) -> f64 {
    let mut g: f64 = 1.0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            g = g.max(b.ratio / a.ratio);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::partitions_of;
    use crate::part;

    fn oracle() -> KroneckerOracle {
        KroneckerOracle::default()
    }

    #[test]
    fn s3_coefficients() {
        let o = oracle();
        let s = part![2, 1];
        assert_eq!(o.kronecker(&s, &s, &s).unwrap(), BigUint::from(1u32));
        // (2,1)^2 = (3) + (2,1) + (1,1,1), so the fourfold coefficient is 1 + 1 + 1
        assert_eq!(
            o.extended_kronecker(&[s.clone(), s.clone(), s.clone(), s.clone()]).unwrap(),
            BigUint::from(3u32)
        );
        assert_eq!(o.kronecker(&part![3], &part![3], &part![3]).unwrap(), BigUint::from(1u32));
        assert!(o.kronecker(&s, &s, &part![2]).is_err());
        let big = Partition::row(21);
        assert!(matches!(
            o.kronecker(&big, &big, &big),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn trivial_and_sign_rules() {
        let o = oracle();
        let ps = partitions_of(6);
        for l in &ps {
            for m in &ps {
                let g1 = o.kronecker(&Partition::row(6), l, m).unwrap();
                assert_eq!(g1.is_zero(), l != m);
                let g2 = o.kronecker(&Partition::column(6), l, m).unwrap();
                assert_eq!(g2.is_zero(), *l != m.conjugate());
            }
        }
    }

    #[test]
    fn supports() {
        let o = oracle();
        let s = o.tensor_support(&part![2, 1], &part![2, 1]).unwrap();
        assert_eq!(s, Support::new(3, [part![3], part![2, 1], part![1, 1, 1]]).unwrap());
        let s = o.tensor_support(&part![2, 2], &part![2, 2]).unwrap();
        assert_eq!(s, Support::new(4, [part![4], part![2, 2], part![1, 1, 1, 1]]).unwrap());
        assert_eq!(s.to_string(), "{[4], [2,2], [1,1,1,1]}");
        let cube = o.power_support(&part![2, 2], 3).unwrap();
        assert_eq!(cube, s);
    }

    #[test]
    fn tau_powers() {
        let o = oracle();
        for n in 3..=8 {
            let tau = Support::tau(n).unwrap();
            let low = o.product_support(&vec![tau.clone(); n - 2]).unwrap();
            assert!(!o.covers(&low).unwrap(), "n={n}");
            let high = o.product_support(&vec![tau; n]).unwrap();
            assert!(o.covers(&high).unwrap(), "n={n}");
        }
    }

    #[test]
    fn min_powers() {
        let o = oracle();
        match o.min_cover_power(&part![2, 2], 10).unwrap() {
            CoverPower::Never { support, .. } => {
                assert_eq!(support, Support::new(4, [part![4], part![2, 2], part![1, 1, 1, 1]]).unwrap())
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(o.min_cover_power(&part![3, 2, 1], 10).unwrap(), CoverPower::Covers(2));
        assert!(matches!(
            o.min_cover_power(&part![3], 10).unwrap(),
            CoverPower::Never { .. }
        ));
        assert!(matches!(
            o.min_cover_power(&part![1, 1, 1], 10).unwrap(),
            CoverPower::Never { period: 2, .. }
        ));
        assert_eq!(o.min_cover_power(&part![3, 2, 1], 1).unwrap(), CoverPower::Exceeds(1));
    }

    #[test]
    fn saxl_small() {
        let o = oracle();
        assert!(o.saxl_check(&part![3, 2, 1]).unwrap());
        assert!(!o.saxl_check(&part![5]).unwrap());
        for l in partitions_of(4) {
            assert!(!o.saxl_check(&l).unwrap(), "{l}");
        }
    }

    #[test]
    fn height_bound_equality() {
        let o = oracle();
        let r = Partition::rect(6, 2);
        assert!(o.height_bound_check(&r, &r).unwrap());
        assert!(o.tensor_support(&r, &r).unwrap().contains(&Partition::rect(3, 4)));
    }
}
