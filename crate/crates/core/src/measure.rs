//! Plancherel measure of supports and the covering facts built on it.
//!
//! `M(V) = sum_{l in V} dim(l)^2 / n!`, kept as an exact rational. If
//! `M(V) + M(W) > 1` then `V (x) W` covers every irreducible, and tensoring
//! with an irreducible never decreases `M`. Uniform measure on irreducibles
//! has neither property, which [`affine_counterexample_demo`] shows with the
//! affine group of `F_p`.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;

use crate::characters::partitions_capped;
use crate::error::{Error, Result};
use crate::kronecker::{KroneckerOracle, Support};
use crate::partition::{factorial, Partition};
use crate::random::trial_rng;

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn plancherel_measure(s: &Support) -> BigRational {
    let total: BigUint = s.members().iter().map(|p| p.dimension().pow(2)).sum();
    ratio(total, factorial(s.n()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasuredSupport {
    pub support: Support,
    pub measure: BigRational,
}

impl MeasuredSupport {
    pub fn new(support: Support) -> Self {
        let measure = plancherel_measure(&support);
        MeasuredSupport { support, measure }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PigeonholeOutcome {
    /// `M(V) + M(W) <= 1`; nothing to check.
    NotApplicable,
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PigeonholeReport {
    pub total: BigRational,
    pub outcome: PigeonholeOutcome,
}

pub fn pigeonhole_check(
    oracle: &KroneckerOracle,
    v: &Support,
    w: &Support,
) -> Result<PigeonholeReport> {
    let total = plancherel_measure(v) + plancherel_measure(w);
    let outcome = if total <= BigRational::one() {
        PigeonholeOutcome::NotApplicable
    } else if oracle.covers(&oracle.product_support(&[v.clone(), w.clone()])?)? {
        PigeonholeOutcome::Pass
    } else {
        PigeonholeOutcome::Fail
    };
    Ok(PigeonholeReport { total, outcome })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub before: BigRational,
    pub after: BigRational,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.after >= self.before
    }
}

/// Compares `M(V (x) l)` with `M(V)`.
pub fn monotonicity_check(
    oracle: &KroneckerOracle,
    v: &Support,
    l: &Partition,
) -> Result<MonotonicityReport> {
    let after = oracle.product_support(&[v.clone(), Support::singleton(l.clone())])?;
    Ok(MonotonicityReport {
        before: plancherel_measure(v),
        after: plancherel_measure(&after),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub n: usize,
    pub checked: usize,
    pub applicable: usize,
    pub failures: Vec<(Support, Support)>,
}

/// Random pairs of supports of `S_n` with `M(V) + M(W) > 1`: each member is
/// kept with a per-support probability drawn uniformly from `[0.3, 1]`.
/// Stops after `pairs` applicable pairs or `50 * pairs` draws.
pub fn pigeonhole_sweep(
    oracle: &KroneckerOracle,
    n: usize,
    pairs: usize,
    seed: u64,
) -> Result<SweepReport> {
    let all = partitions_capped(n, oracle.caps().enumeration)?;
    let draws = 50 * pairs.max(1);
    let results: Vec<Option<(Support, Support, bool)>> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let mut pick = || {
                let q: f64 = rng.gen_range(0.3..=1.0);
                let members: Vec<Partition> =
                    all.iter().filter(|_| rng.gen_bool(q)).cloned().collect();
                Support::new(n, members)
            };
            let (v, w) = (pick()?, pick()?);
            if v.is_empty() || w.is_empty() {
                return Ok(None);
            }
            let rep = pigeonhole_check(oracle, &v, &w)?;
            Ok(match rep.outcome {
                PigeonholeOutcome::NotApplicable => None,
                PigeonholeOutcome::Pass => Some((v, w, true)),
                PigeonholeOutcome::Fail => Some((v, w, false)),
            })
        })
        .collect::<Result<_>>()?;
    let mut report = SweepReport {
        n,
        checked: 0,
        applicable: 0,
        failures: Vec::new(),
    };
    for r in results {
        report.checked += 1;
        if let Some((v, w, ok)) = r {
            report.applicable += 1;
            if !ok {
                report.failures.push((v, w));
            }
            if report.applicable == pairs {
                break;
            }
        }
    }
    Ok(report)
}

/// `M({v} (x) l) >= M({v})` for every pair `v, l |- n`; returns violations.
pub fn monotonicity_sweep(oracle: &KroneckerOracle, n: usize) -> Result<Vec<(Partition, Partition)>> {
    let all = partitions_capped(n, oracle.caps().enumeration)?;
    let mut bad = Vec::new();
    for v in &all {
        for l in &all {
            if !monotonicity_check(oracle, &Support::singleton(v.clone()), l)?.holds() {
                bad.push((v.clone(), l.clone()));
            }
        }
    }
    Ok(bad)
}

/// `(r, M(rho_r (x) rho_r))` for `r = 2..=r_max`.
pub fn saxl_measure_trend(oracle: &KroneckerOracle, r_max: usize) -> Result<Vec<(usize, BigRational)>> {
    (2..=r_max)
        .map(|r| {
            let rho = Partition::staircase(r);
            let s = oracle.tensor_support(&rho, &rho)?;
            Ok((r, plancherel_measure(&s)))
        })
        .collect()
}

/// Irreducibles of the affine group `x -> ax + b` of `F_p`: `p - 1` linear
/// characters (indexed by `Z/(p-1)`) and one of dimension `p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AffineIrrep {
    Linear(usize),
    Large,
}

impl fmt::Display for AffineIrrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineIrrep::Linear(a) => write!(f, "chi{a}"),
            AffineIrrep::Large => f.write_str("rho"),
        }
    }
}

/// Dimension data and tensor rules of the affine group of `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineGroup {
    p: usize,
}

impl AffineGroup {
    pub fn new(p: usize) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not a prime >= 3")));
        }
        Ok(AffineGroup { p })
    }

    pub fn order(&self) -> usize {
        self.p * (self.p - 1)
    }

    pub fn irreps(&self) -> Vec<AffineIrrep> {
        let mut v: Vec<AffineIrrep> = (0..self.p - 1).map(AffineIrrep::Linear).collect();
        v.push(AffineIrrep::Large);
        v
    }

    pub fn dim(&self, x: AffineIrrep) -> usize {
        match x {
            AffineIrrep::Linear(_) => 1,
            AffineIrrep::Large => self.p - 1,
        }
    }

    /// Constituents of `x (x) y`, without multiplicities.
    pub fn tensor(&self, x: AffineIrrep, y: AffineIrrep) -> Vec<AffineIrrep> {
        use AffineIrrep::*;
        match (x, y) {
            (Linear(a), Linear(b)) => vec![Linear((a + b) % (self.p - 1))],
            (Linear(_), Large) | (Large, Linear(_)) => vec![Large],
            // rho (x) rho = sum of all linear characters + (p - 2) rho
            (Large, Large) => {
                let mut v: Vec<AffineIrrep> = (0..self.p - 1).map(Linear).collect();
                v.push(Large);
                v
            }
        }
    }

    pub fn uniform_measure(&self, s: &[AffineIrrep]) -> BigRational {
        ratio(BigUint::from(s.len()), BigUint::from(self.p))
    }

    pub fn plancherel_measure(&self, s: &[AffineIrrep]) -> BigRational {
        let total: usize = s.iter().map(|&x| self.dim(x).pow(2)).sum();
        ratio(BigUint::from(total), BigUint::from(self.order()))
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineReport {
    pub p: usize,
    pub v: Vec<AffineIrrep>,
    pub w: Vec<AffineIrrep>,
    pub product: Vec<AffineIrrep>,
    pub uniform_total: BigRational,
    pub plancherel_total: BigRational,
    pub covers: bool,
}

impl AffineReport {
    /// Uniform measures exceed 1 yet the product does not cover, while the
    /// Plancherel hypothesis fails as it must.
    pub fn exhibits_failure(&self) -> bool {
        self.uniform_total > BigRational::one()
            && !self.covers
            && self.plancherel_total <= BigRational::one()
    }
}

/// `V = W =` the linear characters of the affine group of `F_p`.
pub fn affine_counterexample_demo(p: usize) -> Result<AffineReport> {
    let g = AffineGroup::new(p)?;
    let linear: Vec<AffineIrrep> = g
        .irreps()
        .into_iter()
        .filter(|&x| g.dim(x) == 1)
        .collect();
    let mut product: Vec<AffineIrrep> = linear
        .iter()
        .flat_map(|&a| linear.iter().flat_map(move |&b| g.tensor(a, b)))
        .collect();
    product.sort();
    product.dedup();
    let covers = product.len() == g.irreps().len();
    let uniform_total = g.uniform_measure(&linear) * BigRational::from_integer(2.into());
    let plancherel_total = g.plancherel_measure(&linear) * BigRational::from_integer(2.into());
    Ok(AffineReport {
        p,
        v: linear.clone(),
        w: linear,
        product,
        uniform_total,
        plancherel_total,
        covers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::partitions_of;
    use crate::part;

    fn r(a: u32, b: u32) -> BigRational {
        ratio(BigUint::from(a), BigUint::from(b))
    }

    #[test]
    fn measures() {
        let all = Support::new(6, partitions_of(6)).unwrap();
        assert_eq!(plancherel_measure(&all), BigRational::one());
        assert_eq!(plancherel_measure(&Support::singleton(Partition::row(5))), r(1, 120));
        let o = KroneckerOracle::default();
        let rho = Partition::staircase(3);
        assert_eq!(plancherel_measure(&o.tensor_support(&rho, &rho).unwrap()), BigRational::one());
    }

    #[test]
    fn pigeonhole_cases() {
        let o = KroneckerOracle::default();
        let all = Support::new(5, partitions_of(5)).unwrap();
        assert_eq!(pigeonhole_check(&o, &all, &all).unwrap().outcome, PigeonholeOutcome::Pass);
        let triv = Support::singleton(Partition::row(5));
        assert_eq!(
            pigeonhole_check(&o, &triv, &triv).unwrap().outcome,
            PigeonholeOutcome::NotApplicable
        );
        let rep = pigeonhole_sweep(&o, 5, 50, 11).unwrap();
        assert_eq!(rep.applicable, 50);
        assert!(rep.failures.is_empty());
    }

    #[test]
    fn monotonicity_cases() {
        let o = KroneckerOracle::default();
        let v = Support::singleton(part![4, 1]);
        let eq = monotonicity_check(&o, &v, &part![5]).unwrap();
        assert_eq!(eq.before, eq.after);
        let up = monotonicity_check(&o, &v, &part![4, 1]).unwrap();
        assert!(up.after > up.before);
        assert!(monotonicity_sweep(&o, 5).unwrap().is_empty());
    }

    #[test]
    fn saxl_trend() {
        let o = KroneckerOracle::default();
        let t = saxl_measure_trend(&o, 3).unwrap();
        assert_eq!(t, vec![(2, BigRational::one()), (3, BigRational::one())]);
    }

    #[test]
    fn affine_group() {
        for p in [3, 5, 7] {
            let rep = affine_counterexample_demo(p).unwrap();
            assert!(rep.exhibits_failure());
            assert_eq!(rep.product.len(), p - 1);
            assert_eq!(rep.uniform_total, r(2 * (p as u32 - 1), p as u32));
            assert_eq!(rep.plancherel_total, r(2, p as u32));
            let g = AffineGroup::new(p).unwrap();
            let dims: usize = g.irreps().iter().map(|&x| g.dim(x).pow(2)).sum();
            assert_eq!(dims, g.order());
        }
        assert!(affine_counterexample_demo(9).is_err());
        assert!(affine_counterexample_demo(2).is_err());
    }
}
