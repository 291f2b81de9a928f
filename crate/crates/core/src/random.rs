//! Random partitions and the statistics measured over them.
//!
//! Plancherel samples are the row-insertion (RSK) shapes of uniformly random
//! permutations. Uniform samples use the exact divisor-sum recursion
//! `m p(m) = sum_t sigma(t) p(m - t)`, drawing one block of equal parts at a
//! time with big-integer weights.
//!
//! Every trial gets its own ChaCha20 stream, `(seed, trial index)`, so results
//! do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigUint, RandBigInt};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::config::DEFAULT_UNIFORM_CAP;
use crate::error::{Error, Result};
use crate::kronecker::{KroneckerOracle, Support};
use crate::partition::{partition_numbers, Partition};
use crate::quad::adaptive_simpson;
use crate::shape::{rescaled_shape_distance, ContinuousShape};

pub const RNG_ALGORITHM: &str = "chacha20-stream/v1";

/// `32 / (3 pi^2)`, the integral of [`v_density`] over `[-2, 2]`.
pub fn alpha_closed_form() -> f64 {
    32.0 / (3.0 * std::f64::consts::PI.powi(2))
}

/// `sqrt(6) / pi`, the normalized number of distinct parts of a uniform partition.
pub fn uniform_distrows_constant() -> f64 {
    6f64.sqrt() / std::f64::consts::PI
}

/// The generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Plancherel,
    Uniform,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Plancherel => "plancherel",
            Measure::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plancherel" => Ok(Measure::Plancherel),
            "uniform" => Ok(Measure::Uniform),
            _ => Err(Error::invalid(format!("unknown measure {s:?}"))),
        }
    }
}

pub trait PartitionSampler: Send + Sync {
    fn measure(&self) -> Measure;
    fn sample(&self, n: usize, rng: &mut ChaCha20Rng) -> Result<Partition>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct PlancherelSampler;

impl PartitionSampler for PlancherelSampler {
    fn measure(&self) -> Measure {
        Measure::Plancherel
    }

    fn sample(&self, n: usize, rng: &mut ChaCha20Rng) -> Result<Partition> {
        if n == 0 {
            return Err(Error::invalid("sampling needs n >= 1"));
        }
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(rng);
        Ok(rsk_shape(&perm))
    }
}

/// Shape of the row-insertion tableau of a sequence of distinct values.
pub fn rsk_shape(word: &[u32]) -> Partition {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for &w in word {
        let mut x = w;
        let mut placed = false;
        for row in rows.iter_mut() {
            let pos = row.partition_point(|&y| y < x);
            if pos == row.len() {
                row.push(x);
                placed = true;
                break;
            }
            std::mem::swap(&mut row[pos], &mut x);
        }
        if !placed {
            rows.push(vec![x]);
        }
    }
    Partition::new(rows.iter().map(Vec::len).collect()).expect("insertion tableau rows decrease")
}

/// Exact uniform sampler; `p(m)` and `sigma(m)` tables grow on demand.
pub struct UniformSampler {
    cap: usize,
    tables: Mutex<Arc<UniformTables>>,
}

struct UniformTables {
    p: Vec<BigUint>,
    sigma: Vec<u64>,
}

impl UniformTables {
    fn build(n: usize) -> Self {
        let mut sigma = vec![0u64; n + 1];
        for d in 1..=n {
            for m in (d..=n).step_by(d) {
                sigma[m] += d as u64;
            }
        }
        UniformTables {
            p: partition_numbers(n),
            sigma,
        }
    }
}

impl Default for UniformSampler {
    fn default() -> Self {
        Self::new(DEFAULT_UNIFORM_CAP)
    }
}

impl UniformSampler {
    pub fn new(cap: usize) -> Self {
        UniformSampler {
            cap,
            tables: Mutex::new(Arc::new(UniformTables::build(0))),
        }
    }

    fn tables(&self, n: usize) -> Arc<UniformTables> {
        let mut guard = self.tables.lock().unwrap();
        if guard.p.len() <= n {
            *guard = Arc::new(UniformTables::build(n));
        }
        guard.clone()
    }
}

impl PartitionSampler for UniformSampler {
    fn measure(&self) -> Measure {
        Measure::Uniform
    }

    fn sample(&self, n: usize, rng: &mut ChaCha20Rng) -> Result<Partition> {
        if n == 0 {
            return Err(Error::invalid("sampling needs n >= 1"));
        }
        if n > self.cap {
            return Err(Error::ResourceLimit {
                what: "uniform sample size n",
                value: n,
                cap: self.cap,
            });
        }
        let t = self.tables(n);
        let mut parts = Vec::new();
        let mut m = n;
        while m > 0 {
            let total = &t.p[m] * BigUint::from(m);
            let u = rng.gen_biguint_below(&total);
            let mut acc = BigUint::default();
            let mut block = m;
            for s in 1..=m {
                acc += &t.p[m - s] * BigUint::from(t.sigma[s]);
                if acc > u {
                    block = s;
                    break;
                }
            }
            let mut v = rng.gen_range(0..t.sigma[block]);
            let d = (1..=block)
                .filter(|d| block.is_multiple_of(*d))
                .find(|&d| {
                    if v < d as u64 {
                        true
                    } else {
                        v -= d as u64;
                        false
                    }
                })
                .expect("divisor weights sum to sigma");
            parts.extend(std::iter::repeat_n(d, block / d));
            m -= block;
        }
        Ok(Partition::from_unsorted(parts))
    }
}

/// Samplers by measure name.
pub struct SamplerRegistry {
    samplers: BTreeMap<Measure, Box<dyn PartitionSampler>>,
}

impl Default for SamplerRegistry {
    fn default() -> Self {
        let mut r = SamplerRegistry {
            samplers: BTreeMap::new(),
        };
        r.register(Box::new(PlancherelSampler));
        r.register(Box::new(UniformSampler::default()));
        r
    }
}

impl SamplerRegistry {
    pub fn register(&mut self, s: Box<dyn PartitionSampler>) {
        self.samplers.insert(s.measure(), s);
    }

    pub fn get(&self, m: Measure) -> Result<&dyn PartitionSampler> {
        self.samplers
            .get(&m)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::invalid(format!("no sampler registered for {m}")))
    }
}

pub fn plancherel_sample(n: usize, seed: u64) -> Result<Partition> {
    PlancherelSampler.sample(n, &mut trial_rng(seed, 0))
}

pub fn uniform_sample(n: usize, seed: u64) -> Result<Partition> {
    UniformSampler::default().sample(n, &mut trial_rng(seed, 0))
}

/// `V(a) = p - p^2 + s^2` with `p = arccos(a/2)/pi`, `s = sin(arccos(a/2))/pi`.
pub fn v_density(a: f64) -> Result<f64> {
    if !(-2.0..=2.0).contains(&a) {
        return Err(Error::invalid(format!("V is defined on [-2, 2], got {a}")));
    }
    Ok(v_unchecked(a))
}

fn v_unchecked(a: f64) -> f64 {
    let theta = (a / 2.0).clamp(-1.0, 1.0).acos();
    let p = theta / std::f64::consts::PI;
    let s = theta.sin() / std::f64::consts::PI;
    p - p * p + s * s
}

/// `int_{-2}^{2} V(a) da` by adaptive quadrature.
pub fn alpha_constant(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    Ok(adaptive_simpson(&v_unchecked, -2.0, 2.0, tolerance))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub measure: Measure,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub dist_rows: Vec<usize>,
    pub shape_distances: Option<Vec<f64>>,
}

impl SampleStats {
    pub fn mean(&self) -> f64 {
        self.dist_rows.iter().sum::<usize>() as f64 / self.dist_rows.len() as f64
    }

    /// Unbiased sample variance; zero for a single trial.
    pub fn variance(&self) -> f64 {
        let k = self.dist_rows.len();
        if k < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.dist_rows
            .iter()
            .map(|&x| (x as f64 - m).powi(2))
            .sum::<f64>()
            / (k - 1) as f64
    }

    /// `mean / sqrt(n)`.
    pub fn normalized_mean(&self) -> f64 {
        self.mean() / (self.n as f64).sqrt()
    }

    pub fn median_shape_distance(&self) -> Option<f64> {
        let mut d = self.shape_distances.clone()?;
        d.sort_by(f64::total_cmp);
        let k = d.len();
        if k == 0 {
            return None;
        }
        Some(if k % 2 == 1 {
            d[k / 2]
        } else {
            0.5 * (d[k / 2 - 1] + d[k / 2])
        })
    }
}

/// Samples `trials` partitions and records their DistRows, and optionally
/// their rescaled distance to `shape`.
pub fn distrows_experiment(
    sampler: &dyn PartitionSampler,
    n: usize,
    trials: usize,
    seed: u64,
    shape: Option<&ContinuousShape>,
) -> Result<SampleStats> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is needed"));
    }
    let rows: Vec<(usize, Option<f64>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let p = sampler.sample(n, &mut trial_rng(seed, i as u64))?;
            let d = shape.map(|s| rescaled_shape_distance(&p, s)).transpose()?;
            Ok((p.dist_rows(), d))
        })
        .collect::<Result<_>>()?;
    let shape_distances = shape.map(|_| rows.iter().map(|r| r.1.unwrap_or(0.0)).collect());
    Ok(SampleStats {
        measure: sampler.measure(),
        n,
        trials,
        seed,
        rng: RNG_ALGORITHM,
        dist_rows: rows.into_iter().map(|r| r.0).collect(),
        shape_distances,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `k` independent samples.
    Independent,
    /// One sample used `k` times.
    Identical,
}

impl std::str::FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(Coupling::Independent),
            "identical" => Ok(Coupling::Identical),
            _ => Err(Error::invalid(format!("unknown coupling {s:?}"))),
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coupling::Independent => "independent",
            Coupling::Identical => "identical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverExperiment {
    pub measure: Measure,
    pub coupling: Coupling,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub covered: Vec<bool>,
}

impl CoverExperiment {
    pub fn frequency(&self) -> f64 {
        self.covered.iter().filter(|&&c| c).count() as f64 / self.trials as f64
    }
}

/// Per trial, draws `k` partitions under `coupling` and records whether the
/// support of their tensor product covers every irreducible.
#[allow(clippy::too_many_arguments)]
pub fn coupled_cover_experiment(
    sampler: &dyn PartitionSampler,
    oracle: &KroneckerOracle,
    k: usize,
    n: usize,
    trials: usize,
    coupling: Coupling,
    seed: u64,
) -> Result<CoverExperiment> {
    if k == 0 || trials == 0 {
        return Err(Error::invalid("k and trials must be positive"));
    }
    let covered = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let factors: Vec<Support> = match coupling {
                Coupling::Identical => vec![Support::singleton(sampler.sample(n, &mut rng)?); k],
                Coupling::Independent => (0..k)
                    .map(|_| sampler.sample(n, &mut rng).map(Support::singleton))
                    .collect::<Result<_>>()?,
            };
            oracle.covers(&oracle.product_support(&factors)?)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(CoverExperiment {
        measure: sampler.measure(),
        coupling,
        k,
        n,
        trials,
        seed,
        rng: RNG_ALGORITHM,
        covered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::part;

    #[test]
    fn rsk_known_shapes() {
        assert_eq!(rsk_shape(&[0, 1, 2, 3]), part![4]);
        assert_eq!(rsk_shape(&[3, 2, 1, 0]), part![1, 1, 1, 1]);
        // 2 4 1 3: rows {1,3} / {2,4}
        assert_eq!(rsk_shape(&[1, 3, 0, 2]), part![2, 2]);
    }

    #[test]
    fn samples_are_deterministic() {
        let a = plancherel_sample(50, 7).unwrap();
        assert_eq!(a, plancherel_sample(50, 7).unwrap());
        assert_eq!(a.size(), 50);
        let u = uniform_sample(50, 7).unwrap();
        assert_eq!(u, uniform_sample(50, 7).unwrap());
        assert_eq!(u.size(), 50);
        assert_eq!(plancherel_sample(1, 3).unwrap(), part![1]);
        assert_eq!(uniform_sample(1, 3).unwrap(), part![1]);
        assert!(matches!(
            UniformSampler::new(10).sample(11, &mut trial_rng(0, 0)),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn density_values() {
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((v_density(0.0).unwrap() - (0.25 + 1.0 / pi2)).abs() < 1e-15);
        assert!(v_density(2.0).unwrap().abs() < 1e-15);
        assert!(v_density(-2.0).unwrap().abs() < 1e-15);
        assert!(v_density(2.5).is_err());
        for a in [0.3, 1.1, 1.9] {
            assert!((v_density(a).unwrap() - v_density(-a).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_matches_closed_form() {
        let a = alpha_constant(1e-9).unwrap();
        assert!((a - alpha_closed_form()).abs() < 1e-6, "{a}");
        let b = alpha_constant(5e-10).unwrap();
        assert!((a - b).abs() < 1e-9);
        let left = adaptive_simpson(&v_unchecked, -2.0, 0.0, 1e-10);
        let right = adaptive_simpson(&v_unchecked, 0.0, 2.0, 1e-10);
        assert!((left - right).abs() < 1e-8);
    }

    #[test]
    fn experiment_bookkeeping() {
        let s = distrows_experiment(&PlancherelSampler, 1, 5, 1, None).unwrap();
        assert_eq!(s.dist_rows, vec![1; 5]);
        assert_eq!(s.variance(), 0.0);
        let e = coupled_cover_experiment(
            &PlancherelSampler,
            &KroneckerOracle::default(),
            1,
            5,
            10,
            Coupling::Independent,
            3,
        )
        .unwrap();
        assert_eq!(e.frequency(), 0.0);
    }
}
