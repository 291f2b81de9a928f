#![allow(dead_code)]

use std::collections::BTreeSet;

use kroncover::certificate::{
    axiom_oracle, combine_hsum, combine_vsum, conjugate_pair, permute, Certificate,
};
use kroncover::characters::partitions_of;
use kroncover::kronecker::KroneckerOracle;
use kroncover::Partition;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_partition(n: usize, rng: &mut impl Rng) -> Partition {
    partitions_of(n).choose(rng).expect("n has partitions").clone()
}

/// An oracle-checked leaf of the given arity on some `n <= n_max`.
pub fn random_leaf(
    oracle: &KroneckerOracle,
    arity: usize,
    n_max: usize,
    rng: &mut impl Rng,
) -> Certificate {
    loop {
        let n = rng.gen_range(1..=n_max);
        let entries: Vec<Partition> = (0..arity).map(|_| random_partition(n, rng)).collect();
        if oracle.is_positive(&entries).expect("within cap") {
            return axiom_oracle(entries, oracle).expect("positive leaf");
        }
    }
}

fn random_even_subset(arity: usize, rng: &mut impl Rng) -> BTreeSet<usize> {
    let mut idx: Vec<usize> = (0..arity).collect();
    idx.shuffle(rng);
    let take = 2 * rng.gen_range(0..=arity / 2);
    idx.into_iter().take(take).collect()
}

/// A random tree of sums, conjugate pairs and permutations over oracle
/// leaves, with root size at most `budget`.
pub fn random_composition(
    oracle: &KroneckerOracle,
    arity: usize,
    budget: usize,
    rng: &mut impl Rng,
) -> Certificate {
    let cert = if budget < 2 || rng.gen_bool(0.3) {
        random_leaf(oracle, arity, budget.clamp(1, 5), rng)
    } else {
        let left = rng.gen_range(1..budget);
        let a = random_composition(oracle, arity, left, rng);
        let b = random_composition(oracle, arity, budget - a.conclusion().size(), rng);
        if rng.gen_bool(0.5) {
            combine_hsum(a, b).unwrap()
        } else {
            combine_vsum(a, b, &random_even_subset(arity, rng)).unwrap()
        }
    };
    match rng.gen_range(0..4) {
        0 => {
            let mut idx: Vec<usize> = (0..arity).collect();
            idx.shuffle(rng);
            conjugate_pair(cert, idx[0], idx[1]).unwrap()
        }
        1 => {
            let mut perm: Vec<usize> = (0..arity).collect();
            perm.shuffle(rng);
            permute(cert, &perm).unwrap()
        }
        _ => cert,
    }
}

/// Copy of `cert` with the conclusion at `path` replaced.
pub fn tamper(cert: &Certificate, path: &[usize], entries: Vec<Partition>) -> Certificate {
    let Some((&head, rest)) = path.split_first() else {
        let rel = kroncover::certificate::Relation::new(entries).unwrap();
        return Certificate::from_parts(rel, cert.rule().clone(), cert.children().to_vec());
    };
    let mut children = cert.children().to_vec();
    children[head] = tamper(&children[head], rest, entries);
    Certificate::from_parts(cert.conclusion().clone(), cert.rule().clone(), children)
}

/// Every node path in pre-order.
pub fn paths(cert: &Certificate) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for (i, c) in cert.children().iter().enumerate() {
        for mut p in paths(c) {
            p.insert(0, i);
            out.push(p);
        }
    }
    out
}

pub fn node_at<'a>(cert: &'a Certificate, path: &[usize]) -> &'a Certificate {
    path.iter().fold(cert, |c, &i| &c.children()[i])
}
