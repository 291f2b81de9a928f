mod common;

use std::collections::BTreeSet;

use kroncover::certificate::{
    axiom_oracle, axiom_symmetric_cube, axiom_trivial_pair, combine_vsum, deserialize, serialize,
    verify_certificate, LemmaRegistry, VerifyMode,
};
use kroncover::characters::partitions_of;
use kroncover::config::Caps;
use kroncover::kronecker::KroneckerOracle;
use kroncover::{Error, Partition};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn p(s: &str) -> Partition {
    s.parse().unwrap()
}

#[test]
fn every_single_entry_tamper_is_caught() {
    let oracle = KroneckerOracle::default();
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    let mut caught = 0;
    let mut built = 0;
    while built < 60 {
        let cert = common::random_composition(&oracle, 3, 10, &mut rng);
        if cert.node_count() < 3 {
            continue;
        }
        built += 1;
        for path in common::paths(&cert) {
            let node = common::node_at(&cert, &path);
            let mut entries = node.conclusion().entries().to_vec();
            let slot = rng.gen_range(0..entries.len());
            let others: Vec<Partition> = partitions_of(entries[slot].size())
                .into_iter()
                .filter(|q| *q != entries[slot])
                .collect();
            let Some(q) = others.choose(&mut rng) else { continue };
            entries[slot] = q.clone();
            let bad = common::tamper(&cert, &path, entries);
            match verify_certificate(&bad, VerifyMode::Full, &oracle) {
                Err(Error::Verification { path: at, .. }) => {
                    let parent = &path[..path.len().saturating_sub(1)];
                    assert!(at == path || at == parent, "tamper at {path:?} reported at {at:?}");
                    caught += 1;
                }
                other => panic!("tamper at {path:?} not caught: {other:?}"),
            }
        }
    }
    assert!(caught > 100);
}

#[test]
fn text_round_trip_preserves_certificates() {
    let oracle = KroneckerOracle::default();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..50 {
        let arity = rng.gen_range(3..=4);
        let cert = common::random_composition(&oracle, arity, 12, &mut rng);
        let text = serialize(&cert);
        let back = deserialize(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(serialize(&back), text);
    }
}

#[test]
fn malformed_text_is_rejected() {
    let cert = axiom_trivial_pair(&p("[2,1]"));
    let text = serialize(&cert);
    assert!(deserialize(&text.replace("version 1", "version 9")).is_err());
    assert!(deserialize(&text.replace("root 0", "")).is_err());
    assert!(deserialize(&text.replace("[2,1] [2,1]", "[2,1] [2,x]")).is_err());
    assert!(matches!(deserialize("garbage"), Err(Error::Parse { .. })));
}

#[test]
fn edited_text_fails_verification() {
    let oracle = KroneckerOracle::default();
    let cert = LemmaRegistry::default()
        .build("rectsquare", &["2".into(), "3".into(), "1".into()], &oracle)
        .unwrap();
    let text = serialize(&cert);
    let edited = text.replacen("[3,3,3,3]", "[4,3,3,2]", 1);
    assert_ne!(edited, text);
    let result = deserialize(&edited).and_then(|c| verify_certificate(&c, VerifyMode::Full, &oracle));
    assert!(result.is_err());
}

#[test]
fn odd_vertical_sums_are_refused() {
    let one = axiom_trivial_pair(&p("[1]"));
    let odd: BTreeSet<usize> = [0].into_iter().collect();
    assert!(combine_vsum(one.clone(), one.clone(), &odd).is_err());
    let even: BTreeSet<usize> = [0, 1].into_iter().collect();
    let ok = combine_vsum(one.clone(), one, &even).unwrap();
    assert_eq!(ok.conclusion().entries(), &[p("[1,1]"), p("[1,1]"), p("[2]")]);
}

#[test]
fn false_leaves_are_refused() {
    let oracle = KroneckerOracle::default();
    assert!(axiom_oracle(vec![p("[2,2]"), p("[2,2]"), p("[3,1]")], &oracle).is_err());
    assert!(axiom_symmetric_cube(&p("[3,1]"), &oracle).is_err());
}

#[test]
fn modes_differ_in_what_they_check() {
    let oracle = KroneckerOracle::new(Caps::with_oracle(6));
    let cube = axiom_symmetric_cube(&p("[3,2,1]"), &oracle).unwrap();
    let big = axiom_symmetric_cube(&p("[4,3,2,1]"), &oracle).unwrap();

    let s = verify_certificate(&cube, VerifyMode::Structural, &oracle).unwrap();
    assert_eq!(s.oracle_checks, 0);
    let l = verify_certificate(&cube, VerifyMode::Leaves, &oracle).unwrap();
    assert_eq!(l.oracle_checks, 1);
    let f = verify_certificate(&cube, VerifyMode::Full, &oracle).unwrap();
    assert!(f.root_checked);

    let f = verify_certificate(&big, VerifyMode::Full, &oracle).unwrap();
    assert!(!f.root_checked);
    assert_eq!(f.unverified.len(), 1);
}

#[test]
fn registry_reports_unknown_lemmas_and_bad_arity() {
    let oracle = KroneckerOracle::default();
    let reg = LemmaRegistry::default();
    assert!(reg.build("nosuch", &[], &oracle).is_err());
    assert!(reg.build("rectsquare", &["2".into()], &oracle).is_err());
    for name in ["rectcube", "rectsquare", "squarecube", "hookidempotent", "hooksquare", "pieri"] {
        assert!(reg.get(name).is_some(), "{name}");
    }
}
