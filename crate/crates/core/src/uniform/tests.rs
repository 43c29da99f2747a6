use proptest::prelude::*;

use super::*;
use crate::arith::multiplicative_order;

fn group(p: u64, m: u32, n: u32, lambda: u64) -> Group {
    Group::new(GroupDescription::metacyclic(p, m, n, lambda)).unwrap()
}

#[test]
fn epsilon_examples() {
    assert_eq!(epsilon_lambda(5, 2, 1, 7).unwrap(), 1);
    // (1 + 6 + 36 + 216 + 1296) / 5 = 311
    assert_eq!(epsilon_lambda(5, 2, 6, 1).unwrap(), 311 % 25);
    // p = 2, lambda = 3: (1 + 3) / 2 = 2, which is 1 + x = 0 mod 2
    assert_eq!(epsilon_lambda(2, 2, 3, 1).unwrap(), 2);
    assert!(epsilon_lambda(5, 2, 2, 1).is_err());
}

#[test]
fn epsilon_is_one_mod_p_for_odd_p() {
    for (p, m) in [(3u64, 3u32), (5, 2), (7, 2)] {
        let pm = p.pow(m);
        for lambda in (1..pm).filter(|l| l % p == 1) {
            for x in 0..pm {
                assert_eq!(epsilon_lambda(p, m, lambda, x).unwrap() % p, 1);
            }
        }
    }
}

#[test]
fn power_map_example() {
    let g = group(5, 2, 2, 6);
    let mc = g.metacyclic().unwrap();
    let h = power_map(&g, 1, mc.element(1, 1)).unwrap();
    assert_eq!(mc.pair(h), (5 * 11 % 25, 5));
    assert_eq!(
        power_map(&g, 0, mc.element(3, 4)).unwrap(),
        mc.element(3, 4)
    );
    let ab = group(5, 2, 2, 1);
    let mc = ab.metacyclic().unwrap();
    assert_eq!(
        mc.pair(power_map(&ab, 1, mc.element(3, 4)).unwrap()),
        (15, 20)
    );
}

#[test]
fn filtration_levels_are_nested_normal_subgroups() {
    let g = group(5, 2, 2, 6);
    let mut prev: Option<Vec<Element>> = None;
    for r in 0..=2 {
        let level = filtration_level(&g, r).unwrap();
        assert_eq!(level.members.len() as u64, 5u64.pow(2 * (2 - r)));
        let set: std::collections::BTreeSet<_> = level.members.iter().copied().collect();
        for &a in &level.members {
            for &b in &level.members {
                assert!(set.contains(&g.mul(a, b)));
            }
            for c in g.elements().step_by(11) {
                assert!(set.contains(&g.conjugate(a, c)));
            }
        }
        if let Some(prev) = prev {
            assert!(level.members.iter().all(|e| prev.contains(e)));
        }
        prev = Some(level.members);
    }
}

#[test]
fn filtration_examples() {
    let g = group(5, 2, 2, 6);
    let id = filtration_iso_check(&g, 0, 0).unwrap();
    assert!(id.is_isomorphism());
    assert!(id
        .images
        .iter()
        .enumerate()
        .all(|(i, c)| c[0] * 5 + c[1] == i as u64));
    assert!(filtration_iso_check(&g, 0, 1).unwrap().is_isomorphism());
    assert!(filtration_iso_check(&g, 1, 1).is_err());

    let g = group(2, 3, 3, 3);
    assert!(filtration_iso_check(&g, 1, 1).unwrap().is_isomorphism());
    assert!(matches!(
        filtration_iso_check(&g, 0, 1),
        Err(Error::PreconditionViolated(_))
    ));
    assert_eq!(
        legal_filtration_pairs(&g).unwrap(),
        vec![(1, 0), (1, 1), (2, 0)]
    );
}

#[test]
fn admits_examples() {
    let v = admits_beauville(5, 2, 2, 6).unwrap();
    assert!(v.admits);
    let v = admits_beauville(5, 3, 2, 6).unwrap();
    assert!(!v.admits);
    assert_eq!(v.reason, "n ≠ m");
    let v = admits_beauville(3, 1, 1, 1).unwrap();
    assert_eq!((v.admits, v.reason.as_str()), (false, "p < 5"));
    assert!(matches!(
        admits_beauville(5, 2, 2, 2),
        Err(Error::InvalidLambda { .. })
    ));

    let v = admits_beauville_audited(2, 2, 2, 3, &SearchOptions::exhaustive()).unwrap();
    let audit = v.audit.unwrap();
    assert!(!v.admits && audit.exhaustive && audit.agrees);
    assert_eq!(audit.count, 0);
}

#[test]
fn classify_examples() {
    let abelian = classify(5, 2, 1).unwrap();
    assert!(abelian.abelian);
    let c6 = classify(5, 2, 6).unwrap();
    assert_eq!((c6.p, c6.n, c6.r, c6.abelian), (5, 2, 1, false));
    assert_eq!(classify(5, 2, 11).unwrap(), c6);
    assert!(matches!(classify(2, 3, 5), Err(Error::OddPrimeOnly(2))));
}

#[test]
fn r_is_the_order_exponent_of_lambda() {
    for (p, n) in [(3u64, 3u32), (5, 3), (7, 2)] {
        let pn = p.pow(n);
        for lambda in (1..pn).filter(|l| l % p == 1) {
            let c = classify(p, n, lambda).unwrap();
            let order = multiplicative_order(lambda, pn).unwrap();
            assert_eq!(order, p.pow(c.r), "p={p} n={n} lambda={lambda}");
        }
    }
}

#[test]
fn witness_examples() {
    match isomorphism_witness(5, 2, 6, 6).unwrap() {
        WitnessOutcome::Isomorphism(w) => assert_eq!(w.u, 1),
        other => panic!("{other:?}"),
    }
    match isomorphism_witness(5, 2, 6, 11).unwrap() {
        WitnessOutcome::Isomorphism(w) => {
            assert_eq!(pow_mod(11, w.u, 25), 6);
            assert_eq!(w.audited_pairs, 625 * 625);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        isomorphism_witness(5, 2, 6, 1).unwrap(),
        WitnessOutcome::Refuted { .. }
    ));
}

fn metacyclic_params() -> impl Strategy<Value = (u64, u32, u32, u64)> {
    // every valid (p, m, n, lambda) with order at most 625
    let mut all = Vec::new();
    for p in [2u64, 3, 5] {
        for m in 1..=4u32 {
            for n in 1..=4u32 {
                if p.pow(m + n) > 625 {
                    continue;
                }
                let pm = p.pow(m);
                for lambda in 1..pm {
                    if Metacyclic::new(p, m, n, lambda).is_ok() {
                        all.push((p, m, n, lambda));
                    }
                }
            }
        }
    }
    proptest::sample::select(all)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_map_equals_repeated_multiplication((p, m, n, lambda) in metacyclic_params()) {
        let g = group(p, m, n, lambda);
        for s in 0..=n {
            for h in g.elements() {
                let direct = (0..s).fold(h, |acc, _| g.pow(acc, p));
                prop_assert_eq!(power_map(&g, s, h).unwrap(), direct);
            }
        }
    }

    #[test]
    fn epsilon_gives_the_pth_power((p, m, n, lambda) in metacyclic_params(), a in 0u64..625, x in 0u64..625) {
        let g = group(p, m, n, lambda);
        let mc = g.metacyclic().unwrap();
        let (a, x) = (a % mc.pm(), x % mc.pn());
        let eps = epsilon_lambda(p, m, mc.lambda(), x).unwrap();
        let direct = mc.pair(g.pow(mc.element(a, x), p));
        prop_assert_eq!(direct, (p * a % mc.pm() * eps % mc.pm(), p * x % mc.pn()));
    }
}
