use std::collections::BTreeSet;
use std::sync::Arc;

use super::*;
use crate::group::GroupDescription;

fn group(d: GroupDescription) -> Arc<Group> {
    Arc::new(Group::new(d).unwrap())
}

fn pair(g: &Group, a: u64, x: u64) -> Element {
    g.metacyclic().unwrap().element(a, x)
}

#[test]
fn trivial_group_has_empty_power_set_and_no_structure() {
    let g = group(GroupDescription::cyclic(1));
    let e = g.identity();
    let t = Triple::new(e, e, e);
    assert!(conjugate_power_set(&g, &t).is_empty());
    let s = verify(&g, t, t).unwrap();
    assert!(!s.verified);
    let r = s.refutation.unwrap();
    assert_eq!(r.condition, Condition::DisjointPowers);
    assert_eq!(r.witness, None);
    let out = search(&g, &SearchOptions::exhaustive()).unwrap();
    assert_eq!(out.count, 0);
    assert!(out.exhaustive);
}

#[test]
fn power_set_of_a_triple_in_the_elementary_abelian_square() {
    let g = group(GroupDescription::metacyclic(5, 1, 1, 1));
    let t = Triple::new(pair(&g, 1, 0), pair(&g, 0, 1), pair(&g, 4, 4));
    assert_eq!(t.product(&g), g.identity());
    let cps = conjugate_power_set(&g, &t);
    assert_eq!(cps.len(), 12);
    // three lines through the origin, four nonzero points each
    let expected: BTreeSet<Element> = (1..5)
        .flat_map(|k| [pair(&g, k, 0), pair(&g, 0, k), pair(&g, k, k)])
        .collect();
    assert_eq!(
        cps.classes().iter().copied().collect::<BTreeSet<_>>(),
        expected
    );
    assert!(!cps.contains(g.identity()));
}

#[test]
fn conjugate_powers_collapse_in_the_metacyclic_group() {
    let g = group(GroupDescription::metacyclic(5, 2, 2, 6));
    let t = Triple::completing(&g, pair(&g, 1, 0), pair(&g, 0, 1));
    let cps = conjugate_power_set(&g, &t);
    let total: u64 = t.elements().iter().map(|&e| g.element_order(e) - 1).sum();
    assert!((cps.len() as u64) < total);
    // every listed class really is the class of some power
    for &c in cps.classes() {
        let class = g.conjugacy_class(c);
        assert!(t
            .elements()
            .iter()
            .any(|&e| { (1..g.element_order(e)).any(|k| class.contains(&g.pow(e, k))) }));
    }
}

#[test]
fn equal_triples_are_refuted_by_the_class_of_x() {
    let g = group(GroupDescription::metacyclic(5, 2, 2, 6));
    let t = Triple::completing(&g, pair(&g, 1, 0), pair(&g, 0, 1));
    let s = verify(&g, t, t).unwrap();
    let r = s.refutation.unwrap();
    assert_eq!(r.condition, Condition::DisjointPowers);
    assert_eq!(r.witness, Some(g.class_id(t.x)));
}

#[test]
fn refutations_name_the_first_failed_condition() {
    let g = group(GroupDescription::metacyclic(5, 1, 1, 1));
    let good = Triple::completing(&g, pair(&g, 1, 0), pair(&g, 0, 1));
    let bad_product = Triple::new(pair(&g, 1, 0), pair(&g, 0, 1), g.identity());
    let r = verify(&g, good, bad_product).unwrap().refutation.unwrap();
    assert_eq!((r.condition, r.triple), (Condition::ProductOne, Some(2)));
    let cyclic = Triple::completing(&g, pair(&g, 1, 0), pair(&g, 2, 0));
    let r = verify(&g, cyclic, good).unwrap().refutation.unwrap();
    assert_eq!((r.condition, r.triple), (Condition::Generation, Some(1)));
    assert!(matches!(
        verify(
            &g,
            Triple::new(Element(25), g.identity(), g.identity()),
            good
        ),
        Err(Error::MismatchedGroups(_))
    ));
}

#[test]
fn signature_of_the_elementary_abelian_square_is_balanced() {
    let g = group(GroupDescription::metacyclic(5, 1, 1, 1));
    let out = search(&g, &SearchOptions::first_found()).unwrap();
    let s = out.first.unwrap();
    assert!(s.verified);
    assert_eq!(s.signature.entries(), [5; 6]);
    assert!(s.signature.is_balanced());
}

#[test]
fn search_examples() {
    let none = |d: GroupDescription| {
        let out = search(&group(d), &SearchOptions::exhaustive()).unwrap();
        assert!(out.exhaustive);
        assert_eq!(out.count, 0);
        assert!(out.first.is_none());
    };
    none(GroupDescription::abelian_square(2));
    none(GroupDescription::metacyclic(2, 2, 2, 3));
    none(GroupDescription::metacyclic(3, 1, 1, 1));
    none(GroupDescription::quaternion8());

    let out = search(
        &group(GroupDescription::metacyclic(5, 1, 1, 1)),
        &SearchOptions::exhaustive().with_limit(5),
    )
    .unwrap();
    assert!(out.count > 0 && out.exhaustive);
    assert_eq!(out.structures.len(), 5);
    assert!(out.structures.iter().all(|s| s.verified));
    let listed: Vec<_> = out.structures.iter().map(|s| (s.first, s.second)).collect();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(listed, sorted);
    let first = out.first.unwrap();
    assert_eq!((first.first, first.second), listed[0]);
}

/// Condition 3 by direct loops over conjugators and powers.
fn naive_disjoint(g: &Group, t1: &Triple, t2: &Triple) -> bool {
    let mut m0 = BTreeSet::new();
    for t in t1.elements() {
        for k in 1..g.element_order(t) {
            let h = g.pow(t, k);
            for c in g.elements() {
                m0.insert(g.conjugate(h, c));
            }
        }
    }
    t2.elements()
        .iter()
        .all(|&t| (1..g.element_order(t)).all(|k| !m0.contains(&g.pow(t, k))))
}

#[test]
fn search_count_matches_naive_count_on_small_groups() {
    for d in [
        GroupDescription::metacyclic(5, 1, 1, 1),
        GroupDescription::abelian_square(4),
        GroupDescription::dihedral(4),
        GroupDescription::abelian_square(6),
    ] {
        let g = group(d);
        let triples: Vec<Triple> = g
            .elements()
            .flat_map(|x| g.elements().map(move |y| (x, y)))
            .map(|(x, y)| Triple::completing(&g, x, y))
            .filter(|t| g.closure(&t.elements()).len() as u64 == g.order())
            .collect();
        let mut naive = 0u64;
        for t1 in &triples {
            for t2 in &triples {
                if naive_disjoint(&g, t1, t2) {
                    naive += 1;
                }
            }
        }
        for threads in [1, 0] {
            let out = search(&g, &SearchOptions::exhaustive().with_threads(threads)).unwrap();
            assert_eq!(out.count, naive, "{}", g.spec());
            assert_eq!(out.generating_triples, triples.len() as u64);
        }
    }
}

#[test]
fn candidate_budget_marks_the_result_partial() {
    let g = group(GroupDescription::metacyclic(5, 1, 1, 1));
    let budget = Budget {
        candidates: 100,
        wall_time: std::time::Duration::from_secs(60),
    };
    let out = search(&g, &SearchOptions::exhaustive().with_budget(budget)).unwrap();
    assert!(!out.exhaustive);
    assert!(out.stop_reason.is_some());
    assert!(out.candidates <= 100);
}

#[test]
fn verify_is_symmetric_and_conjugation_invariant_on_a_sample() {
    let g = group(GroupDescription::metacyclic(3, 2, 2, 4));
    let n = g.order();
    for i in 0..300u64 {
        let t1 = Triple::completing(&g, Element(i * 7 % n), Element((i * 13 + 1) % n));
        let t2 = Triple::completing(&g, Element((i * 29 + 3) % n), Element((i * 5 + 2) % n));
        let a = verify(&g, t1, t2).unwrap().verified;
        assert_eq!(a, verify(&g, t2, t1).unwrap().verified);
        let c = Element((i * 11) % n);
        assert_eq!(a, verify(&g, t1, t2.conjugate(&g, c)).unwrap().verified);
    }
}
