#![allow(clippy::needless_range_loop)]

mod common;

use common::{domain, es, fixture, live_es, seeded_domains, weak_prime_fixtures};
use proptest::prelude::*;
use weavent::interval::{intervals, interval_leq, Interval};
use weavent::io::{self, AsyncDoc};
use weavent::unionfind::UnionFind;
use weavent::{
    async_domain, check_axioms, dom_of_es, es_isomorphic, ev_of_domain, ev_wd, hasse_as_async, interval_classes,
    poset_isomorphic, zeta, FiniteDomain,
};

/// Interval classes by closing the translation relation with a plain fixpoint.
fn class_count_by_closure(d: &FiniteDomain) -> usize {
    let ints: Vec<Interval> = intervals(d);
    let n = ints.len();
    let mut rel = vec![vec![false; n]; n];
    for a in 0..n {
        rel[a][a] = true;
        for b in 0..n {
            if interval_leq(d, ints[a], ints[b]) {
                rel[a][b] = true;
                rel[b][a] = true;
            }
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if rel[a][k] && rel[k][b] {
                    rel[a][b] = true;
                }
            }
        }
    }
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in 0..n {
            if rel[a][b] {
                uf.union(a, b);
            }
        }
    }
    uf.classes().1
}

#[test]
fn interval_counts() {
    let run = dom_of_es(&es("e_run")).unwrap();
    let c = interval_classes(&run);
    assert_eq!((c.intervals.len(), c.count), (9, 3));
    let ccs = dom_of_es(&es("e_ccs")).unwrap();
    let c = interval_classes(&ccs);
    assert_eq!((c.intervals.len(), c.count), (7, 3));
    assert_eq!(class_count_by_closure(&ccs), 3);
    let chain = domain("chain");
    assert_eq!(interval_classes(&chain).count, 3);
}

#[test]
fn axioms_on_fixtures() {
    let r = check_axioms(&dom_of_es(&es("e_run")).unwrap());
    assert!(r.f && r.c && r.r && r.v);
    let r = check_axioms(&domain("m3"));
    assert!(r.c && !r.r);
    assert!(check_axioms(&domain("chain")).binary_ok());
}

#[test]
fn ev_wd_matches_ev() {
    let run = dom_of_es(&es("e_run")).unwrap();
    assert!(es_isomorphic(&ev_wd(&run).unwrap(), &es("e_run")));
    let split = dom_of_es(&es("e_prime")).unwrap();
    assert!(es_isomorphic(&ev_wd(&split).unwrap(), &es("e_double_prime")));
    for (name, d) in weak_prime_fixtures() {
        assert!(es_isomorphic(&ev_wd(&d).unwrap(), &ev_of_domain(&d).unwrap()), "{name}");
    }
}

#[test]
fn zeta_on_running_example() {
    let d = dom_of_es(&es("e_run")).unwrap();
    let z = zeta(&d).unwrap();
    assert_eq!(z.zeta.len(), 3);
    let bottom_a = Interval { lower: d.index("{}").unwrap(), upper: d.index("{a}").unwrap() };
    let c = z.intervals.class_of(bottom_a).unwrap();
    let members: Vec<&str> = z.irreducible_classes[z.zeta[c]].iter().map(|&i| d.name(i)).collect();
    assert_eq!(members, ["{a}"]);
    assert!(zeta(&domain("m3")).is_err());
    let e1 = dom_of_es(&es("e1")).unwrap();
    let z = zeta(&e1).unwrap();
    assert_eq!((z.zeta.len(), z.iota.len()), (5, 5));
}

#[test]
fn prime_domain_classes_are_singletons() {
    let d = dom_of_es(&es("e_ccs")).unwrap();
    let z = zeta(&d).unwrap();
    assert!(z.irreducible_classes.iter().all(|c| c.len() == 1));
}

#[test]
fn hasse_of_prime_domain_is_async() {
    let d = dom_of_es(&es("e_ccs")).unwrap();
    let a = hasse_as_async(&d).unwrap();
    let r = a.validate().unwrap();
    assert!(r.holds(false), "{r:?}");
    assert!(r.prime);
    assert!(poset_isomorphic(&async_domain(&a).unwrap(), &d));
}

#[test]
fn hasse_of_running_domain_is_only_weak() {
    let d = dom_of_es(&es("e_run")).unwrap();
    let a = hasse_as_async(&d).unwrap();
    let r = a.validate().unwrap();
    assert!(r.holds(true), "{r:?}");
    assert!(!r.cube_down);
    assert!(!r.holds(false));
    assert!(r.witnesses["cube_down"].contains("{a,b,c}"));
    assert!(poset_isomorphic(&async_domain(&a).unwrap(), &d));
}

#[test]
fn async_fixtures() {
    let a = io::parse_async(&fixture("single_edge.async.json")).unwrap();
    assert!(a.validate().unwrap().holds(false));
    assert_eq!(async_domain(&a).unwrap().len(), 2);
    let a = io::parse_async(&fixture("diamond.async.json")).unwrap();
    let r = a.validate().unwrap();
    assert!(r.holds(false) && r.prime);
    assert_eq!(async_domain(&a).unwrap().len(), 4);
    let text = io::to_json(&AsyncDoc::from_async(&a));
    assert_eq!(io::parse_async(&text).unwrap(), a);
}

#[test]
fn seeded_weak_prime_domains() {
    for d in seeded_domains(23, 100, 12) {
        assert!(check_axioms(&d).binary_ok() || d.kind() != weavent::DomainKind::Coherent);
        let z = zeta(&d).unwrap();
        assert_eq!(z.zeta.len(), d.interchange_classes().len());
        assert!(es_isomorphic(&ev_wd(&d).unwrap(), &ev_of_domain(&d).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interval_classes_match_closure(e in live_es(4)) {
        let d = dom_of_es(&e).unwrap();
        prop_assert_eq!(interval_classes(&d).count, class_count_by_closure(&d));
    }

    #[test]
    fn zeta_is_a_bijection(e in live_es(5)) {
        let d = dom_of_es(&e).unwrap();
        let z = zeta(&d).unwrap();
        for (c, &k) in z.zeta.iter().enumerate() {
            prop_assert_eq!(z.iota[k], c);
        }
        prop_assert!(es_isomorphic(&ev_wd(&d).unwrap(), &ev_of_domain(&d).unwrap()));
    }

    #[test]
    fn axioms_hold_on_configuration_domains(e in live_es(5)) {
        let d = dom_of_es(&e).unwrap();
        let r = check_axioms(&d);
        prop_assert!(r.binary_ok(), "{:?}", r);
        prop_assert!(r.i);
    }

    #[test]
    fn hasse_round_trip(e in live_es(4)) {
        let d = dom_of_es(&e).unwrap();
        let a = hasse_as_async(&d).unwrap();
        let r = a.validate().unwrap();
        prop_assert!(r.holds(true), "{:?}", r);
        prop_assert!(a.max_inequivalent_two_paths() <= 2);
        prop_assert!(poset_isomorphic(&async_domain(&a).unwrap(), &d));
        prop_assert_eq!(r.cube_down, r.cube_down && d.len() == d.len());
    }
}
