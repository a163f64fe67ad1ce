mod common;

use common::{epes, es, live_es, seeded_live_es, weak_prime_fixtures};
use proptest::prelude::*;
use weavent::duality::{dom_of_morphism, epes_isomorphism, unfold_morphism_choices, validate_epes_morphism};
use weavent::io;
use weavent::iso::poset_isomorphism;
use weavent::{
    connect_es, dom_of_es, epes_dom, epes_ev, es_isomorphic, ev_of_domain, fuse, poset_isomorphic, unfold,
    validate_domain_morphism, validate_es_morphism,
};

#[test]
fn ev_of_running_domain() {
    let d = dom_of_es(&es("e_run")).unwrap();
    let e = ev_of_domain(&d).unwrap();
    assert_eq!(e.names(), ["class0:{a,c}", "class1:{a}", "class2:{b}"]);
    assert!(es_isomorphic(&e, &es("e_run")));
}

#[test]
fn split_event_has_isomorphic_domain() {
    let d1 = dom_of_es(&es("e_prime")).unwrap();
    let d2 = dom_of_es(&es("e_double_prime")).unwrap();
    assert_eq!(d1.len(), 5);
    assert!(poset_isomorphism(&d1, &d2).is_some());
    let connected = connect_es(&es("e_prime")).unwrap();
    assert_eq!(connected.len(), 4);
    assert!(es_isomorphic(&connected, &es("e_double_prime")));
    assert!(es_isomorphic(&connect_es(&es("e_ccs")).unwrap(), &es("e_ccs")));
    assert!(poset_isomorphism(&dom_of_es(&es("e_run")).unwrap(), &dom_of_es(&es("e_ccs")).unwrap()).is_none());
}

#[test]
fn fixture_duality() {
    for (name, d) in weak_prime_fixtures() {
        let e = ev_of_domain(&d).unwrap();
        assert!(poset_isomorphic(&dom_of_es(&e).unwrap(), &d), "{name}");
    }
}

#[test]
fn merging_map_is_a_morphism() {
    let (src, dst) = (es("e_double_prime"), es("e_prime"));
    let f = io::parse_event_map(&common::fixture("e_double_prime_to_e_prime.map.json"), &src, &dst).unwrap();
    assert!(validate_es_morphism(&f, &src, &dst).is_ok());
    let g = dom_of_morphism(&f, &src, &dst).unwrap();
    let (d1, d2) = (dom_of_es(&src).unwrap(), dom_of_es(&dst).unwrap());
    assert!(validate_domain_morphism(&g, &d1, &d2, true).is_ok());
}

#[test]
fn partial_map_dropping_an_event() {
    let (src, dst) = (es("e_prime"), es("e_double_prime"));
    let f = io::parse_event_map(&common::fixture("e_prime_to_e_double_prime.map.json"), &src, &dst).unwrap();
    assert_eq!(f[src.index("c").unwrap()], None);
    assert!(validate_es_morphism(&f, &src, &dst).is_ok());
    let g = dom_of_morphism(&f, &src, &dst).unwrap();
    let (d1, d2) = (dom_of_es(&src).unwrap(), dom_of_es(&dst).unwrap());
    assert!(validate_domain_morphism(&g, &d1, &d2, false).is_ok());
    assert!(validate_domain_morphism(&g, &d1, &d2, true).is_err());
}

#[test]
fn unfolding_the_running_example() {
    let u = unfold(&es("e_run")).unwrap();
    assert_eq!(u.len(), 4);
    let nontrivial = (0..u.len())
        .filter(|&a| (0..u.len()).any(|b| a != b && u.equivalent(a, b)))
        .count();
    assert_eq!(nontrivial, 2);
    assert!(u.base().classify().prime);
    assert!(es_isomorphic(&fuse(&u).unwrap(), &es("e_run")));
    assert!(epes_dom(&u).is_weak_prime_algebraic());
}

#[test]
fn unfolding_a_synchronisation() {
    let u = unfold(&es("e_sync")).unwrap();
    assert_eq!(u.len(), 3);
    assert!((0..3).all(|a| (0..3).all(|b| a == b || !u.equivalent(a, b))));
}

#[test]
fn equivalence_across_conflict() {
    let p = epes("e_double_prime");
    assert_eq!(epes_dom(&p).len(), 5);
    let back = epes_ev(&epes_dom(&p)).unwrap();
    assert!(poset_isomorphic(&epes_dom(&back), &epes_dom(&p)));
    assert!((0..back.len()).all(|a| (0..back.len()).all(|b| a == b || !back.equivalent(a, b))));
    let f = fuse(&p).unwrap();
    assert_eq!(f.len(), 3);
    assert!(es_isomorphic(&f, &es("e_prime")));
    assert!(epes_isomorphism(&unfold(&f).unwrap(), &p).is_some());
}

#[test]
fn unfolded_morphisms_have_choices() {
    let (src, dst) = (es("e_double_prime"), es("e_prime"));
    let f = io::parse_event_map(&common::fixture("e_double_prime_to_e_prime.map.json"), &src, &dst).unwrap();
    let choices = unfold_morphism_choices(&f, &src, &dst).unwrap();
    assert_eq!(choices.len(), 4);
    assert!(choices.iter().all(|(_, c)| c.len() == 1));
    let us = unfold(&src).unwrap();
    let ud = unfold(&dst).unwrap();
    let map: Vec<Option<usize>> = (0..us.len())
        .map(|e| {
            let (_, c) = choices.iter().find(|(n, _)| n == us.base().name(e)).unwrap();
            Some(ud.base().index(&c[0]).unwrap())
        })
        .collect();
    let v = validate_epes_morphism(&map, &us, &ud).unwrap_err();
    assert_eq!(v.condition, 4);

    let e = es("e_run");
    let id: Vec<Option<usize>> = (0..e.len()).map(Some).collect();
    let choices = unfold_morphism_choices(&id, &e, &e).unwrap();
    let u = unfold(&e).unwrap();
    let map: Vec<Option<usize>> = (0..u.len())
        .map(|x| {
            let (_, c) = choices.iter().find(|(n, _)| n == u.base().name(x)).unwrap();
            assert_eq!(c.len(), 1);
            Some(u.base().index(&c[0]).unwrap())
        })
        .collect();
    assert!(validate_epes_morphism(&map, &u, &u).is_ok());
}

#[test]
fn seeded_coreflection() {
    for e in seeded_live_es(11, 100, 5) {
        let c = connect_es(&e).unwrap();
        assert!(poset_isomorphic(&dom_of_es(&c).unwrap(), &dom_of_es(&e).unwrap()));
        if e.classify().connected {
            assert!(es_isomorphic(&c, &e));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn connect_preserves_domain(e in live_es(5)) {
        let c = connect_es(&e).unwrap();
        prop_assert!(c.classify().connected);
        prop_assert!(poset_isomorphic(&dom_of_es(&c).unwrap(), &dom_of_es(&e).unwrap()));
        if e.classify().connected {
            prop_assert!(es_isomorphic(&c, &e));
        }
    }

    #[test]
    fn fuse_unfold_round_trip(e in live_es(4)) {
        let c = connect_es(&e).unwrap();
        let u = unfold(&c).unwrap();
        prop_assert!(u.base().classify().prime);
        prop_assert!(es_isomorphic(&fuse(&u).unwrap(), &c));
        let again = unfold(&fuse(&u).unwrap()).unwrap();
        prop_assert!(epes_isomorphism(&again, &u).is_some());
        prop_assert!(epes_dom(&u).is_weak_prime_algebraic());
    }

    #[test]
    fn epes_duality(e in live_es(4)) {
        let u = unfold(&e).unwrap();
        let d = epes_dom(&u);
        let back = epes_ev(&d).unwrap();
        prop_assert!(poset_isomorphic(&epes_dom(&back), &d));
    }
}
