//! One line per acceptance criterion; exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{domain, epes, es, grammar, seeded_connected_es, seeded_domains, seeded_live_es};
use weavent::rewrite::{equivalent_traces, grammar_from_es, interchange, sequential_independence, trace_domain, Derivation};
use weavent::rewrite::graphs_isomorphic;
use weavent::duality::epes_isomorphism;
use weavent::{
    async_domain, connect_es, dom_of_es, epes_dom, es_isomorphic, ev_of_domain, ev_wd, fuse, hasse_as_async,
    poset_isomorphic, unfold, zeta, FiniteDomain,
};

const RUNNING_LIMIT: Duration = Duration::from_secs(1);
const GRAMMAR_LIMIT: Duration = Duration::from_secs(10);
const COREFLECTION_LIMIT: Duration = Duration::from_secs(60);
const SYNTHESIS_LIMIT: Duration = Duration::from_secs(120);
const RANDOM_ES: usize = 100;
const RANDOM_DOMAINS: usize = 100;
const RANDOM_CONNECTED: usize = 20;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(start: Instant, limit: Duration) -> Result<String, String> {
    let t = start.elapsed();
    check(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(format!("{t:.2?} < {limit:?}"))
}

fn names(d: &FiniteDomain, xs: &[usize]) -> Vec<String> {
    let mut v: Vec<String> = xs.iter().map(|&x| d.name(x).to_string()).collect();
    v.sort();
    v
}

fn running_example() -> Outcome {
    let start = Instant::now();
    let d = dom_of_es(&es("e_run")).map_err(|e| e.to_string())?;
    let expected = domain_from_covers();
    check(d.len() == 7, || format!("{} elements", d.len()))?;
    check(poset_isomorphic(&d, &expected), || "not isomorphic to the seven-configuration poset".into())?;
    let irr = names(&d, &d.irreducibles());
    check(irr == ["{a,c}", "{a}", "{b,c}", "{b}"], || format!("irreducibles {irr:?}"))?;
    let primes = names(&d, &d.primes());
    check(primes == ["{a}", "{b}"], || format!("primes {primes:?}"))?;
    check(names(&d, &d.weak_primes()) == irr, || "weak primes differ from irreducibles".into())?;
    let classes = d.interchange_classes().len();
    check(classes == 3, || format!("{classes} interchange classes"))?;
    within(start, RUNNING_LIMIT)
}

/// The running example's configurations, written out by hand.
fn domain_from_covers() -> FiniteDomain {
    FiniteDomain::from_names(
        &["0", "a", "b", "ab", "ac", "bc", "abc"],
        &[
            ("0", "a"),
            ("0", "b"),
            ("a", "ab"),
            ("b", "ab"),
            ("a", "ac"),
            ("b", "bc"),
            ("ab", "abc"),
            ("ac", "abc"),
            ("bc", "abc"),
        ],
        weavent::DomainKind::Coherent,
    )
    .unwrap()
}

fn grammar_pipeline() -> Outcome {
    let start = Instant::now();
    let g = grammar("running");
    let t = trace_domain(&g, 3, false).map_err(|e| e.to_string())?;
    check(poset_isomorphic(&t.domain, &domain_from_covers()), || {
        format!("trace domain has {} elements", t.domain.len())
    })?;
    let ev = ev_of_domain(&t.domain).map_err(|e| e.to_string())?;
    check(es_isomorphic(&ev, &es("e_run")), || "event structure of traces differs".into())?;
    let safe = trace_domain(&g, 3, true).map_err(|e| e.to_string())?;
    check(safe.domain.len() == 5, || format!("fusion-safe domain has {} elements", safe.domain.len()))?;
    check(safe.domain.algebraicity().prime_algebraic, || "fusion-safe domain is not prime".into())?;
    let split = dom_of_es(&es("e_prime")).map_err(|e| e.to_string())?;
    check(poset_isomorphic(&safe.domain, &split), || "fusion-safe domain differs from the split poset".into())?;
    within(start, GRAMMAR_LIMIT)
}

fn coreflection() -> Outcome {
    let start = Instant::now();
    let mut connected = 0;
    for (k, e) in seeded_live_es(3, RANDOM_ES, 5).iter().enumerate() {
        let c = connect_es(e).map_err(|x| format!("#{k}: {x}"))?;
        check(poset_isomorphic(&dom_of_es(&c).unwrap(), &dom_of_es(e).unwrap()), || {
            format!("#{k}: domain changed")
        })?;
        if e.classify().connected {
            connected += 1;
            check(es_isomorphic(&c, e), || format!("#{k}: connected structure changed"))?;
        }
    }
    Ok(format!("{RANDOM_ES} structures, {connected} connected, {}", within(start, COREFLECTION_LIMIT)?))
}

fn duality() -> Outcome {
    let mut suite: Vec<(String, FiniteDomain)> = vec![
        ("running".into(), dom_of_es(&es("e_run")).unwrap()),
        ("concurrent".into(), dom_of_es(&es("e_ccs")).unwrap()),
        ("split".into(), dom_of_es(&es("e_double_prime")).unwrap()),
        ("chain".into(), domain("chain")),
    ];
    for (k, d) in seeded_domains(17, RANDOM_DOMAINS, 12).into_iter().enumerate() {
        suite.push((format!("random #{k}"), d));
    }
    for (name, d) in &suite {
        let ev = ev_of_domain(d).map_err(|e| format!("{name}: {e}"))?;
        check(poset_isomorphic(&dom_of_es(&ev).unwrap(), d), || format!("{name}: dom(ev(D)) differs"))?;
        let wd = ev_wd(d).map_err(|e| format!("{name}: {e}"))?;
        check(es_isomorphic(&wd, &ev), || format!("{name}: interval structure differs"))?;
        zeta(d).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} domains", suite.len()))
}

fn interchange_oracles() -> Outcome {
    let mut suite = vec![domain("interchange_triple"), domain("not_eq"), domain("m3"), domain("chain")];
    suite.push(dom_of_es(&es("e_run")).unwrap());
    suite.push(dom_of_es(&es("e1")).unwrap());
    suite.extend(seeded_domains(29, RANDOM_DOMAINS, 12));
    let mut pairs = 0;
    let mut small = 0;
    for (k, d) in suite.iter().enumerate() {
        let irr = d.irreducibles();
        for &i in &irr {
            for &j in &irr {
                pairs += 1;
                let by_def = d.interchangeable_by_definition(i, j).unwrap();
                check(d.interchangeable(i, j).unwrap() == by_def, || format!("#{k}: cover criterion disagrees"))?;
                check(d.interchangeable_in_context(i, j).unwrap() == by_def, || {
                    format!("#{k}: context criterion disagrees")
                })?;
            }
        }
        if d.len() <= 10 {
            small += 1;
            check(d.weak_primes() == d.weak_primes_by_definition(), || format!("#{k}: weak primes disagree"))?;
        }
    }
    Ok(format!("{pairs} pairs over {} posets, {small} small posets", suite.len()))
}

fn counterexamples() -> Outcome {
    let d = domain("interchange_triple");
    let ix = |d: &FiniteDomain, n: &str| d.index(n).unwrap();
    let (i, j, k) = (ix(&d, "i"), ix(&d, "i'"), ix(&d, "i''"));
    let ok = d.interchangeable(i, j).unwrap() && d.interchangeable(j, k).unwrap() && !d.interchangeable(i, k).unwrap();
    check(ok, || "interchange pattern on the three-irreducible poset".into())?;
    let d = domain("not_eq");
    let (i1, i2, i3) = (ix(&d, "i1"), ix(&d, "i2"), ix(&d, "i3"));
    let ok = d.is_consistent(&[i1, i3])
        && d.interchangeable(i1, i2).unwrap()
        && d.interchangeable(i2, i3).unwrap()
        && !d.interchangeable(i1, i3).unwrap();
    check(ok, || "interchange pattern on the bounded complete poset".into())?;
    check(!domain("m3").is_weak_prime_algebraic(), || "M3 is weak prime algebraic".into())?;
    Ok("three posets".into())
}

fn synthesis() -> Outcome {
    let start = Instant::now();
    let run = es("e_run");
    let g = grammar_from_es(&run).map_err(|e| e.to_string())?;
    check(g.rules.len() == 3 && g.start.node_count() == 7, || "running grammar shape".into())?;
    let e1 = es("e1");
    let g1 = grammar_from_es(&e1).map_err(|e| e.to_string())?;
    check(g1.rules.len() == 5 && g1.start.node_count() == 13, || "five-event grammar shape".into())?;
    let mut suite = vec![run, e1];
    suite.extend(seeded_connected_es(13, RANDOM_CONNECTED, 4));
    for (k, e) in suite.iter().enumerate() {
        let g = grammar_from_es(e).map_err(|x| format!("#{k}: {x}"))?;
        let t = trace_domain(&g, e.len(), false).map_err(|x| format!("#{k}: {x}"))?;
        let back = ev_of_domain(&t.domain).map_err(|x| format!("#{k}: {x}"))?;
        check(es_isomorphic(&back, e), || format!("#{k}: round trip differs"))?;
    }
    Ok(format!("{} structures, {}", suite.len(), within(start, SYNTHESIS_LIMIT)?))
}

fn rewriting() -> Outcome {
    let g = grammar("running");
    let ab = Derivation::by_rules(&g, &["a", "b"]).unwrap().ok_or("a;b not applicable")?;
    let pair = sequential_independence(&ab.steps[0], &ab.steps[1], &g.rules).ok_or("a;b not independent")?;
    let (first, second) = interchange(&ab.steps[0], &ab.steps[1], &pair, &g.rules, "x").map_err(|e| e.to_string())?;
    check(g.rules[first.rule].name == "b" && g.rules[second.rule].name == "a", || "wrong order".into())?;
    check(graphs_isomorphic(&second.target, ab.target()), || "targets differ".into())?;
    let ba = Derivation { source: g.start.clone(), steps: vec![first, second] };
    let sigma = equivalent_traces(&ab, &ba);
    check(sigma == Some(vec![1, 0]), || format!("permutation {sigma:?}"))?;
    let mut steps = ab.steps.len() + ba.steps.len();
    let mut all: Vec<&Derivation> = vec![&ab, &ba];
    let t = trace_domain(&g, 3, false).map_err(|e| e.to_string())?;
    all.extend(&t.representatives);
    for d in &all {
        for s in &d.steps {
            check(s.verify(&g.rules[s.rule]), || "a step fails the pushout check".into())?;
        }
    }
    steps += t.representatives.iter().map(|d| d.len()).sum::<usize>();
    check(ab.steps[0].is_fusion_safe(&g.rules[ab.steps[0].rule]), || "a at the start graph is unsafe".into())?;
    check(!ab.steps[1].is_fusion_safe(&g.rules[ab.steps[1].rule]), || "b after a is safe".into())?;
    Ok(format!("permutation (1 2), {steps} steps verified"))
}

fn epes_suite() -> Outcome {
    let structures = ["e_run", "e_ccs", "e_prime", "e_double_prime", "e1", "e_sync"];
    for name in structures {
        let e = es(name);
        let u = unfold(&e).map_err(|x| format!("{name}: {x}"))?;
        check(es_isomorphic(&fuse(&u).unwrap(), &e), || format!("{name}: fuse(unfold) differs"))?;
        check(epes_dom(&u).is_weak_prime_algebraic(), || format!("{name}: domain not weak prime"))?;
    }
    let p = epes("e_double_prime");
    let back = unfold(&fuse(&p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    check(epes_isomorphism(&back, &p).is_some(), || "unfold(fuse) differs on the equivalence fixture".into())?;
    check(epes_dom(&p).is_weak_prime_algebraic(), || "equivalence fixture domain not weak prime".into())?;
    let u = unfold(&es("e_run")).unwrap();
    let nontrivial: Vec<usize> = (0..u.len()).filter(|&a| (0..u.len()).any(|b| a != b && u.equivalent(a, b))).collect();
    let one_class = nontrivial.len() == 2 && u.equivalent(nontrivial[0], nontrivial[1]);
    check(u.len() == 4 && one_class, || format!("unfolding has {} events", u.len()))?;
    Ok(format!("{} structures", structures.len() + 1))
}

fn async_graphs() -> Outcome {
    let ccs = dom_of_es(&es("e_ccs")).unwrap();
    let a = hasse_as_async(&ccs).map_err(|e| e.to_string())?;
    let r = a.validate().map_err(|e| e.to_string())?;
    check(r.holds(false) && r.prime, || format!("concurrent process: {:?}", r.witnesses))?;
    check(poset_isomorphic(&async_domain(&a).unwrap(), &ccs), || "concurrent process poset differs".into())?;
    let run = dom_of_es(&es("e_run")).unwrap();
    let a = hasse_as_async(&run).map_err(|e| e.to_string())?;
    let r = a.validate().map_err(|e| e.to_string())?;
    check(r.holds(true), || format!("running example not weak: {:?}", r.witnesses))?;
    check(!r.cube_down, || "running example satisfies the stability direction".into())?;
    check(poset_isomorphic(&async_domain(&a).unwrap(), &run), || "running example poset differs".into())?;
    Ok("full and weak verdicts as expected".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("running example domain", running_example),
        ("grammar pipeline", grammar_pipeline),
        ("coreflection", coreflection),
        ("duality", duality),
        ("interchange oracles", interchange_oracles),
        ("counterexample posets", counterexamples),
        ("grammar synthesis round trip", synthesis),
        ("rewriting engine", rewriting),
        ("equivalence structures", epes_suite),
        ("asynchronous graphs", async_graphs),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
