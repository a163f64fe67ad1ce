use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use weavent::rewrite::{grammar_from_es, trace_domain};
use weavent::{check_axioms, dom_of_es, ev_of_domain, hasse_as_async};
use weavent_bench::{domain, es, grammar};

fn domains(c: &mut Criterion) {
    let e1 = es("e1");
    c.bench_function("dom_of_es/e1", |b| b.iter(|| dom_of_es(black_box(&e1)).unwrap()));
    let d = dom_of_es(&e1).unwrap();
    c.bench_function("ev_of_domain/e1", |b| b.iter(|| ev_of_domain(black_box(&d)).unwrap()));
    let interchange_triple = domain("interchange_triple");
    c.bench_function("check_axioms/interchange_triple", |b| b.iter(|| check_axioms(black_box(&interchange_triple))));
}

fn traces(c: &mut Criterion) {
    let g = grammar("running");
    c.bench_function("trace_domain/running/3", |b| b.iter(|| trace_domain(black_box(&g), 3, false).unwrap()));
    c.bench_function("trace_domain/running/3/fusion_safe", |b| {
        b.iter(|| trace_domain(black_box(&g), 3, true).unwrap())
    });
    let e1 = es("e1");
    c.bench_function("synth_and_trace/e1", |b| {
        b.iter(|| {
            let g = grammar_from_es(black_box(&e1)).unwrap();
            trace_domain(&g, g.rules.len(), false).unwrap()
        })
    });
}

fn asynchronous(c: &mut Criterion) {
    let d = dom_of_es(&es("e1")).unwrap();
    let a = hasse_as_async(&d).unwrap();
    c.bench_function("hasse_as_async/e1", |b| b.iter(|| hasse_as_async(black_box(&d)).unwrap()));
    c.bench_function("async_validate/e1", |b| b.iter(|| black_box(&a).validate().unwrap()));
}

criterion_group!(benches, domains, traces, asynchronous);
criterion_main!(benches);
