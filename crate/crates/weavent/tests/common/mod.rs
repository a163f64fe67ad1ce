#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use weavent::duality::Epes;
use weavent::es::{bit, full_mask, EventSet};
use weavent::io;
use weavent::rewrite::Grammar;
use weavent::{connect_es, dom_of_es, EventStructure, FiniteDomain};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn es(name: &str) -> EventStructure {
    io::parse_es(&fixture(&format!("{name}.es.json"))).unwrap()
}

pub fn epes(name: &str) -> Epes {
    io::parse_epes(&fixture(&format!("{name}.epes.json"))).unwrap()
}

pub fn domain(name: &str) -> FiniteDomain {
    io::parse_domain(&fixture(&format!("{name}.domain.json"))).unwrap()
}

pub fn grammar(name: &str) -> Grammar {
    io::parse_grammar(&fixture(&format!("{name}.grammar.json"))).unwrap()
}

/// Weak prime fixture domains: running example, the concurrent process, the
/// split-event structure and chains.
pub fn weak_prime_fixtures() -> Vec<(String, FiniteDomain)> {
    vec![
        ("dom(e_run)".into(), dom_of_es(&es("e_run")).unwrap()),
        ("dom(e_ccs)".into(), dom_of_es(&es("e_ccs")).unwrap()),
        ("dom(e_double_prime)".into(), dom_of_es(&es("e_double_prime")).unwrap()),
        ("dom(e1)".into(), dom_of_es(&es("e1")).unwrap()),
        ("chain".into(), domain("chain")),
    ]
}

/// Raw material for a random binary event structure.
#[derive(Debug, Clone)]
pub struct RawEs {
    pub n: usize,
    pub gens: Vec<Vec<(u64, u64)>>,
    pub conflicts: Vec<(usize, usize)>,
}

impl RawEs {
    /// Sparse generators avoiding the event itself; dead events make it `None`.
    pub fn build(&self) -> Option<EventStructure> {
        let names: Vec<String> = (0..self.n).map(|i| format!("e{i}")).collect();
        let full = full_mask(self.n);
        let mut enabling: Vec<(EventSet, usize)> = Vec::new();
        for (e, gs) in self.gens.iter().enumerate() {
            for &(x, y) in gs {
                enabling.push((x & y & full & !bit(e), e));
            }
        }
        let conflicts: Vec<(usize, usize)> = self.conflicts.iter().copied().filter(|(a, b)| a != b).collect();
        let es = EventStructure::from_binary(names, &conflicts, enabling).ok()?;
        es.saturate().ok()
    }
}

pub fn raw_es(max_events: usize) -> impl Strategy<Value = RawEs> {
    (1..=max_events).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(prop::collection::vec((any::<u64>(), any::<u64>()), 1..=2), n),
            prop::collection::vec((0..n, 0..n), 0..=n),
        )
            .prop_map(|(n, gens, conflicts)| RawEs { n, gens, conflicts })
    })
}

/// Live event structures with at most `max_events` events.
pub fn live_es(max_events: usize) -> impl Strategy<Value = EventStructure> {
    raw_es(max_events).prop_filter_map("dead event", |r| r.build())
}

fn random_raw(rng: &mut StdRng, max_events: usize) -> RawEs {
    let n = rng.gen_range(max_events.div_ceil(2)..=max_events);
    let set = |rng: &mut StdRng| (0..n).filter(|_| rng.gen_bool(0.3)).fold(0u64, |acc, i| acc | 1 << i);
    let gens = (0..n)
        .map(|_| (0..rng.gen_range(1..=3)).map(|_| (set(rng), u64::MAX)).collect())
        .collect();
    let conflicts = (0..rng.gen_range(0..=n)).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    RawEs { n, gens, conflicts }
}

/// `count` live event structures from a fixed seed.
pub fn seeded_live_es(seed: u64, count: usize, max_events: usize) -> Vec<EventStructure> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Some(es) = random_raw(&mut rng, max_events).build() {
            out.push(es);
        }
    }
    out
}

/// Connected structures with events renamed `e0, e1, ...`.
pub fn seeded_connected_es(seed: u64, count: usize, max_events: usize) -> Vec<EventStructure> {
    seeded_live_es(seed, count, max_events)
        .into_iter()
        .map(|es| {
            let c = connect_es(&es).unwrap();
            let names = c.names().to_vec();
            c.renamed(|n| format!("e{}", names.iter().position(|x| x == n).unwrap())).unwrap()
        })
        .collect()
}

/// Configuration domains of random live structures, at most `max_elements` elements.
pub fn seeded_domains(seed: u64, count: usize, max_elements: usize) -> Vec<FiniteDomain> {
    let mut out = Vec::with_capacity(count);
    let mut s = seed;
    while out.len() < count {
        for es in seeded_live_es(s, count, 5) {
            let d = dom_of_es(&es).unwrap();
            if d.len() <= max_elements && out.len() < count {
                out.push(d);
            }
        }
        s += 1;
    }
    out
}
