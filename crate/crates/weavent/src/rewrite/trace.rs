//! Derivations, their colimits, permutation equivalence and the poset of trace classes.

use crate::domain::{DomainKind, FiniteDomain};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

use super::dpo::{apply_rule, find_matches, DirectDerivation, Grammar};
use super::graph::{GraphMorphism, TypedGraph};

pub const CEILING_VAR: &str = "WEAVENT_CLASS_CEILING";
pub const DEFAULT_CEILING: usize = 10_000;

/// A sequence of direct derivations from a fixed source graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub source: TypedGraph,
    pub steps: Vec<DirectDerivation>,
}

impl Derivation {
    pub fn empty(source: TypedGraph) -> Self {
        Derivation { source, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn target(&self) -> &TypedGraph {
        self.steps.last().map_or(&self.source, |s| &s.target)
    }

    pub fn rules(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn rule_names(&self, g: &Grammar) -> Vec<String> {
        self.steps.iter().map(|s| g.rules[s.rule].name.clone()).collect()
    }

    /// Appends one step of `rule` at `m`; `None` when the gluing condition fails.
    pub fn extended(&self, g: &Grammar, rule: usize, m: &GraphMorphism) -> Result<Option<Derivation>> {
        let prefix = format!("s{}.", self.len() + 1);
        let step = apply_rule(self.target(), &g.rules[rule], rule, m, &prefix)?;
        Ok(step.map(|s| {
            let mut d = self.clone();
            d.steps.push(s);
            d
        }))
    }

    /// Applies the named rules in order, each at its first usable match.
    pub fn by_rules(g: &Grammar, names: &[&str]) -> Result<Option<Derivation>> {
        let mut d = Derivation::empty(g.start.clone());
        for name in names {
            let r = g
                .rule_index(name)
                .ok_or_else(|| Error::InvalidRule(name.to_string(), "unknown rule".into()))?;
            let mut next = None;
            for m in find_matches(&g.rules[r], d.target()) {
                if let Some(e) = d.extended(g, r, &m)? {
                    next = Some(e);
                    break;
                }
            }
            match next {
                Some(e) => d = e,
                None => return Ok(None),
            }
        }
        Ok(Some(d))
    }

    pub fn is_fusion_safe(&self, g: &Grammar) -> bool {
        self.steps.iter().all(|s| s.is_fusion_safe(&g.rules[s.rule]))
    }
}

/// Colimit of `G0 ← D1 → G1 ← D2 → G2 ...` as a quotient of the disjoint union.
#[derive(Clone, Debug)]
pub struct Colimit {
    node_offset: Vec<usize>,
    edge_offset: Vec<usize>,
    node_class: Vec<usize>,
    edge_class: Vec<usize>,
    pub node_types: Vec<String>,
    pub edge_types: Vec<String>,
    pub edge_ends: Vec<(usize, usize)>,
}

impl Colimit {
    pub fn of(d: &Derivation) -> Colimit {
        let mut graphs: Vec<&TypedGraph> = vec![&d.source];
        for s in &d.steps {
            graphs.push(&s.context);
            graphs.push(&s.target);
        }
        let mut node_offset = Vec::new();
        let mut edge_offset = Vec::new();
        let (mut nn, mut ne) = (0, 0);
        for g in &graphs {
            node_offset.push(nn);
            edge_offset.push(ne);
            nn += g.node_count();
            ne += g.edge_count();
        }
        let mut un = UnionFind::new(nn);
        let mut ue = UnionFind::new(ne);
        for (i, s) in d.steps.iter().enumerate() {
            let (prev, ctx, next) = (2 * i, 2 * i + 1, 2 * i + 2);
            for (x, (&a, &b)) in s.context_in_source.nodes.iter().zip(&s.context_in_target.nodes).enumerate() {
                un.union(node_offset[ctx] + x, node_offset[prev] + a);
                un.union(node_offset[ctx] + x, node_offset[next] + b);
            }
            for (x, (&a, &b)) in s.context_in_source.edges.iter().zip(&s.context_in_target.edges).enumerate() {
                ue.union(edge_offset[ctx] + x, edge_offset[prev] + a);
                ue.union(edge_offset[ctx] + x, edge_offset[next] + b);
            }
        }
        let (node_class, nc) = un.classes();
        let (edge_class, ec) = ue.classes();
        let mut node_types = vec![String::new(); nc];
        let mut edge_types = vec![String::new(); ec];
        let mut edge_ends = vec![(0, 0); ec];
        for (gi, g) in graphs.iter().enumerate() {
            for (x, n) in g.nodes().iter().enumerate() {
                node_types[node_class[node_offset[gi] + x]] = n.ty.clone();
            }
            for (x, e) in g.edges().iter().enumerate() {
                let c = edge_class[edge_offset[gi] + x];
                edge_types[c] = e.ty.clone();
                edge_ends[c] = (
                    node_class[node_offset[gi] + e.src],
                    node_class[node_offset[gi] + e.tgt],
                );
            }
        }
        Colimit {
            node_offset,
            edge_offset,
            node_class,
            edge_class,
            node_types,
            edge_types,
            edge_ends,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_types.len()
    }

    /// Injection of node `x` of the `i`-th state graph (`G_i`).
    pub fn state_node(&self, i: usize, x: usize) -> usize {
        self.node_class[self.node_offset[2 * i] + x]
    }

    pub fn state_edge(&self, i: usize, x: usize) -> usize {
        self.edge_class[self.edge_offset[2 * i] + x]
    }
}

/// Partial bijection between colimit items, extended by constraints.
#[derive(Clone)]
struct PartialIso {
    fwd_n: Vec<Option<usize>>,
    bwd_n: Vec<Option<usize>>,
    fwd_e: Vec<Option<usize>>,
    bwd_e: Vec<Option<usize>>,
}

impl PartialIso {
    fn new(a: &Colimit, b: &Colimit) -> Self {
        PartialIso {
            fwd_n: vec![None; a.node_count()],
            bwd_n: vec![None; b.node_count()],
            fwd_e: vec![None; a.edge_count()],
            bwd_e: vec![None; b.edge_count()],
        }
    }

    fn bind(fwd: &mut [Option<usize>], bwd: &mut [Option<usize>], x: usize, y: usize) -> bool {
        match (fwd[x], bwd[y]) {
            (None, None) => {
                fwd[x] = Some(y);
                bwd[y] = Some(x);
                true
            }
            (Some(a), Some(b)) => a == y && b == x,
            _ => false,
        }
    }

    fn node(&mut self, x: usize, y: usize) -> bool {
        Self::bind(&mut self.fwd_n, &mut self.bwd_n, x, y)
    }

    fn edge(&mut self, x: usize, y: usize) -> bool {
        Self::bind(&mut self.fwd_e, &mut self.bwd_e, x, y)
    }

    fn is_iso(&self, a: &Colimit, b: &Colimit) -> bool {
        if self.fwd_n.iter().any(Option::is_none) || self.fwd_e.iter().any(Option::is_none) {
            return false;
        }
        if self.bwd_n.iter().any(Option::is_none) || self.bwd_e.iter().any(Option::is_none) {
            return false;
        }
        let n = |x: usize| self.fwd_n[x].unwrap();
        (0..a.node_count()).all(|x| a.node_types[x] == b.node_types[n(x)])
            && (0..a.edge_count()).all(|x| {
                let y = self.fwd_e[x].unwrap();
                let (s, t) = a.edge_ends[x];
                a.edge_types[x] == b.edge_types[y] && b.edge_ends[y] == (n(s), n(t))
            })
    }
}

/// A left-consistent permutation from `a` to `b`: step `i` of `a` corresponds to step `σ[i]` of `b`.
/// Both derivations must start from the same source graph; the colimit isomorphism is
/// forced by the source identity and the match images.
pub fn equivalent_traces(a: &Derivation, b: &Derivation) -> Option<Vec<usize>> {
    equivalent_with(a, &Colimit::of(a), b, &Colimit::of(b))
}

fn equivalent_with(a: &Derivation, ca: &Colimit, b: &Derivation, cb: &Colimit) -> Option<Vec<usize>> {
    if a.len() != b.len() || a.source != b.source {
        return None;
    }
    if ca.node_count() != cb.node_count() || ca.edge_count() != cb.edge_count() {
        return None;
    }
    let mut iso = PartialIso::new(ca, cb);
    for x in 0..a.source.node_count() {
        if !iso.node(ca.state_node(0, x), cb.state_node(0, x)) {
            return None;
        }
    }
    for x in 0..a.source.edge_count() {
        if !iso.edge(ca.state_edge(0, x), cb.state_edge(0, x)) {
            return None;
        }
    }
    let mut sigma = Vec::new();
    let mut used = vec![false; b.len()];
    if permute(a, ca, b, cb, &mut sigma, &mut used, iso) {
        Some(sigma)
    } else {
        None
    }
}

fn bind_step(iso: &mut PartialIso, a: &Derivation, ca: &Colimit, i: usize, b: &Derivation, cb: &Colimit, j: usize) -> bool {
    let (s, t) = (&a.steps[i], &b.steps[j]);
    let ml = s.match_l.nodes.iter().zip(&t.match_l.nodes);
    for (&x, &y) in ml {
        if !iso.node(ca.state_node(i, x), cb.state_node(j, y)) {
            return false;
        }
    }
    for (&x, &y) in s.match_l.edges.iter().zip(&t.match_l.edges) {
        if !iso.edge(ca.state_edge(i, x), cb.state_edge(j, y)) {
            return false;
        }
    }
    for (&x, &y) in s.match_r.nodes.iter().zip(&t.match_r.nodes) {
        if !iso.node(ca.state_node(i + 1, x), cb.state_node(j + 1, y)) {
            return false;
        }
    }
    for (&x, &y) in s.match_r.edges.iter().zip(&t.match_r.edges) {
        if !iso.edge(ca.state_edge(i + 1, x), cb.state_edge(j + 1, y)) {
            return false;
        }
    }
    true
}

fn permute(
    a: &Derivation,
    ca: &Colimit,
    b: &Derivation,
    cb: &Colimit,
    sigma: &mut Vec<usize>,
    used: &mut [bool],
    iso: PartialIso,
) -> bool {
    let i = sigma.len();
    if i == a.len() {
        return iso.is_iso(ca, cb);
    }
    for j in 0..b.len() {
        if used[j] || a.steps[i].rule != b.steps[j].rule {
            continue;
        }
        let mut next = iso.clone();
        if !bind_step(&mut next, a, ca, i, b, cb, j) {
            continue;
        }
        used[j] = true;
        sigma.push(j);
        if permute(a, ca, b, cb, sigma, used, next) {
            return true;
        }
        sigma.pop();
        used[j] = false;
    }
    false
}

/// The poset of trace classes up to a depth, with one representative per element.
#[derive(Clone, Debug)]
pub struct TraceDomain {
    pub domain: FiniteDomain,
    pub representatives: Vec<Derivation>,
}

pub fn class_ceiling() -> usize {
    std::env::var(CEILING_VAR)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_CEILING)
}

/// Enumerates derivations from the start graph of length at most `depth`, merging those
/// related by a left-consistent permutation, ordered by prefix extension.
pub fn trace_domain(g: &Grammar, depth: usize, fusion_safe: bool) -> Result<TraceDomain> {
    trace_domain_with_ceiling(g, depth, fusion_safe, class_ceiling())
}

pub fn trace_domain_with_ceiling(g: &Grammar, depth: usize, fusion_safe: bool, ceiling: usize) -> Result<TraceDomain> {
    let mut reps = vec![Derivation::empty(g.start.clone())];
    let mut colimits = vec![Colimit::of(&reps[0])];
    let mut keys: Vec<Vec<usize>> = vec![Vec::new()];
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut level = vec![0usize];
    for _ in 0..depth {
        let mut next_level = Vec::new();
        for &c in &level {
            let base = reps[c].clone();
            for (ri, rule) in g.rules.iter().enumerate() {
                for m in find_matches(rule, base.target()) {
                    let Some(ext) = base.extended(g, ri, &m)? else { continue };
                    if fusion_safe && !ext.steps.last().unwrap().is_fusion_safe(rule) {
                        continue;
                    }
                    let mut key = ext.rules();
                    key.sort();
                    let col = Colimit::of(&ext);
                    let found = next_level
                        .iter()
                        .copied()
                        .find(|&k: &usize| keys[k] == key && equivalent_with(&ext, &col, &reps[k], &colimits[k]).is_some());
                    let target = match found {
                        Some(k) => k,
                        None => {
                            if reps.len() >= ceiling {
                                return Err(Error::CeilingExceeded(ceiling));
                            }
                            reps.push(ext);
                            colimits.push(col);
                            keys.push(key);
                            next_level.push(reps.len() - 1);
                            reps.len() - 1
                        }
                    };
                    if !order.contains(&(c, target)) {
                        order.push((c, target));
                    }
                }
            }
        }
        if next_level.is_empty() {
            break;
        }
        level = next_level;
    }
    let mut names: Vec<String> = Vec::with_capacity(reps.len());
    for r in &reps {
        let base = if r.is_empty() {
            "ε".to_string()
        } else {
            r.rule_names(g).join(";")
        };
        let mut name = base.clone();
        let mut k = 1;
        while names.contains(&name) {
            k += 1;
            name = format!("{base}#{k}");
        }
        names.push(name);
    }
    let domain = FiniteDomain::new(names, &order, DomainKind::Coherent)?;
    Ok(TraceDomain {
        domain,
        representatives: reps,
    })
}
