//! Double-pushout rules with possibly non-injective right-hand morphisms.

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

use super::graph::{search_morphisms, GraphMorphism, SearchOptions, TypedGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub lhs: TypedGraph,
    pub interface: TypedGraph,
    pub rhs: TypedGraph,
    /// `K → L`, injective and not surjective.
    pub l: GraphMorphism,
    /// `K → R`, arbitrary.
    pub r: GraphMorphism,
}

impl Rule {
    pub fn new(
        name: String,
        lhs: TypedGraph,
        interface: TypedGraph,
        rhs: TypedGraph,
        l: GraphMorphism,
        r: GraphMorphism,
    ) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidRule(name.clone(), msg.to_string());
        interface
            .check_morphism(&lhs, &l)
            .map_err(|e| bad(&format!("left morphism: {e}")))?;
        interface
            .check_morphism(&rhs, &r)
            .map_err(|e| bad(&format!("right morphism: {e}")))?;
        if !l.is_injective() {
            return Err(bad("left morphism must be injective"));
        }
        if l.is_surjective(&lhs) {
            return Err(bad("rule must delete something"));
        }
        Ok(Rule {
            name,
            lhs,
            interface,
            rhs,
            l,
            r,
        })
    }

    pub fn is_right_linear(&self) -> bool {
        self.r.is_injective()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub type_graph: TypedGraph,
    pub start: TypedGraph,
    pub rules: Vec<Rule>,
}

impl Grammar {
    pub fn new(type_graph: TypedGraph, start: TypedGraph, rules: Vec<Rule>) -> Result<Self> {
        if !type_graph.is_self_typed() {
            return Err(Error::InvalidGraph("type graph items must be typed by themselves".into()));
        }
        type_graph.check_typed_over(&type_graph)?;
        start.check_typed_over(&type_graph)?;
        for (k, r) in rules.iter().enumerate() {
            for g in [&r.lhs, &r.interface, &r.rhs] {
                g.check_typed_over(&type_graph)
                    .map_err(|e| Error::InvalidRule(r.name.clone(), e.to_string()))?;
            }
            if rules[..k].iter().any(|o| o.name == r.name) {
                return Err(Error::DuplicateId(r.name.clone()));
            }
        }
        Ok(Grammar {
            type_graph,
            start,
            rules,
        })
    }

    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }
}

/// `G ← D → H` with the matches `L → G`, `K → D`, `R → H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectDerivation {
    pub rule: usize,
    pub source: TypedGraph,
    pub context: TypedGraph,
    pub target: TypedGraph,
    pub match_l: GraphMorphism,
    pub match_k: GraphMorphism,
    pub match_r: GraphMorphism,
    /// `l*: D → G`.
    pub context_in_source: GraphMorphism,
    /// `r*: D → H`.
    pub context_in_target: GraphMorphism,
}

/// All matches of the rule's left-hand side in `g`.
pub fn find_matches(rule: &Rule, g: &TypedGraph) -> Vec<GraphMorphism> {
    search_morphisms(&rule.lhs, g, &SearchOptions::default())
}

/// Why a match cannot be used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GluingFailure {
    /// A deleted item is identified with another item of the left-hand side.
    Identification(String),
    /// A deleted node keeps an incident edge that is not deleted.
    Dangling(String),
}

/// Items of the left-hand side outside the image of `l`.
fn deleted(rule: &Rule) -> (Vec<bool>, Vec<bool>) {
    let mut dn = vec![true; rule.lhs.node_count()];
    let mut de = vec![true; rule.lhs.edge_count()];
    for &x in &rule.l.nodes {
        dn[x] = false;
    }
    for &x in &rule.l.edges {
        de[x] = false;
    }
    (dn, de)
}

pub fn gluing_failure(g: &TypedGraph, rule: &Rule, m: &GraphMorphism) -> Option<GluingFailure> {
    let (dn, de) = deleted(rule);
    for x in 0..dn.len() {
        if dn[x] && (0..dn.len()).any(|y| y != x && m.nodes[y] == m.nodes[x]) {
            return Some(GluingFailure::Identification(rule.lhs.nodes()[x].id.clone()));
        }
    }
    for x in 0..de.len() {
        if de[x] && (0..de.len()).any(|y| y != x && m.edges[y] == m.edges[x]) {
            return Some(GluingFailure::Identification(rule.lhs.edges()[x].id.clone()));
        }
    }
    let del_nodes: Vec<usize> = (0..dn.len()).filter(|&x| dn[x]).map(|x| m.nodes[x]).collect();
    let del_edges: Vec<usize> = (0..de.len()).filter(|&x| de[x]).map(|x| m.edges[x]).collect();
    for (ei, e) in g.edges().iter().enumerate() {
        if !del_edges.contains(&ei) && (del_nodes.contains(&e.src) || del_nodes.contains(&e.tgt)) {
            return Some(GluingFailure::Dangling(e.id.clone()));
        }
    }
    None
}

/// Applies `rule` at `m`; created items get ids `{prefix}{id in R}`.
/// Returns `None` when the gluing condition fails.
pub fn apply_rule(g: &TypedGraph, rule: &Rule, rule_index: usize, m: &GraphMorphism, prefix: &str) -> Result<Option<DirectDerivation>> {
    rule.lhs.check_morphism(g, m)?;
    if gluing_failure(g, rule, m).is_some() {
        return Ok(None);
    }
    let (dn, de) = deleted(rule);
    let del_nodes: Vec<usize> = (0..dn.len()).filter(|&x| dn[x]).map(|x| m.nodes[x]).collect();
    let del_edges: Vec<usize> = (0..de.len()).filter(|&x| de[x]).map(|x| m.edges[x]).collect();

    let keep_nodes: Vec<usize> = (0..g.node_count()).filter(|x| !del_nodes.contains(x)).collect();
    let keep_edges: Vec<usize> = (0..g.edge_count()).filter(|x| !del_edges.contains(x)).collect();
    let context = TypedGraph::from_parts(
        keep_nodes.iter().map(|&x| (g.nodes()[x].id.clone(), g.nodes()[x].ty.clone())).collect(),
        keep_edges
            .iter()
            .map(|&x| {
                let e = &g.edges()[x];
                (e.id.clone(), e.ty.clone(), g.nodes()[e.src].id.clone(), g.nodes()[e.tgt].id.clone())
            })
            .collect(),
    )?;
    let context_in_source = GraphMorphism {
        nodes: keep_nodes.clone(),
        edges: keep_edges.clone(),
    };
    let pos = |v: &[usize], x: usize| v.iter().position(|&y| y == x).expect("kept item");
    let match_k = GraphMorphism {
        nodes: rule.l.nodes.iter().map(|&x| pos(&keep_nodes, m.nodes[x])).collect(),
        edges: rule.l.edges.iter().map(|&x| pos(&keep_edges, m.edges[x])).collect(),
    };

    let (target, context_in_target, match_r) = glue(&context, &rule.rhs, &rule.interface, &match_k, &rule.r, prefix)?;
    Ok(Some(DirectDerivation {
        rule: rule_index,
        source: g.clone(),
        context,
        target,
        match_l: m.clone(),
        match_k,
        match_r,
        context_in_source,
        context_in_target,
    }))
}

/// Pushout of `D ← K → R` as the quotient of `D ⊎ R`.
fn glue(
    d: &TypedGraph,
    r: &TypedGraph,
    k: &TypedGraph,
    k_to_d: &GraphMorphism,
    k_to_r: &GraphMorphism,
    prefix: &str,
) -> Result<(TypedGraph, GraphMorphism, GraphMorphism)> {
    let (nd, nr) = (d.node_count(), r.node_count());
    let mut un = UnionFind::new(nd + nr);
    for x in 0..k.node_count() {
        un.union(k_to_d.nodes[x], nd + k_to_r.nodes[x]);
    }
    let (ed, er) = (d.edge_count(), r.edge_count());
    let mut ue = UnionFind::new(ed + er);
    for x in 0..k.edge_count() {
        ue.union(k_to_d.edges[x], ed + k_to_r.edges[x]);
    }
    let (ncls, nn) = un.classes();
    let (ecls, ne) = ue.classes();

    let used: std::collections::HashSet<&str> = d
        .nodes()
        .iter()
        .map(|n| n.id.as_str())
        .chain(d.edges().iter().map(|e| e.id.as_str()))
        .collect();
    let fresh = |base: String| {
        let mut id = base;
        while used.contains(id.as_str()) {
            id.push('\'');
        }
        id
    };
    let name_class = |cls: &[usize], count: usize, split: usize, left: &dyn Fn(usize) -> String, right: &dyn Fn(usize) -> String| {
        let mut names: Vec<Option<String>> = vec![None; count];
        for (i, &c) in cls.iter().enumerate().take(split) {
            let id = left(i);
            if names[c].as_ref().is_none_or(|cur| id < *cur) {
                names[c] = Some(id);
            }
        }
        let mut created: Vec<Option<String>> = vec![None; count];
        for (i, &c) in cls.iter().enumerate().skip(split) {
            let id = right(i - split);
            if created[c].as_ref().is_none_or(|cur| id < *cur) {
                created[c] = Some(id);
            }
        }
        names
            .into_iter()
            .zip(created)
            .map(|(a, b)| a.unwrap_or_else(|| fresh(format!("{prefix}{}", b.expect("class member")))))
            .collect::<Vec<String>>()
    };
    let node_names = name_class(&ncls, nn, nd, &|i| d.nodes()[i].id.clone(), &|i| r.nodes()[i].id.clone());
    let edge_names = name_class(&ecls, ne, ed, &|i| d.edges()[i].id.clone(), &|i| r.edges()[i].id.clone());

    let mut node_ty = vec![String::new(); nn];
    for (i, &c) in ncls.iter().enumerate() {
        node_ty[c] = if i < nd { d.nodes()[i].ty.clone() } else { r.nodes()[i - nd].ty.clone() };
    }
    let mut edges = vec![(String::new(), String::new(), String::new(), String::new()); ne];
    for (i, &c) in ecls.iter().enumerate() {
        let (ty, s, t) = if i < ed {
            let e = &d.edges()[i];
            (e.ty.clone(), ncls[e.src], ncls[e.tgt])
        } else {
            let e = &r.edges()[i - ed];
            (e.ty.clone(), ncls[nd + e.src], ncls[nd + e.tgt])
        };
        edges[c] = (edge_names[c].clone(), ty, node_names[s].clone(), node_names[t].clone());
    }
    let h = TypedGraph::from_parts(
        node_names.iter().cloned().zip(node_ty).collect(),
        edges,
    )?;
    let nidx = |c: usize| h.node_index(&node_names[c]).expect("node");
    let eidx = |c: usize| h.edge_index(&edge_names[c]).expect("edge");
    let d_to_h = GraphMorphism {
        nodes: (0..nd).map(|i| nidx(ncls[i])).collect(),
        edges: (0..ed).map(|i| eidx(ecls[i])).collect(),
    };
    let r_to_h = GraphMorphism {
        nodes: (0..nr).map(|i| nidx(ncls[nd + i])).collect(),
        edges: (0..er).map(|i| eidx(ecls[ed + i])).collect(),
    };
    Ok((h, d_to_h, r_to_h))
}

/// Checks that `p` with `a: A → P`, `b: B → P` is a pushout of `f: K → A`, `g: K → B`:
/// the square commutes and `P` is in bijection with `(A ⊎ B)` modulo the span.
#[allow(clippy::too_many_arguments)]
pub fn verify_pushout(
    k: &TypedGraph,
    a: &TypedGraph,
    b: &TypedGraph,
    p: &TypedGraph,
    f: &GraphMorphism,
    g: &GraphMorphism,
    a_to_p: &GraphMorphism,
    b_to_p: &GraphMorphism,
) -> bool {
    if k.check_morphism(a, f).is_err()
        || k.check_morphism(b, g).is_err()
        || a.check_morphism(p, a_to_p).is_err()
        || b.check_morphism(p, b_to_p).is_err()
    {
        return false;
    }
    if f.compose(a_to_p) != g.compose(b_to_p) {
        return false;
    }
    let part = |na: usize, nb: usize, nk: usize, np: usize, fk: &[usize], gk: &[usize], ap: &[usize], bp: &[usize]| {
        let mut uf = UnionFind::new(na + nb);
        for x in 0..nk {
            uf.union(fk[x], na + gk[x]);
        }
        let (cls, count) = uf.classes();
        let mut img = vec![None; count];
        for (i, &c) in cls.iter().enumerate() {
            let t = if i < na { ap[i] } else { bp[i - na] };
            match img[c] {
                None => img[c] = Some(t),
                Some(prev) if prev != t => return false,
                _ => {}
            }
        }
        let mut hit = vec![false; np];
        for t in img.into_iter().flatten() {
            if hit[t] {
                return false;
            }
            hit[t] = true;
        }
        hit.into_iter().all(|h| h)
    };
    part(a.node_count(), b.node_count(), k.node_count(), p.node_count(), &f.nodes, &g.nodes, &a_to_p.nodes, &b_to_p.nodes)
        && part(a.edge_count(), b.edge_count(), k.edge_count(), p.edge_count(), &f.edges, &g.edges, &a_to_p.edges, &b_to_p.edges)
}

impl DirectDerivation {
    /// Both squares are pushouts.
    pub fn verify(&self, rule: &Rule) -> bool {
        verify_pushout(
            &rule.interface,
            &rule.lhs,
            &self.context,
            &self.source,
            &rule.l,
            &self.match_k,
            &self.match_l,
            &self.context_in_source,
        ) && verify_pushout(
            &rule.interface,
            &rule.rhs,
            &self.context,
            &self.target,
            &rule.r,
            &self.match_k,
            &self.match_r,
            &self.context_in_target,
        )
    }

    /// `⟨l; mL, r⟩` is jointly injective on nodes and on edges.
    pub fn is_fusion_safe(&self, rule: &Rule) -> bool {
        let lm = rule.l.compose(&self.match_l);
        let jm = |a: &[usize], b: &[usize]| {
            (0..a.len()).all(|x| (x + 1..a.len()).all(|y| a[x] != a[y] || b[x] != b[y]))
        };
        jm(&lm.nodes, &rule.r.nodes) && jm(&lm.edges, &rule.r.edges)
    }
}

/// Witnesses `i1: R1 → D2` and `i2: L2 → D1` of sequential independence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependencePair {
    pub i1: GraphMorphism,
    pub i2: GraphMorphism,
}

/// The first independence pair of consecutive steps, if any.
pub fn sequential_independence(
    d1: &DirectDerivation,
    d2: &DirectDerivation,
    rules: &[Rule],
) -> Option<IndependencePair> {
    let (r1, r2) = (&rules[d1.rule], &rules[d2.rule]);
    let inv = |v: &[usize], x: usize| v.iter().position(|&y| y == x);
    let l2 = &d2.context_in_source;
    let nodes: Option<Vec<usize>> = d1.match_r.nodes.iter().map(|&x| inv(&l2.nodes, x)).collect();
    let edges: Option<Vec<usize>> = d1.match_r.edges.iter().map(|&x| inv(&l2.edges, x)).collect();
    let i1 = GraphMorphism {
        nodes: nodes?,
        edges: edges?,
    };
    debug_assert!(r1.rhs.check_morphism(&d2.context, &i1).is_ok());
    let r1s = &d1.context_in_target;
    let node_ok = |x: usize, y: usize| r1s.nodes[y] == d2.match_l.nodes[x];
    let edge_ok = |x: usize, y: usize| r1s.edges[y] == d2.match_l.edges[x];
    let opts = SearchOptions {
        injective: false,
        limit: Some(1),
        node_allowed: Some(&node_ok),
        edge_allowed: Some(&edge_ok),
    };
    let i2 = search_morphisms(&r2.lhs, &d1.context, &opts).into_iter().next()?;
    Some(IndependencePair { i1, i2 })
}

/// Swaps two sequentially independent steps: the second rule is applied first at
/// `l1* ∘ i2`, then the first rule at the induced match.
pub fn interchange(
    d1: &DirectDerivation,
    d2: &DirectDerivation,
    pair: &IndependencePair,
    rules: &[Rule],
    prefix: &str,
) -> Result<(DirectDerivation, DirectDerivation)> {
    let (r1, r2) = (&rules[d1.rule], &rules[d2.rule]);
    r2.lhs
        .check_morphism(&d1.context, &pair.i2)
        .map_err(|_| Error::InvalidMorphism("i2 is not a morphism into the first context".into()))?;
    let m2 = pair.i2.compose(&d1.context_in_source);
    let first = apply_rule(&d1.source, r2, d2.rule, &m2, &format!("{prefix}1."))?
        .ok_or_else(|| Error::InvalidMorphism("second rule is not applicable first".into()))?;
    let inv = |v: &[usize], x: usize| v.iter().position(|&y| y == x);
    let l2s = &first.context_in_source;
    let r2s = &first.context_in_target;
    let nodes: Option<Vec<usize>> = d1
        .match_l
        .nodes
        .iter()
        .map(|&x| inv(&l2s.nodes, x).map(|y| r2s.nodes[y]))
        .collect();
    let edges: Option<Vec<usize>> = d1
        .match_l
        .edges
        .iter()
        .map(|&x| inv(&l2s.edges, x).map(|y| r2s.edges[y]))
        .collect();
    let (Some(nodes), Some(edges)) = (nodes, edges) else {
        return Err(Error::InvalidMorphism("the first match is consumed by the second rule".into()));
    };
    let m1 = GraphMorphism { nodes, edges };
    let second = apply_rule(&first.target, r1, d1.rule, &m1, &format!("{prefix}2."))?
        .ok_or_else(|| Error::InvalidMorphism("first rule is not applicable second".into()))?;
    Ok((first, second))
}
