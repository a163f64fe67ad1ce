//! A grammar whose trace domain is the configuration domain of a connected event structure.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::es::{bit, members, EventSet, EventStructure};

use super::dpo::{Grammar, Rule};
use super::graph::{GraphMorphism, TypedGraph};

type Nodes = Vec<(String, String)>;
type Edges = Vec<(String, String, String, String)>;

/// Sets obtained by picking one event from each minimal enabling, deduplicated.
pub fn enabling_product(es: &EventStructure, e: usize) -> Vec<EventSet> {
    let mut acc: BTreeSet<EventSet> = BTreeSet::from([0]);
    for m in es.minimal_enablings(e) {
        acc = acc
            .iter()
            .flat_map(|&s| members(m).map(move |x| s | bit(x)))
            .collect();
    }
    if es.minimal_enablings(e).contains(&0) {
        acc.clear();
    }
    let mut out: Vec<EventSet> = acc.into_iter().collect();
    out.sort_by_key(|&s| label(es, s));
    out
}

fn label(es: &EventStructure, u: EventSet) -> String {
    let mut ns: Vec<&str> = members(u).map(|x| es.name(x)).collect();
    ns.sort();
    format!("({})", ns.join(","))
}

fn loop_type(es: &EventStructure, e: usize, u: EventSet) -> String {
    format!("{}/{}", es.name(e), label(es, u))
}

fn conflict_type(es: &EventStructure, a: usize, b: usize) -> String {
    let (x, y) = (es.name(a), es.name(b));
    if x < y {
        format!("{x}#{y}")
    } else {
        format!("{y}#{x}")
    }
}

fn morphism_by_ids(from: &TypedGraph, to: &TypedGraph, node: impl Fn(&str) -> String) -> GraphMorphism {
    GraphMorphism {
        nodes: from
            .nodes()
            .iter()
            .map(|n| to.node_index(&node(&n.id)).expect("node image"))
            .collect(),
        edges: from
            .edges()
            .iter()
            .map(|e| to.edge_index(&e.id).expect("edge image"))
            .collect(),
    }
}

/// One rule per event: it deletes the event's token node and its conflict nodes,
/// needs the event's slot merged with all its enabling slots, and merges into each
/// later event's slot every enabling slot mentioning this event.
pub fn grammar_from_es(es: &EventStructure) -> Result<Grammar> {
    if !es.is_binary() {
        return Err(Error::InvalidEs("grammar synthesis needs binary conflict".into()));
    }
    if let Some(issue) = es.liveness_issues().into_iter().next() {
        return Err(Error::NotLive(issue));
    }
    let class = es.classify();
    if !class.connected {
        return Err(Error::NotConnected("grammar synthesis needs a connected event structure".into()));
    }
    let n = es.len();
    let pmin: Vec<Vec<EventSet>> = (0..n).map(|e| enabling_product(es, e)).collect();
    let conflicts = es.conflict_pairs();

    let mut t_nodes: Nodes = Vec::new();
    let mut t_edges: Edges = Vec::new();
    let mut s_nodes: Nodes = Vec::new();
    let mut s_edges: Edges = Vec::new();
    for e in 0..n {
        let name = es.name(e).to_string();
        let token = format!("i_{name}");
        t_nodes.push((token.clone(), token.clone()));
        t_nodes.push((name.clone(), name.clone()));
        t_edges.push((name.clone(), name.clone(), name.clone(), name.clone()));
        s_nodes.push((format!("I_{name}"), token));
        s_nodes.push((format!("S_{name}"), name.clone()));
        s_edges.push((format!("s_{name}"), name.clone(), format!("S_{name}"), format!("S_{name}")));
        for &u in &pmin[e] {
            let ty = loop_type(es, e, u);
            t_edges.push((ty.clone(), ty.clone(), name.clone(), name.clone()));
            s_nodes.push((format!("L_{ty}"), name.clone()));
            s_edges.push((format!("l_{ty}"), ty, format!("L_{}", loop_type(es, e, u)), format!("L_{}", loop_type(es, e, u))));
        }
    }
    for &(a, b) in &conflicts {
        let ty = conflict_type(es, a, b);
        t_nodes.push((ty.clone(), ty.clone()));
        s_nodes.push((format!("C_{ty}"), ty));
    }
    let type_graph = TypedGraph::from_parts(t_nodes, t_edges)?;
    let start = TypedGraph::from_parts(s_nodes, s_edges)?;

    let mut rules = Vec::with_capacity(n);
    for e in 0..n {
        let name = es.name(e).to_string();
        let mut keep_nodes: Nodes = vec![(format!("S_{name}"), name.clone())];
        let mut keep_edges: Edges = vec![(format!("s_{name}"), name.clone(), format!("S_{name}"), format!("S_{name}"))];
        for &u in &pmin[e] {
            let ty = loop_type(es, e, u);
            keep_edges.push((format!("l_{ty}"), ty, format!("S_{name}"), format!("S_{name}")));
        }
        let mut rhs_nodes = keep_nodes.clone();
        let mut rhs_edges = keep_edges.clone();
        let mut merged_into: Vec<(String, String)> = Vec::new();
        for f in 0..n {
            let mentions: Vec<EventSet> = pmin[f].iter().copied().filter(|&u| u & bit(e) != 0).collect();
            if f == e || mentions.is_empty() {
                continue;
            }
            let fname = es.name(f).to_string();
            let slot = format!("S_{fname}");
            keep_nodes.push((slot.clone(), fname.clone()));
            keep_edges.push((format!("s_{fname}"), fname.clone(), slot.clone(), slot.clone()));
            rhs_nodes.push((slot.clone(), fname.clone()));
            rhs_edges.push((format!("s_{fname}"), fname.clone(), slot.clone(), slot.clone()));
            for u in mentions {
                let ty = loop_type(es, f, u);
                let lnode = format!("L_{ty}");
                keep_nodes.push((lnode.clone(), fname.clone()));
                keep_edges.push((format!("l_{ty}"), ty.clone(), lnode.clone(), lnode.clone()));
                rhs_edges.push((format!("l_{ty}"), ty, slot.clone(), slot.clone()));
                merged_into.push((lnode, slot.clone()));
            }
        }
        let mut lhs_nodes = keep_nodes.clone();
        lhs_nodes.push((format!("I_{name}"), format!("i_{name}")));
        for &(a, b) in &conflicts {
            if a == e || b == e {
                let ty = conflict_type(es, a, b);
                lhs_nodes.push((format!("C_{ty}"), ty));
            }
        }
        let lhs = TypedGraph::from_parts(lhs_nodes, keep_edges.clone())?;
        let interface = TypedGraph::from_parts(keep_nodes, keep_edges)?;
        let rhs = TypedGraph::from_parts(rhs_nodes, rhs_edges)?;
        let l = morphism_by_ids(&interface, &lhs, |id| id.to_string());
        let r = morphism_by_ids(&interface, &rhs, |id| {
            merged_into
                .iter()
                .find(|(from, _)| from == id)
                .map_or_else(|| id.to_string(), |(_, to)| to.clone())
        });
        rules.push(Rule::new(name, lhs, interface, rhs, l, r)?);
    }
    Grammar::new(type_graph, start, rules)
}
