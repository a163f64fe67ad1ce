//! Typed graphs and morphism search.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ty: String,
    pub src: usize,
    pub tgt: usize,
}

/// A graph whose items carry the id of their type in a fixed type graph.
/// Nodes and edges are kept sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TypedGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

/// Node and edge maps between two graphs, by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphMorphism {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl TypedGraph {
    /// Builds from `(id, type)` nodes and `(id, type, src id, tgt id)` edges.
    pub fn from_parts(nodes: Vec<(String, String)>, edges: Vec<(String, String, String, String)>) -> Result<Self> {
        let mut ns: Vec<Node> = nodes.into_iter().map(|(id, ty)| Node { id, ty }).collect();
        ns.sort_by(|a, b| a.id.cmp(&b.id));
        for w in ns.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateId(w[0].id.clone()));
            }
        }
        let pos: HashMap<&str, usize> = ns.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut es = Vec::with_capacity(edges.len());
        for (id, ty, s, t) in edges {
            let src = *pos
                .get(s.as_str())
                .ok_or_else(|| Error::InvalidGraph(format!("edge `{id}` has unknown source `{s}`")))?;
            let tgt = *pos
                .get(t.as_str())
                .ok_or_else(|| Error::InvalidGraph(format!("edge `{id}` has unknown target `{t}`")))?;
            es.push(Edge { id, ty, src, tgt });
        }
        es.sort_by(|a, b| a.id.cmp(&b.id));
        for w in es.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateId(w[0].id.clone()));
            }
        }
        Ok(TypedGraph { nodes: ns, edges: es })
    }

    /// Convenience builder from string slices.
    pub fn build(nodes: &[(&str, &str)], edges: &[(&str, &str, &str, &str)]) -> Result<Self> {
        Self::from_parts(
            nodes.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            edges
                .iter()
                .map(|(a, b, c, d)| (a.to_string(), b.to_string(), c.to_string(), d.to_string()))
                .collect(),
        )
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.id.as_str().cmp(id)).ok()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    /// The graph typed over itself, as used for type graphs.
    pub fn is_self_typed(&self) -> bool {
        self.nodes.iter().all(|n| n.id == n.ty) && self.edges.iter().all(|e| e.id == e.ty)
    }

    /// Checks that types exist in `t` and that typing commutes with source and target.
    pub fn check_typed_over(&self, t: &TypedGraph) -> Result<()> {
        for n in &self.nodes {
            if t.node_index(&n.ty).is_none() {
                return Err(Error::InvalidGraph(format!("node `{}` has unknown type `{}`", n.id, n.ty)));
            }
        }
        for e in &self.edges {
            let te = t
                .edge_index(&e.ty)
                .ok_or_else(|| Error::InvalidGraph(format!("edge `{}` has unknown type `{}`", e.id, e.ty)))?;
            let te = &t.edges[te];
            if t.nodes[te.src].id != self.nodes[e.src].ty || t.nodes[te.tgt].id != self.nodes[e.tgt].ty {
                return Err(Error::InvalidGraph(format!(
                    "edge `{}` endpoints do not match its type `{}`",
                    e.id, e.ty
                )));
            }
        }
        Ok(())
    }

    /// Checks that `m` is a typed graph morphism from `self` to `to`.
    pub fn check_morphism(&self, to: &TypedGraph, m: &GraphMorphism) -> Result<()> {
        if m.nodes.len() != self.nodes.len() || m.edges.len() != self.edges.len() {
            return Err(Error::InvalidMorphism("map is not total".into()));
        }
        for (i, &x) in m.nodes.iter().enumerate() {
            if x >= to.nodes.len() || to.nodes[x].ty != self.nodes[i].ty {
                return Err(Error::InvalidMorphism(format!("node `{}` is mapped badly", self.nodes[i].id)));
            }
        }
        for (i, &x) in m.edges.iter().enumerate() {
            let e = &self.edges[i];
            let ok = x < to.edges.len()
                && to.edges[x].ty == e.ty
                && to.edges[x].src == m.nodes[e.src]
                && to.edges[x].tgt == m.nodes[e.tgt];
            if !ok {
                return Err(Error::InvalidMorphism(format!("edge `{}` is mapped badly", e.id)));
            }
        }
        Ok(())
    }

    pub fn identity(&self) -> GraphMorphism {
        GraphMorphism {
            nodes: (0..self.nodes.len()).collect(),
            edges: (0..self.edges.len()).collect(),
        }
    }
}

impl GraphMorphism {
    pub fn compose(&self, then: &GraphMorphism) -> GraphMorphism {
        GraphMorphism {
            nodes: self.nodes.iter().map(|&x| then.nodes[x]).collect(),
            edges: self.edges.iter().map(|&x| then.edges[x]).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        fn inj(v: &[usize]) -> bool {
            let mut s = v.to_vec();
            s.sort();
            s.windows(2).all(|w| w[0] != w[1])
        }
        inj(&self.nodes) && inj(&self.edges)
    }

    pub fn is_surjective(&self, to: &TypedGraph) -> bool {
        (0..to.node_count()).all(|x| self.nodes.contains(&x)) && (0..to.edge_count()).all(|x| self.edges.contains(&x))
    }
}

/// Restrictions on a morphism search.
#[derive(Default)]
pub struct SearchOptions<'a> {
    pub injective: bool,
    pub limit: Option<usize>,
    pub node_allowed: Option<&'a dyn Fn(usize, usize) -> bool>,
    pub edge_allowed: Option<&'a dyn Fn(usize, usize) -> bool>,
}

/// All typed morphisms `from → to` meeting the options, in lexicographic order of images.
pub fn search_morphisms(from: &TypedGraph, to: &TypedGraph, opts: &SearchOptions) -> Vec<GraphMorphism> {
    let n = from.node_count();
    let node_cands: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..to.node_count())
                .filter(|&x| to.nodes[x].ty == from.nodes[i].ty)
                .filter(|&x| opts.node_allowed.is_none_or(|f| f(i, x)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut nodes = Vec::with_capacity(n);
    let mut used = vec![false; to.node_count()];
    assign_nodes(from, to, opts, &node_cands, &mut nodes, &mut used, &mut out);
    out
}

fn assign_nodes(
    from: &TypedGraph,
    to: &TypedGraph,
    opts: &SearchOptions,
    cands: &[Vec<usize>],
    nodes: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<GraphMorphism>,
) {
    if opts.limit.is_some_and(|l| out.len() >= l) {
        return;
    }
    let k = nodes.len();
    if k == cands.len() {
        let mut edges = Vec::with_capacity(from.edge_count());
        let mut used_e = vec![false; to.edge_count()];
        assign_edges(from, to, opts, nodes, &mut edges, &mut used_e, out);
        return;
    }
    for &x in &cands[k] {
        if opts.injective && used[x] {
            continue;
        }
        nodes.push(x);
        let feasible = from.edges.iter().enumerate().all(|(ei, e)| {
            if e.src > k || e.tgt > k || (e.src != k && e.tgt != k) {
                return true;
            }
            edge_candidates(from, to, opts, nodes, ei).next().is_some()
        });
        if feasible {
            used[x] = true;
            assign_nodes(from, to, opts, cands, nodes, used, out);
            used[x] = false;
        }
        nodes.pop();
    }
}

fn edge_candidates<'a>(
    from: &'a TypedGraph,
    to: &'a TypedGraph,
    opts: &'a SearchOptions,
    nodes: &'a [usize],
    ei: usize,
) -> impl Iterator<Item = usize> + 'a {
    let e = &from.edges[ei];
    (0..to.edge_count()).filter(move |&x| {
        let f = &to.edges[x];
        f.ty == e.ty && f.src == nodes[e.src] && f.tgt == nodes[e.tgt] && opts.edge_allowed.is_none_or(|g| g(ei, x))
    })
}

fn assign_edges(
    from: &TypedGraph,
    to: &TypedGraph,
    opts: &SearchOptions,
    nodes: &[usize],
    edges: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<GraphMorphism>,
) {
    if opts.limit.is_some_and(|l| out.len() >= l) {
        return;
    }
    let k = edges.len();
    if k == from.edge_count() {
        out.push(GraphMorphism {
            nodes: nodes.to_vec(),
            edges: edges.clone(),
        });
        return;
    }
    let cands: Vec<usize> = edge_candidates(from, to, opts, nodes, k).collect();
    for x in cands {
        if opts.injective && used[x] {
            continue;
        }
        used[x] = true;
        edges.push(x);
        assign_edges(from, to, opts, nodes, edges, used, out);
        edges.pop();
        used[x] = false;
    }
}

/// All morphisms, not necessarily injective.
pub fn find_morphisms(from: &TypedGraph, to: &TypedGraph) -> Vec<GraphMorphism> {
    search_morphisms(from, to, &SearchOptions::default())
}

pub fn graph_isomorphism(a: &TypedGraph, b: &TypedGraph) -> Option<GraphMorphism> {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let mut ta: Vec<&str> = a.nodes.iter().map(|n| n.ty.as_str()).collect();
    let mut tb: Vec<&str> = b.nodes.iter().map(|n| n.ty.as_str()).collect();
    ta.sort();
    tb.sort();
    if ta != tb {
        return None;
    }
    let degree = |g: &TypedGraph, x: usize| {
        (
            g.edges.iter().filter(|e| e.src == x).count(),
            g.edges.iter().filter(|e| e.tgt == x).count(),
        )
    };
    let allowed = |i: usize, x: usize| degree(a, i) == degree(b, x);
    let opts = SearchOptions {
        injective: true,
        limit: Some(1),
        node_allowed: Some(&allowed),
        edge_allowed: None,
    };
    search_morphisms(a, b, &opts).into_iter().next()
}

pub fn graphs_isomorphic(a: &TypedGraph, b: &TypedGraph) -> bool {
    graph_isomorphism(a, b).is_some()
}
