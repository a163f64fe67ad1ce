//! Transition graphs with commuting squares and the poset of their path classes.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::domain::{DomainKind, FiniteDomain};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

const PATH_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsyncEdge {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// A finite acyclic graph with an origin and generating commuting squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsyncGraph {
    nodes: Vec<String>,
    edges: Vec<AsyncEdge>,
    origin: usize,
    squares: Vec<[[usize; 2]; 2]>,
    between: HashMap<(usize, usize), usize>,
    succ: Vec<Vec<usize>>,
}

/// Per-axiom outcome of [`AsyncGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsyncReport {
    /// Equivalent distinct squares never share their first edge.
    pub axiom1: bool,
    /// Squares sharing a first edge agree on the second first edge.
    pub axiom2: bool,
    /// Three squares around a lower centre close up with three squares around an upper one.
    pub cube_up: bool,
    /// The converse completion, from an upper centre down to a lower one.
    pub cube_down: bool,
    pub coherence: bool,
    /// All cofinal paths from the origin are equivalent.
    pub prime: bool,
    pub witnesses: BTreeMap<String, String>,
}

impl AsyncReport {
    /// Weak validity omits the downward cube direction.
    pub fn holds(&self, weak: bool) -> bool {
        self.axiom1 && self.axiom2 && self.cube_up && self.coherence && (weak || self.cube_down)
    }
}

impl AsyncGraph {
    pub fn new(
        nodes: Vec<String>,
        edges: Vec<(String, String, String)>,
        origin: &str,
        squares: Vec<[[String; 2]; 2]>,
    ) -> Result<Self> {
        let mut node_ix = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if node_ix.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateId(n.clone()));
            }
        }
        let node = |n: &str| node_ix.get(n).copied().ok_or_else(|| Error::UnknownElement(n.to_string()));
        let mut edge_ix = HashMap::new();
        let mut es = Vec::with_capacity(edges.len());
        let mut between = HashMap::new();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (k, (id, s, t)) in edges.into_iter().enumerate() {
            let (src, tgt) = (node(&s)?, node(&t)?);
            if edge_ix.insert(id.clone(), k).is_some() {
                return Err(Error::DuplicateId(id));
            }
            if src == tgt {
                return Err(Error::InvalidAsync(format!("edge `{id}` is a loop")));
            }
            if between.insert((src, tgt), k).is_some() {
                return Err(Error::InvalidAsync(format!("parallel edges from `{s}` to `{t}`")));
            }
            succ[src].push(tgt);
            es.push(AsyncEdge { id, src, tgt });
        }
        for s in &mut succ {
            s.sort_unstable();
        }
        let origin = node(origin)?;

        let mut seen = vec![false; nodes.len()];
        let mut queue = VecDeque::from([origin]);
        seen[origin] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &succ[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidAsync(format!("node `{}` is unreachable from the origin", nodes[x])));
        }
        if topological_order(&succ).is_none() {
            return Err(Error::InvalidAsync("graph has a cycle".into()));
        }

        let edge = |e: &str| edge_ix.get(e).copied().ok_or_else(|| Error::InvalidAsync(format!("unknown edge `{e}`")));
        let mut sq = Vec::with_capacity(squares.len());
        for [[a1, a2], [b1, b2]] in squares {
            let p = [edge(&a1)?, edge(&a2)?];
            let q = [edge(&b1)?, edge(&b2)?];
            for w in [p, q] {
                if es[w[0]].tgt != es[w[1]].src {
                    return Err(Error::InvalidAsync(format!("`{}`;`{}` is not a path", es[w[0]].id, es[w[1]].id)));
                }
            }
            if es[p[0]].src != es[q[0]].src || es[p[1]].tgt != es[q[1]].tgt {
                return Err(Error::InvalidAsync(format!(
                    "square `{a1};{a2}` / `{b1};{b2}` is not coinitial and cofinal"
                )));
            }
            sq.push([p, q]);
        }
        Ok(AsyncGraph { nodes, edges: es, origin, squares: sq, between, succ })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[AsyncEdge] {
        &self.edges
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn squares(&self) -> &[[[usize; 2]; 2]] {
        &self.squares
    }

    pub fn square_ids(&self) -> Vec<[[String; 2]; 2]> {
        let id = |e: usize| self.edges[e].id.clone();
        self.squares
            .iter()
            .map(|[p, q]| [[id(p[0]), id(p[1])], [id(q[0]), id(q[1])]])
            .collect()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.between.get(&(a, b)).copied()
    }

    pub fn successors(&self, x: usize) -> &[usize] {
        &self.succ[x]
    }

    /// All length-2 paths with their equivalence generated by the squares.
    pub fn two_paths(&self) -> TwoPaths {
        let mut paths = Vec::new();
        for (a, e) in self.edges.iter().enumerate() {
            for &y in &self.succ[e.tgt] {
                paths.push([a, self.between[&(e.tgt, y)]]);
            }
        }
        paths.sort_unstable();
        let index: HashMap<[usize; 2], usize> = paths.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut uf = UnionFind::new(paths.len());
        for [p, q] in &self.squares {
            uf.union(index[p], index[q]);
        }
        let (class, _) = uf.classes();
        TwoPaths { paths, index, class }
    }

    /// Largest number of pairwise inequivalent length-2 paths between two fixed nodes.
    pub fn max_inequivalent_two_paths(&self) -> usize {
        let tp = self.two_paths();
        let mut groups: HashMap<(usize, usize), HashSet<usize>> = HashMap::new();
        for (k, p) in tp.paths.iter().enumerate() {
            let key = (self.edges[p[0]].src, self.edges[p[1]].tgt);
            groups.entry(key).or_default().insert(tp.class[k]);
        }
        groups.values().map(|s| s.len()).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<AsyncReport> {
        let tp = self.two_paths();
        let mut witnesses = BTreeMap::new();
        let n = |x: usize| self.nodes[x].as_str();
        let e = |x: usize| self.edges[x].id.as_str();
        let face = |a: usize, l: usize, r: usize, t: usize| -> bool {
            match (
                self.edge_between(a, l),
                self.edge_between(l, t),
                self.edge_between(a, r),
                self.edge_between(r, t),
            ) {
                (Some(p0), Some(p1), Some(q0), Some(q1)) => tp.equivalent([p0, p1], [q0, q1]),
                _ => false,
            }
        };

        let mut axiom1 = true;
        let mut axiom2 = true;
        let mut faces_from: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (i, p) in tp.paths.iter().enumerate() {
            for (j, q) in tp.paths.iter().enumerate() {
                if i == j || tp.class[i] != tp.class[j] {
                    continue;
                }
                if p[0] == q[0] && axiom1 {
                    axiom1 = false;
                    witnesses.insert("axiom1".into(), format!("{};{} ≃ {};{}", e(p[0]), e(p[1]), e(q[0]), e(q[1])));
                }
                faces_from.entry(p[0]).or_default().push((p[1], q[0]));
            }
        }
        let mut firsts: Vec<_> = faces_from.into_iter().collect();
        firsts.sort();
        'a2: for (u, fs) in &firsts {
            for &(u1, v1) in fs {
                for &(u1b, v1b) in fs {
                    if (u1 == u1b) != (v1 == v1b) {
                        axiom2 = false;
                        witnesses.insert(
                            "axiom2".into(),
                            format!("{};{} against {} and {};{} against {}", e(*u), e(u1), e(v1), e(*u), e(u1b), e(v1b)),
                        );
                        break 'a2;
                    }
                }
            }
        }

        let common = |a: usize, b: usize| -> Vec<usize> {
            self.succ[a].iter().copied().filter(|x| self.succ[b].contains(x)).collect()
        };

        let mut cube_up = true;
        let mut coherence = true;
        for b in 0..self.nodes.len() {
            let outs = &self.succ[b];
            for &l in outs {
                for &r in outs {
                    if l >= r {
                        continue;
                    }
                    for &c in outs {
                        if c == l || c == r {
                            continue;
                        }
                        for &tl in &common(c, l) {
                            if !face(b, l, c, tl) {
                                continue;
                            }
                            for &tr in &common(c, r) {
                                if tr == tl || !face(b, r, c, tr) {
                                    continue;
                                }
                                if cube_up {
                                    for &t in &common(tl, tr) {
                                        if !face(c, tl, tr, t) {
                                            continue;
                                        }
                                        let closes = common(l, r)
                                            .into_iter()
                                            .any(|cp| face(b, l, r, cp) && face(l, tl, cp, t) && face(r, tr, cp, t));
                                        if !closes {
                                            cube_up = false;
                                            witnesses.insert(
                                                "cube_up".into(),
                                                format!("base {} via {}, {}, {} to {}", n(b), n(l), n(r), n(c), n(t)),
                                            );
                                        }
                                    }
                                }
                                if coherence {
                                    for ct in common(l, r) {
                                        if ct == tl || ct == tr || !face(b, l, r, ct) {
                                            continue;
                                        }
                                        let closes = self.succ[tl]
                                            .iter()
                                            .any(|&t| face(l, tl, ct, t) && face(r, tr, ct, t));
                                        if !closes {
                                            coherence = false;
                                            witnesses.insert(
                                                "coherence".into(),
                                                format!("base {} with tops {}, {}, {}", n(b), n(tl), n(tr), n(ct)),
                                            );
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        let mut cube_down = true;
        'down: for b in 0..self.nodes.len() {
            let outs = &self.succ[b];
            for &l in outs {
                for &r in outs {
                    if l >= r {
                        continue;
                    }
                    for cp in common(l, r) {
                        if !face(b, l, r, cp) {
                            continue;
                        }
                        for &t in &self.succ[cp] {
                            for &tl in &self.succ[l] {
                                if tl == cp || !face(l, tl, cp, t) {
                                    continue;
                                }
                                for &tr in &self.succ[r] {
                                    if tr == cp || tr == tl || !face(r, tr, cp, t) {
                                        continue;
                                    }
                                    let closes = outs.iter().any(|&c| {
                                        c != l && c != r && face(b, l, c, tl) && face(b, r, c, tr) && face(c, tl, tr, t)
                                    });
                                    if !closes {
                                        cube_down = false;
                                        witnesses.insert(
                                            "cube_down".into(),
                                            format!(
                                                "top {} over {}, {}, {} has no lower centre above {}",
                                                n(t),
                                                n(tl),
                                                n(tr),
                                                n(cp),
                                                n(b)
                                            ),
                                        );
                                        break 'down;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        let classes = self.path_classes()?;
        let prime = classes.per_node.iter().all(|c| c.len() <= 1);
        if !prime {
            let x = classes.per_node.iter().position(|c| c.len() > 1).expect("some node");
            witnesses.insert("prime".into(), format!("inequivalent paths reach {}", n(x)));
        }
        Ok(AsyncReport { axiom1, axiom2, cube_up, cube_down, coherence, prime, witnesses })
    }

    /// Paths from the origin up to contextual closure of the squares.
    pub fn path_classes(&self) -> Result<PathClasses> {
        let tp = self.two_paths();
        let mut alternatives: HashMap<[usize; 2], Vec<[usize; 2]>> = HashMap::new();
        for (i, p) in tp.paths.iter().enumerate() {
            for (j, q) in tp.paths.iter().enumerate() {
                if i != j && tp.class[i] == tp.class[j] {
                    alternatives.entry(*p).or_default().push(*q);
                }
            }
        }
        let mut paths: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for k in frontier {
                let end = self.end(&paths[k]);
                for &y in &self.succ[end] {
                    let mut p = paths[k].clone();
                    p.push(self.between[&(end, y)]);
                    paths.push(p);
                    next.push(paths.len() - 1);
                    if paths.len() > PATH_LIMIT {
                        return Err(Error::InvalidAsync(format!("more than {PATH_LIMIT} paths from the origin")));
                    }
                }
            }
            frontier = next;
        }
        let index: HashMap<Vec<usize>, usize> = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut uf = UnionFind::new(paths.len());
        for (k, p) in paths.iter().enumerate() {
            for i in 0..p.len().saturating_sub(1) {
                if let Some(alts) = alternatives.get(&[p[i], p[i + 1]]) {
                    for alt in alts {
                        let mut q = p.clone();
                        q[i] = alt[0];
                        q[i + 1] = alt[1];
                        uf.union(k, index[&q]);
                    }
                }
            }
        }
        let (class, count) = uf.classes();
        let mut per_node: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        let mut end_of = vec![0; count];
        for (k, p) in paths.iter().enumerate() {
            let end = self.end(p);
            end_of[class[k]] = end;
            if !per_node[end].contains(&class[k]) {
                per_node[end].push(class[k]);
            }
        }
        Ok(PathClasses { paths, class, count, end: end_of, per_node })
    }

    fn end(&self, path: &[usize]) -> usize {
        path.last().map_or(self.origin, |&e| self.edges[e].tgt)
    }
}

/// Length-2 paths and the equivalence generated by declared squares.
#[derive(Debug, Clone)]
pub struct TwoPaths {
    pub paths: Vec<[usize; 2]>,
    pub index: HashMap<[usize; 2], usize>,
    pub class: Vec<usize>,
}

impl TwoPaths {
    pub fn equivalent(&self, p: [usize; 2], q: [usize; 2]) -> bool {
        match (self.index.get(&p), self.index.get(&q)) {
            (Some(&i), Some(&j)) => self.class[i] == self.class[j],
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PathClasses {
    pub paths: Vec<Vec<usize>>,
    pub class: Vec<usize>,
    pub count: usize,
    pub end: Vec<usize>,
    pub per_node: Vec<Vec<usize>>,
}

/// The prefix order on path classes, for a graph passing weak validation whose
/// cofinal origin paths are all equivalent.
pub fn async_domain(a: &AsyncGraph) -> Result<FiniteDomain> {
    let report = a.validate()?;
    if !report.holds(true) || !report.prime {
        let failed: Vec<&str> = [
            ("axiom1", report.axiom1),
            ("axiom2", report.axiom2),
            ("cube_up", report.cube_up),
            ("coherence", report.coherence),
            ("prime", report.prime),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(k, _)| k)
        .collect();
        return Err(Error::InvalidAsync(format!("fails {}", failed.join(", "))));
    }
    let pc = a.path_classes()?;
    let mut names = vec![String::new(); pc.count];
    for (x, cs) in pc.per_node.iter().enumerate() {
        for (k, &c) in cs.iter().enumerate() {
            names[c] = if cs.len() == 1 { a.nodes()[x].clone() } else { format!("{}#{k}", a.nodes()[x]) };
        }
    }
    let mut rel = Vec::new();
    for (k, p) in pc.paths.iter().enumerate() {
        if let Some((_, prefix)) = p.split_last() {
            let j = pc.paths.iter().position(|q| q.as_slice() == prefix).expect("prefix is a path");
            rel.push((pc.class[j], pc.class[k]));
        }
    }
    rel.sort_unstable();
    rel.dedup();
    FiniteDomain::validated(names.clone(), &rel, DomainKind::Coherent)
        .or_else(|_| FiniteDomain::validated(names, &rel, DomainKind::BoundedComplete))
}

/// Hasse diagram of `d` from its bottom, with every square declared commuting.
pub fn hasse_as_async(d: &FiniteDomain) -> Result<AsyncGraph> {
    let covers = d.covers();
    let edge_id = |a: usize, b: usize| format!("{}->{}", d.name(a), d.name(b));
    let edges = covers.iter().map(|&(a, b)| (edge_id(a, b), d.name(a).to_string(), d.name(b).to_string())).collect();
    let mut squares = Vec::new();
    for x in 0..d.len() {
        let mut via: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &y in d.upper_covers(x) {
            for &z in d.upper_covers(y) {
                via.entry(z).or_default().push(y);
            }
        }
        for (z, ys) in via {
            for (i, &y1) in ys.iter().enumerate() {
                for &y2 in &ys[i + 1..] {
                    squares.push([[edge_id(x, y1), edge_id(y1, z)], [edge_id(x, y2), edge_id(y2, z)]]);
                }
            }
        }
    }
    AsyncGraph::new(d.names().to_vec(), edges, d.name(d.bottom()), squares)
}

fn topological_order(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut indeg = vec![0; succ.len()];
    for s in succ {
        for &y in s {
            indeg[y] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..succ.len()).filter(|&x| indeg[x] == 0).collect();
    let mut out = Vec::with_capacity(succ.len());
    while let Some(x) = queue.pop_front() {
        out.push(x);
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                queue.push_back(y);
            }
        }
    }
    (out.len() == succ.len()).then_some(out)
}
