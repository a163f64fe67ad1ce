//! Graphviz output. Nodes and edges are emitted in sorted order.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::asynch::AsyncGraph;
use crate::domain::FiniteDomain;
use crate::rewrite::TypedGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram, bottom first.
pub fn poset_dot(d: &FiniteDomain) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n");
    let mut names: Vec<&str> = d.names().iter().map(String::as_str).collect();
    names.sort_unstable();
    for n in names {
        writeln!(out, "  {};", quote(n)).unwrap();
    }
    let mut edges: Vec<(&str, &str)> = d.covers().into_iter().map(|(a, b)| (d.name(a), d.name(b))).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        writeln!(out, "  {} -> {};", quote(a), quote(b)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Typed graph with `id : type` labels.
pub fn graph_dot(g: &TypedGraph) -> String {
    let mut out = String::from("digraph typed {\n");
    for n in g.nodes() {
        writeln!(out, "  {} [label={}];", quote(&n.id), quote(&format!("{} : {}", n.id, n.ty))).unwrap();
    }
    for e in g.edges() {
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&g.nodes()[e.src].id),
            quote(&g.nodes()[e.tgt].id),
            quote(&format!("{} : {}", e.id, e.ty))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Asynchronous graph; edges occurring in a commuting square are dashed.
pub fn async_dot(a: &AsyncGraph) -> String {
    let mut out = String::from("digraph async {\n  rankdir=BT;\n");
    let origin = a.origin();
    let mut nodes: Vec<(usize, &str)> = a.nodes().iter().enumerate().map(|(i, n)| (i, n.as_str())).collect();
    nodes.sort_unstable_by_key(|&(_, n)| n);
    for (i, n) in nodes {
        if i == origin {
            writeln!(out, "  {} [shape=doublecircle];", quote(n)).unwrap();
        } else {
            writeln!(out, "  {};", quote(n)).unwrap();
        }
    }
    let in_square: BTreeSet<usize> = a.squares().iter().flat_map(|[p, q]| [p[0], p[1], q[0], q[1]]).collect();
    let mut edges: Vec<usize> = (0..a.edges().len()).collect();
    edges.sort_unstable_by_key(|&e| &a.edges()[e].id);
    for e in edges {
        let ed = &a.edges()[e];
        let style = if in_square.contains(&e) { ", style=dashed" } else { "" };
        writeln!(
            out,
            "  {} -> {} [label={}{}];",
            quote(&a.nodes()[ed.src]),
            quote(&a.nodes()[ed.tgt]),
            quote(&ed.id),
            style
        )
        .unwrap();
    }
    let mut squares = a.square_ids();
    squares.sort();
    for [[p0, p1], [q0, q1]] in squares {
        writeln!(out, "  // square {p0};{p1} = {q0};{q1}").unwrap();
    }
    out.push_str("}\n");
    out
}
