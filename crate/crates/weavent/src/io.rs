//! JSON documents for every structure.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::asynch::AsyncGraph;
use crate::domain::{DomainKind, FiniteDomain};
use crate::duality::Epes;
use crate::error::{Error, Result};
use crate::es::{bit, members, Conflict, EventSet, EventStructure};
use crate::rewrite::{Grammar, GraphMorphism, Rule, TypedGraph};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnablingDoc {
    pub needs: Vec<String>,
    pub event: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EsDoc {
    pub events: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conflict: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub enabling: Vec<EnablingDoc>,
    /// Blocks of equivalent events, for structures with an equivalence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<Vec<Vec<String>>>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn names_to_set(es_names: &[String], names: &[String]) -> Result<EventSet> {
    let mut s = 0;
    for n in names {
        let i = es_names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::UnknownEvent(n.clone()))?;
        s |= bit(i);
    }
    Ok(s)
}

impl EsDoc {
    pub fn to_es(&self) -> Result<EventStructure> {
        let names = &self.events;
        let idx = |n: &str| {
            names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::UnknownEvent(n.to_string()))
        };
        let mut gens = Vec::new();
        for g in &self.enabling {
            gens.push((names_to_set(names, &g.needs)?, idx(&g.event)?));
        }
        match (&self.conflict, &self.consistent) {
            (Some(_), Some(_)) => Err(Error::Parse("give either `conflict` or `consistent`, not both".into())),
            (_, Some(sets)) => {
                let mut cs = Vec::new();
                for s in sets {
                    cs.push(names_to_set(names, s)?);
                }
                EventStructure::from_consistency(names.clone(), cs, gens)
            }
            (c, None) => {
                let mut pairs = Vec::new();
                for (a, b) in c.iter().flatten() {
                    pairs.push((idx(a)?, idx(b)?));
                }
                EventStructure::from_binary(names.clone(), &pairs, gens)
            }
        }
    }

    pub fn from_es(es: &EventStructure) -> EsDoc {
        let set_names = |s: EventSet| {
            let mut v: Vec<String> = members(s).map(|i| es.name(i).to_string()).collect();
            v.sort();
            v
        };
        let (conflict, consistent) = match es.conflict() {
            Conflict::Binary(_) => (
                Some(
                    es.conflict_pairs()
                        .into_iter()
                        .map(|(a, b)| (es.name(a).to_string(), es.name(b).to_string()))
                        .collect(),
                ),
                None,
            ),
            Conflict::Consistency(max) => (None, Some(max.iter().map(|&s| set_names(s)).collect())),
        };
        EsDoc {
            events: es.names().to_vec(),
            conflict,
            consistent,
            enabling: es
                .enabling()
                .iter()
                .map(|&(s, e)| EnablingDoc {
                    needs: set_names(s),
                    event: es.name(e).to_string(),
                })
                .collect(),
            equivalence: None,
        }
    }

    /// Reads the equivalence blocks; unlisted events form singleton classes.
    /// Each class is named by its least member.
    pub fn to_epes(&self) -> Result<Epes> {
        let base = self.to_es()?;
        let n = base.len();
        let mut class: Vec<Option<usize>> = vec![None; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for block in self.equivalence.iter().flatten() {
            let mut b = Vec::new();
            for name in block {
                let i = base.index(name)?;
                if class[i].is_some() {
                    return Err(Error::InvalidEpes(format!("`{name}` is in two blocks")));
                }
                class[i] = Some(blocks.len());
                b.push(i);
            }
            if !b.is_empty() {
                blocks.push(b);
            }
        }
        for (i, c) in class.iter_mut().enumerate() {
            if c.is_none() {
                *c = Some(blocks.len());
                blocks.push(vec![i]);
            }
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        let least = |b: &Vec<usize>| b.iter().map(|&i| base.name(i).to_string()).min().unwrap();
        order.sort_by_key(|&k| least(&blocks[k]));
        let mut rank = vec![0; blocks.len()];
        for (r, &k) in order.iter().enumerate() {
            rank[k] = r;
        }
        let names = order.iter().map(|&k| least(&blocks[k])).collect();
        let class = class.into_iter().map(|c| rank[c.unwrap()]).collect();
        Epes::new(base, class, names)
    }

    pub fn from_epes(p: &Epes) -> EsDoc {
        let mut doc = EsDoc::from_es(p.base());
        let mut blocks: Vec<Vec<String>> = vec![Vec::new(); p.class_names().len()];
        for (e, &c) in p.class().iter().enumerate() {
            blocks[c].push(p.base().name(e).to_string());
        }
        doc.equivalence = Some(blocks);
        doc
    }
}

pub fn parse_es(text: &str) -> Result<EventStructure> {
    parse::<EsDoc>(text)?.to_es()
}

pub fn parse_epes(text: &str) -> Result<Epes> {
    parse::<EsDoc>(text)?.to_epes()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    pub elements: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
    #[serde(default = "default_kind")]
    pub kind: DomainKind,
}

fn default_kind() -> DomainKind {
    DomainKind::Coherent
}

impl DomainDoc {
    /// Builds the order and checks the join condition.
    pub fn to_domain(&self) -> Result<FiniteDomain> {
        let mut rel = Vec::new();
        let idx = |n: &str| {
            self.elements
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::UnknownElement(n.to_string()))
        };
        for (a, b) in &self.covers {
            rel.push((idx(a)?, idx(b)?));
        }
        FiniteDomain::validated(self.elements.clone(), &rel, self.kind)
    }

    pub fn from_domain(d: &FiniteDomain) -> DomainDoc {
        DomainDoc {
            elements: d.names().to_vec(),
            covers: d
                .covers()
                .into_iter()
                .map(|(a, b)| (d.name(a).to_string(), d.name(b).to_string()))
                .collect(),
            kind: d.kind(),
        }
    }
}

pub fn parse_domain(text: &str) -> Result<FiniteDomain> {
    parse::<DomainDoc>(text)?.to_domain()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub ty: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub ty: Option<String>,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    #[serde(default)]
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

impl GraphDoc {
    /// Missing types default to the item's own id, as in a type graph.
    pub fn to_graph(&self) -> Result<TypedGraph> {
        TypedGraph::from_parts(
            self.nodes
                .iter()
                .map(|n| (n.id.clone(), n.ty.clone().unwrap_or_else(|| n.id.clone())))
                .collect(),
            self.edges
                .iter()
                .map(|e| {
                    (
                        e.id.clone(),
                        e.ty.clone().unwrap_or_else(|| e.id.clone()),
                        e.src.clone(),
                        e.tgt.clone(),
                    )
                })
                .collect(),
        )
    }

    pub fn from_graph(g: &TypedGraph) -> GraphDoc {
        GraphDoc {
            nodes: g
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.id.clone(),
                    ty: Some(n.ty.clone()),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    ty: Some(e.ty.clone()),
                    src: g.nodes()[e.src].id.clone(),
                    tgt: g.nodes()[e.tgt].id.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    #[serde(default)]
    pub nodes: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

impl MapDoc {
    fn to_morphism(&self, from: &TypedGraph, to: &TypedGraph, what: &str) -> Result<GraphMorphism> {
        let bad = |m: String| Error::InvalidMorphism(format!("{what}: {m}"));
        let mut nodes = Vec::new();
        for n in from.nodes() {
            let img = self.nodes.get(&n.id).ok_or_else(|| bad(format!("node `{}` unmapped", n.id)))?;
            nodes.push(to.node_index(img).ok_or_else(|| bad(format!("unknown node `{img}`")))?);
        }
        let mut edges = Vec::new();
        for e in from.edges() {
            let img = self.edges.get(&e.id).ok_or_else(|| bad(format!("edge `{}` unmapped", e.id)))?;
            edges.push(to.edge_index(img).ok_or_else(|| bad(format!("unknown edge `{img}`")))?);
        }
        let m = GraphMorphism { nodes, edges };
        from.check_morphism(to, &m).map_err(|e| bad(e.to_string()))?;
        Ok(m)
    }

    fn from_morphism(m: &GraphMorphism, from: &TypedGraph, to: &TypedGraph) -> MapDoc {
        MapDoc {
            nodes: from
                .nodes()
                .iter()
                .zip(&m.nodes)
                .map(|(n, &x)| (n.id.clone(), to.nodes()[x].id.clone()))
                .collect(),
            edges: from
                .edges()
                .iter()
                .zip(&m.edges)
                .map(|(e, &x)| (e.id.clone(), to.edges()[x].id.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub name: String,
    #[serde(rename = "L")]
    pub lhs: GraphDoc,
    #[serde(rename = "K")]
    pub interface: GraphDoc,
    #[serde(rename = "R")]
    pub rhs: GraphDoc,
    pub l: MapDoc,
    pub r: MapDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GrammarDoc {
    pub type_graph: GraphDoc,
    pub start: GraphDoc,
    pub rules: Vec<RuleDoc>,
}

impl GrammarDoc {
    pub fn to_grammar(&self) -> Result<Grammar> {
        let t = self.type_graph.to_graph()?;
        let start = self.start.to_graph()?;
        let mut rules = Vec::new();
        for r in &self.rules {
            let wrap = |e: Error| Error::InvalidRule(r.name.clone(), e.to_string());
            let lhs = r.lhs.to_graph().map_err(wrap)?;
            let k = r.interface.to_graph().map_err(wrap)?;
            let rhs = r.rhs.to_graph().map_err(wrap)?;
            let l = r.l.to_morphism(&k, &lhs, "l").map_err(wrap)?;
            let rr = r.r.to_morphism(&k, &rhs, "r").map_err(wrap)?;
            rules.push(Rule::new(r.name.clone(), lhs, k, rhs, l, rr)?);
        }
        Grammar::new(t, start, rules)
    }

    pub fn from_grammar(g: &Grammar) -> GrammarDoc {
        GrammarDoc {
            type_graph: GraphDoc::from_graph(&g.type_graph),
            start: GraphDoc::from_graph(&g.start),
            rules: g
                .rules
                .iter()
                .map(|r| RuleDoc {
                    name: r.name.clone(),
                    lhs: GraphDoc::from_graph(&r.lhs),
                    interface: GraphDoc::from_graph(&r.interface),
                    rhs: GraphDoc::from_graph(&r.rhs),
                    l: MapDoc::from_morphism(&r.l, &r.interface, &r.lhs),
                    r: MapDoc::from_morphism(&r.r, &r.interface, &r.rhs),
                })
                .collect(),
        }
    }
}

pub fn parse_grammar(text: &str) -> Result<Grammar> {
    parse::<GrammarDoc>(text)?.to_grammar()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AsyncEdgeDoc {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AsyncDoc {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<AsyncEdgeDoc>,
    pub origin: String,
    #[serde(default)]
    pub squares: Vec<[[String; 2]; 2]>,
}

impl AsyncDoc {
    pub fn to_async(&self) -> Result<AsyncGraph> {
        AsyncGraph::new(
            self.nodes.clone(),
            self.edges.iter().map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone())).collect(),
            &self.origin,
            self.squares.clone(),
        )
    }

    pub fn from_async(a: &AsyncGraph) -> AsyncDoc {
        AsyncDoc {
            nodes: a.nodes().to_vec(),
            edges: a
                .edges()
                .iter()
                .map(|e| AsyncEdgeDoc {
                    id: e.id.clone(),
                    src: a.nodes()[e.src].clone(),
                    tgt: a.nodes()[e.tgt].clone(),
                })
                .collect(),
            origin: a.nodes()[a.origin()].clone(),
            squares: a.square_ids(),
        }
    }
}

pub fn parse_async(text: &str) -> Result<AsyncGraph> {
    parse::<AsyncDoc>(text)?.to_async()
}

/// Partial event map: source event to target event or `null`; absent events are unmapped.
pub fn parse_event_map(text: &str, src: &EventStructure, dst: &EventStructure) -> Result<Vec<Option<usize>>> {
    let raw: BTreeMap<String, Option<String>> = parse(text)?;
    let mut f = vec![None; src.len()];
    for (k, v) in raw {
        let i = src.index(&k)?;
        f[i] = match v {
            Some(t) => Some(dst.index(&t)?),
            None => None,
        };
    }
    Ok(f)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}
