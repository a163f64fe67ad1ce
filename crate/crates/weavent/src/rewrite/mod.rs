//! Typed graph rewriting in the double-pushout style, with fusing rules.

pub mod dpo;
pub mod graph;
pub mod synth;
pub mod trace;

pub use dpo::{
    apply_rule, find_matches, gluing_failure, interchange, sequential_independence, verify_pushout, DirectDerivation,
    GluingFailure, Grammar, IndependencePair, Rule,
};
pub use graph::{find_morphisms, graph_isomorphism, graphs_isomorphic, GraphMorphism, TypedGraph};
pub use synth::grammar_from_es;
pub use trace::{equivalent_traces, trace_domain, Colimit, Derivation, TraceDomain};
