//! Event structures, domains and their dualities, with graph grammar traces
//! and interval and asynchronous graph views of domains.

#![allow(clippy::needless_range_loop)]

pub mod asynch;
pub mod domain;
pub mod dot;
pub mod duality;
pub mod error;
pub mod es;
pub mod interval;
pub mod io;
pub mod iso;
pub mod rewrite;
pub mod unionfind;

pub use domain::{validate_domain_morphism, Algebraicity, DomainKind, FiniteDomain};
pub use error::{Error, Result};
pub use es::{validate_es_morphism, Classification, Conflict, EventSet, EventStructure, MorphismViolation};
pub use duality::{connect_es, dom_of_es, epes_dom, epes_ev, ev_of_domain, fuse, unfold, Epes};
pub use iso::{es_isomorphic, poset_isomorphic};
pub use interval::{check_axioms, ev_wd, interval_classes, zeta, AxiomReport, Interval};
pub use asynch::{async_domain, hasse_as_async, AsyncGraph, AsyncReport};
