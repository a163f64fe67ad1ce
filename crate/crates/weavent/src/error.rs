use thiserror::Error;

/// Errors raised while building or transforming structures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("too many events: {0} (at most 64 supported)")]
    TooManyEvents(usize),
    #[error("invalid event structure: {0}")]
    InvalidEs(String),
    #[error("not live: {0}")]
    NotLive(String),
    #[error("not connected: {0}")]
    NotConnected(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("not weak prime algebraic: irreducible `{0}` is not a weak prime")]
    NotWeakPrime(String),
    #[error("not an irreducible: `{0}`")]
    NotIrreducible(String),
    #[error("elements are not ordered: `{0}` is not below `{1}`")]
    NotBelow(String, String),
    #[error("invalid equivalence structure: {0}")]
    InvalidEpes(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid rule `{0}`: {1}")]
    InvalidRule(String, String),
    #[error("trace class ceiling of {0} exceeded")]
    CeilingExceeded(usize),
    #[error("axiom {0} fails")]
    AxiomFails(String),
    #[error("invalid asynchronous graph: {0}")]
    InvalidAsync(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
