use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0}: construct as quotient of J3 via group::quotient")]
    ConstructAsQuotient(&'static str),
    #[error("G(1) is infinite")]
    InfiniteGroup,
    #[error("no closed form for {0}; derive by quotient or enumeration")]
    NoClosedForm(&'static str),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("coset enumeration out of space ({live} live cosets, limit {limit})")]
    OutOfSpace { live: usize, limit: usize },
    #[error("dense build bound {0} exceeded")]
    BoundExceeded(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("relation check failed: {0}")]
    Relation(String),
    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),
    #[error("no explicit map: {0}; use search_epimorphism")]
    NoExplicitMap(String),
    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
