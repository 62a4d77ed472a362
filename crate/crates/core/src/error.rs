use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{0} is empty")]
    EmptySpace(&'static str),
    #[error("{what} contains {value}, outside [0,1]")]
    OutOfUnitInterval { what: &'static str, value: String },
    #[error("{0} is not strictly increasing")]
    NotStrictlyIncreasing(&'static str),
    #[error("bid space must contain the null bid 0")]
    MissingNullBid,
    #[error("negative probability mass")]
    NegativeMass,
    #[error("probability masses sum to {0}, expected 1/1")]
    MassNotOne(String),
    #[error("value {0} is not in the value space")]
    ValueNotInSpace(String),
    #[error("bid {0} is not in the bid space")]
    BidNotInSpace(String),
    #[error("need at least 2 bidders, got {0}")]
    TooFewBidders(usize),
    #[error("missing prior of bidder {i} about bidder {j}")]
    MissingPrior { i: usize, j: usize },
    #[error("bidder {bidder} overbids {bid} at value {value}")]
    Overbid {
        bidder: usize,
        value: String,
        bid: String,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("density error: {0}")]
    Density(String),
    #[error("step strategy error: {0}")]
    Step(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UtilityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("enumeration needs {needed} terms, over the limit of {limit}")]
    TooLarge { needed: u128, limit: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("system is infeasible: {0}")]
    Infeasible(String),
    #[error("budget exhausted after {work} units, best residual {best_residual:e}")]
    BudgetExhausted { work: u64, best_residual: f64 },
    #[error("instance too large: {0}")]
    TooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("netlist line {line}: {msg}")]
    Netlist { line: usize, msg: String },
    #[error("circuit error: {0}")]
    Circuit(String),
    #[error("search space of {0} profiles exceeds the limit")]
    TooLarge(u128),
}
