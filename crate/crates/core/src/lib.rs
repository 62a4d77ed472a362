//! Exact-arithmetic equilibrium tools for first-price auctions with
//! subjective priors: utilities, verifiers, transforms, a symmetric solver,
//! correlated equilibria and hardness gadgets.

pub mod auction;
pub mod continuous;
pub mod error;
pub mod format;
pub mod rational;
pub mod utility;
pub mod verify;
pub mod transforms;
pub mod symmetric;
pub mod correlated;
pub mod gadgets;

pub use auction::{
    validate_instance, AuctionInstance, BidSpace, MixedStrategy, MixedStrategyProfile, PriorPmf,
    PureStrategyProfile, ValidationReport, ValueSpace,
};
pub use continuous::{ContinuousAuction, PiecewiseConstantDensity, StepStrategy, StepStrategyProfile};
pub use rational::Rational;
