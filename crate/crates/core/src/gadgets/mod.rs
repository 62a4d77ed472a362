//! Hardness constructions: the non-existence instance, the Circuit-SAT and
//! Pure-Circuit reductions, gadget-table checks and exhaustive pure search.

pub mod circuit;
pub mod lemmas;
pub mod netlist;
pub mod nonexistence;
pub mod pure_circuit;
pub mod search;

use crate::auction::{AuctionInstance, MixedStrategyProfile};
use crate::error::ModelError;
use crate::verify::utility_grid;

pub use circuit::{
    assignment_to_pbne, circuit_to_dfpa, output_gadget_tables, CircuitGate, CircuitInstance, CircuitReduction,
    CircuitRole, OutputGadgetTables,
};
pub use lemmas::{check_gadget_lemmas, LemmaCheck, LemmaContext, LemmaReport, LemmaSuite};
pub use nonexistence::{helper_chain, helper_chain_holds, nonexistence_instance, nonexistence_q, nonexistence_threshold};
pub use pure_circuit::{
    extract_assignment, pure_circuit_to_dfpa, PaddingMode, PcGate, PureCircuitInstance, PureCircuitReduction, Trit,
};
pub use search::{brute_force_pure_search, SearchOutcome, SEARCH_LIMIT};

/// Utility-maximizing non-overbidding bid of `i` at value index `v`; ties go
/// to the largest bid.
pub(crate) fn best_bid(
    a: &AuctionInstance,
    i: usize,
    v: usize,
    profile: &MixedStrategyProfile,
) -> Result<usize, ModelError> {
    let grid = utility_grid(a, i, profile)?;
    let value = a.value_space(i).get(v);
    let row = &grid[v];
    let mut best = 0;
    for b in 1..row.len() {
        if a.bid_space().get(b) <= value && row[b] >= row[best] {
            best = b;
        }
    }
    Ok(best)
}
