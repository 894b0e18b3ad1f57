//! Local search over valid market configurations on a `(1+ε)` price grid.
//!
//! A configuration is an allocation with prices `(1+ε)^{q_j}`; it is valid
//! when it is on MBB for the rounded values and every `q_j` lies in
//! `[0, max_exponent]`. Its cost is `(ε-pEF1 flag, least spending)`, and
//! every valid configuration that is not ε-pEF1 has a unique neighbor of
//! strictly larger cost, so local optima are ε-pEF1.

mod configuration;
mod scheme;
mod search;

pub use configuration::{Configuration, LexCost};
pub use scheme::{largest_power_at_most, price_bound, round_valuations, EpsilonScheme, RoundedInstance};
pub use search::{
    config_cost, initial_configuration, local_search, neighbor_budget, neighbor_d, walk_budget, LocalSearchResult,
    WalkStats,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlsError {
    #[error("{what} budget of {budget} moves exceeded")]
    StepBudgetExceeded { what: &'static str, budget: u64 },
    #[error("price of good {good} would reach exponent {exponent}, above {max}")]
    PriceBoundExceeded { good: usize, exponent: u64, max: u64 },
    #[error("no price rise from least spender {agent} reaches any event")]
    Stalled { agent: usize },
}

#[cfg(test)]
mod tests;
