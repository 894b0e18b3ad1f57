//! Price-rise market algorithms for EF1+fPO and EQ1+fPO.

mod algorithm;
mod steps;

pub(crate) use steps::{closure, search_paths};

pub use algorithm::{event_bound, safety_budget, solve_ef1_fpo, solve_eq1_fpo, MarketRun};
pub use steps::{
    apply_price_rise, apply_transfer, choose_beta, component_of, find_violating_path, initial_outcome, least_spenders,
    least_spenders_among, least_utility_agents, price_rise_factors, Component, FactorMode, PathMode, PriceRiseFactors,
    ViolatingPath,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("event budget of {budget} exceeded after {events} events")]
    IterationBudgetExceeded { events: u64, budget: u64 },
    #[error("no finite price-rise factor at step {step}")]
    NoFiniteFactor { step: usize },
    #[error("equitable market run needs every value strictly positive")]
    NotPositiveInstance,
}

#[cfg(test)]
mod tests;
