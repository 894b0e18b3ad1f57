//! Independent checkers and brute-force oracles for every fairness and
//! efficiency notion the solvers claim.

mod efficiency;
pub mod enumerate;
mod fairness;
pub mod simplex;
mod verdict;
mod welfare;

pub use efficiency::{
    check_fpo_lp, check_fpo_lp_capped, check_mbb_certificate, check_po_bruteforce, check_po_bruteforce_capped,
};
pub use fairness::{check_ef1, check_eq1, check_pef1, pef1_violation};
pub use verdict::{Verdict, Witness};
pub use welfare::{
    bruteforce_best, bruteforce_best_capped, compare_scores, leximin_key, nash_welfare, Best, NashScore, Objective,
    Score,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive check: {size} > cap {cap}")]
    InstanceTooLarge { size: u64, cap: u64 },
    #[error("no allocation satisfies the predicate")]
    NotFound,
}
