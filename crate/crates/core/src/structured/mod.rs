//! Solvers that exploit few distinct utilities, few good types or few agents.

mod constant_nk;
mod labels;
mod perturb;
mod utilities;

pub use constant_nk::{solve_constant_nk, solve_constant_nk_capped};
pub use labels::{feasible_for_target, label_goods, LabelTable};
pub use perturb::{
    bruteforce_ef1_fpo, mbb_graph_is_forest, perturb_instance, solve_constant_n_ef1_po, ConstantNOutcome,
    PerturbedInstance, Route,
};
pub use utilities::{achievable_utilities, UtilityTargets};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructuredError {
    #[error("{what} has size {size}, above the cap {cap}")]
    CapExceeded { what: &'static str, size: u64, cap: u64 },
    #[error("no feasible allocation satisfies the predicate")]
    NotFound,
    #[error("perturbation stayed degenerate after {retries} retries")]
    DegeneracyUnresolved { retries: u32 },
}
