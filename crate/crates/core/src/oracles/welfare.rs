//! Nash welfare and exhaustive optimizers.

use super::enumerate::{allocation_count, for_each_owner_vector};
use super::OracleError;
use crate::config::Caps;
use crate::model::{utility, Allocation, Instance};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::ops::ControlFlow;

/// Nash welfare as an exact product of utilities (never the n-th root).
pub fn nash_welfare(instance: &Instance, allocation: &Allocation) -> BigUint {
    (0..instance.agents())
        .map(|a| BigUint::from(utility(instance, allocation, a)))
        .product()
}

/// Nash ordering key: agents with positive utility first, then the product
/// of those positive utilities. With every agent positive it orders exactly
/// as the plain product.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NashScore {
    pub positive_agents: usize,
    pub positive_product: BigUint,
}

impl NashScore {
    pub fn from_utilities(utilities: &[u64]) -> Self {
        let mut product = BigUint::one();
        let mut positive = 0;
        for &u in utilities.iter().filter(|&&u| u > 0) {
            positive += 1;
            product *= u;
        }
        NashScore {
            positive_agents: positive,
            positive_product: product,
        }
    }

    /// The plain product of all utilities (zero if anyone has zero).
    pub fn product(&self, agents: usize) -> BigUint {
        if self.positive_agents == agents {
            self.positive_product.clone()
        } else {
            BigUint::zero()
        }
    }
}

/// Utility vector sorted ascending; leximin compares these lexicographically.
pub fn leximin_key(utilities: &[u64]) -> Vec<u64> {
    let mut sorted = utilities.to_vec();
    sorted.sort_unstable();
    sorted
}

pub enum Objective<'a> {
    MaxNash,
    Leximin,
    /// First allocation accepted by the predicate.
    Predicate(&'a dyn Fn(&Allocation) -> bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Score {
    Nash(NashScore),
    Leximin(Vec<u64>),
    Satisfied,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Best {
    pub allocation: Allocation,
    pub utilities: Vec<u64>,
    pub score: Score,
}

fn utilities_of(instance: &Instance, owners: &[usize], out: &mut [u64]) {
    out.iter_mut().for_each(|u| *u = 0);
    for (good, &agent) in owners.iter().enumerate() {
        out[agent] += instance.v(agent, good);
    }
}

/// Exhaustive optimizer over all `n^m` allocations; ties go to the first
/// allocation in lexicographic owner-vector order.
pub fn bruteforce_best(instance: &Instance, objective: Objective<'_>) -> Result<Best, OracleError> {
    bruteforce_best_capped(instance, objective, Caps::global().enumeration)
}

pub fn bruteforce_best_capped(instance: &Instance, objective: Objective<'_>, cap: u64) -> Result<Best, OracleError> {
    let n = instance.agents();
    let m = instance.goods();
    let size = allocation_count(n, m);
    if size > cap {
        return Err(OracleError::InstanceTooLarge { size, cap });
    }
    let mut utilities = vec![0u64; n];
    let mut best: Option<(Vec<usize>, Vec<u64>, Score)> = None;
    match objective {
        Objective::MaxNash | Objective::Leximin => {
            let nash = matches!(objective, Objective::MaxNash);
            for_each_owner_vector::<()>(n, m, |owners| {
                utilities_of(instance, owners, &mut utilities);
                let score = if nash {
                    Score::Nash(NashScore::from_utilities(&utilities))
                } else {
                    Score::Leximin(leximin_key(&utilities))
                };
                let improves = match &best {
                    None => true,
                    Some((_, _, incumbent)) => compare_scores(&score, incumbent) == Ordering::Greater,
                };
                if improves {
                    best = Some((owners.to_vec(), utilities.clone(), score));
                }
                ControlFlow::Continue(())
            });
        }
        Objective::Predicate(accept) => {
            best = for_each_owner_vector(n, m, |owners| {
                let allocation = Allocation::from_owners_unchecked(n, owners.to_vec());
                if accept(&allocation) {
                    utilities_of(instance, owners, &mut utilities);
                    ControlFlow::Break((owners.to_vec(), utilities.clone(), Score::Satisfied))
                } else {
                    ControlFlow::Continue(())
                }
            });
        }
    }
    let (owners, utilities, score) = best.ok_or(OracleError::NotFound)?;
    Ok(Best {
        allocation: Allocation::from_owners_unchecked(n, owners),
        utilities,
        score,
    })
}

pub fn compare_scores(a: &Score, b: &Score) -> Ordering {
    match (a, b) {
        (Score::Nash(x), Score::Nash(y)) => x.cmp(y),
        (Score::Leximin(x), Score::Leximin(y)) => x.cmp(y),
        _ => Ordering::Equal,
    }
}
