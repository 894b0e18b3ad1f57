//! Pareto-optimality oracles: exhaustive for PO, exact LP for fPO.

use super::enumerate::{allocation_count, for_each_owner_vector};
use super::simplex::{maximize, LpOutcome};
use super::verdict::{Verdict, Witness};
use super::OracleError;
use crate::config::Caps;
use crate::model::{build_mbb_graph, Allocation, MarketOutcome, Rational, Valuations};
use num_traits::{One, Zero};
use std::ops::ControlFlow;

pub fn check_po_bruteforce<V: Valuations>(vals: &V, allocation: &Allocation) -> Result<Verdict, OracleError> {
    check_po_bruteforce_capped(vals, allocation, Caps::global().enumeration)
}

/// No integral allocation dominates `allocation`; enumerates all `n^m`.
pub fn check_po_bruteforce_capped<V: Valuations>(
    vals: &V,
    allocation: &Allocation,
    cap: u64,
) -> Result<Verdict, OracleError> {
    let n = vals.agent_count();
    let m = vals.good_count();
    let size = allocation_count(n, m);
    if size > cap {
        return Err(OracleError::InstanceTooLarge { size, cap });
    }
    let base: Vec<V::Value> = (0..n).map(|a| vals.bundle_value(a, allocation.bundle(a))).collect();
    let mut utilities = vec![V::Value::zero(); n];
    let found = for_each_owner_vector(n, m, |owners| {
        for u in utilities.iter_mut() {
            *u = V::Value::zero();
        }
        for (good, &agent) in owners.iter().enumerate() {
            utilities[agent] += vals.value(agent, good);
        }
        let weakly = utilities.iter().zip(&base).all(|(u, b)| u >= b);
        let strictly = utilities.iter().zip(&base).any(|(u, b)| u > b);
        if weakly && strictly {
            ControlFlow::Break(owners.to_vec())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(match found {
        Some(owners) => {
            let dominating = Allocation::from_owners(n, owners).expect("enumerated owners");
            Verdict::fail(Witness::Dominated {
                bundles: dominating.bundles().to_vec(),
            })
        }
        None => Verdict::pass(),
    })
}

/// Every good is an MBB good of its owner, which certifies fPO.
pub fn check_mbb_certificate<V: Valuations>(vals: &V, outcome: &MarketOutcome) -> Verdict {
    let graph = build_mbb_graph(vals, outcome);
    let off = (0..outcome.goods()).find(|&g| !graph.is_mbb(outcome.allocation.owner(g), g));
    match off {
        Some(good) => Verdict::fail(Witness::OffMbb {
            good,
            owner: outcome.allocation.owner(good),
        }),
        None => Verdict::pass(),
    }
}

pub fn check_fpo_lp<V: Valuations>(vals: &V, allocation: &Allocation) -> Result<Verdict, OracleError> {
    check_fpo_lp_capped(vals, allocation, Caps::global().lp_variables)
}

/// No fractional allocation dominates `allocation`.
///
/// Maximizes total value over fractional allocations (free disposal) that
/// give every agent at least its current utility; the allocation is fPO iff
/// the optimum equals its own total value.
pub fn check_fpo_lp_capped<V: Valuations>(
    vals: &V,
    allocation: &Allocation,
    cap: usize,
) -> Result<Verdict, OracleError> {
    let n = vals.agent_count();
    let m = vals.good_count();
    // Zero-valued shares never help; leave them out of the program.
    let vars: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| vals.is_positive(i, j))
        .collect();
    if vars.len() > cap {
        return Err(OracleError::InstanceTooLarge {
            size: vars.len() as u64,
            cap: cap as u64,
        });
    }
    let current: Vec<Rational> = (0..n)
        .map(|i| {
            allocation
                .bundle(i)
                .iter()
                .fold(Rational::zero(), |acc, &g| acc + vals.value_rational(i, g))
        })
        .collect();
    let cost: Vec<Rational> = vars.iter().map(|&(i, j)| vals.value_rational(i, j)).collect();
    let mut a = Vec::with_capacity(m + n);
    let mut b = Vec::with_capacity(m + n);
    for good in 0..m {
        a.push(
            vars.iter()
                .map(|&(_, j)| if j == good { Rational::one() } else { Rational::zero() })
                .collect(),
        );
        b.push(Rational::one());
    }
    for agent in 0..n {
        a.push(
            vars.iter()
                .map(|&(i, j)| {
                    if i == agent {
                        -vals.value_rational(i, j)
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        );
        b.push(-current[agent].clone());
    }
    let total: Rational = current.iter().sum();
    match maximize(&cost, &a, &b) {
        LpOutcome::Optimal { value, solution } => {
            if value == total {
                Ok(Verdict::pass())
            } else {
                let mut shares = vec![vec![Rational::zero(); m]; n];
                for (&(i, j), y) in vars.iter().zip(solution) {
                    shares[i][j] = y;
                }
                Ok(Verdict::fail(Witness::fractional(&shares)))
            }
        }
        // The allocation itself is feasible and the region is bounded.
        other => unreachable!("fPO program cannot be {:?}", other),
    }
}
