use super::StructuredError;
use crate::config::Caps;
use crate::model::rational::uint;
use crate::model::{build_mbb_graph, is_on_mbb, Allocation, Instance, MarketOutcome, Rational, Valuations};
use crate::oracles::enumerate::for_each_owner_vector;
use crate::oracles::{check_ef1, check_fpo_lp_capped, check_po_bruteforce, Verdict};
use crate::solver::solve_ef1_fpo;
use num_traits::{One, Zero};
use std::ops::ControlFlow;

const DEGENERACY_RETRIES: u32 = 20;

/// `v'_ij = v_ij + δ_ij` with `δ_ij = δ̄^{(i+1)n} + δ̄^{j+1}` on positive entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbedInstance {
    pub base: Instance,
    pub delta_bar: Rational,
    pub deltas: Vec<Vec<Rational>>,
    pub values: Vec<Vec<Rational>>,
    /// Largest `δ_ij`.
    pub delta_max: Rational,
}

impl Valuations for PerturbedInstance {
    type Value = Rational;

    fn agent_count(&self) -> usize {
        self.base.agents()
    }

    fn good_count(&self) -> usize {
        self.base.goods()
    }

    fn value(&self, agent: usize, good: usize) -> Rational {
        self.values[agent][good].clone()
    }

    fn value_rational(&self, agent: usize, good: usize) -> Rational {
        self.values[agent][good].clone()
    }

    fn is_positive(&self, agent: usize, good: usize) -> bool {
        self.base.v(agent, good) > 0
    }
}

/// Builds the perturbed instance; `seed_scale` must lie in `(0, 1]`.
///
/// `δ̄` starts at `seed_scale / (4·m²·v_max·(nm + m + 1))`, which keeps every
/// `δ_ij < 1/(2·m·v_max)`, and is halved while some cross ratio
/// `v'_ij·v'_hk = v'_ik·v'_hj` stays degenerate.
pub fn perturb_instance(instance: &Instance, seed_scale: &Rational) -> Result<PerturbedInstance, StructuredError> {
    assert!(
        seed_scale > &Rational::zero() && seed_scale <= &Rational::one(),
        "seed scale must lie in (0, 1]"
    );
    let n = instance.agents() as u64;
    let m = instance.goods() as u64;
    let denom = 4 * m * m * instance.vmax() * (n * m + m + 1);
    let mut delta_bar = seed_scale / uint(denom);
    for _ in 0..=DEGENERACY_RETRIES {
        let p = build(instance, &delta_bar);
        if !is_degenerate(&p) {
            return Ok(p);
        }
        delta_bar /= uint(2);
    }
    Err(StructuredError::DegeneracyUnresolved {
        retries: DEGENERACY_RETRIES,
    })
}

fn build(instance: &Instance, delta_bar: &Rational) -> PerturbedInstance {
    let n = instance.agents();
    let m = instance.goods();
    let powers: Vec<Rational> = std::iter::successors(Some(delta_bar.clone()), |p| Some(p * delta_bar))
        .take((n * n).max(m))
        .collect();
    let pow = |e: usize| powers[e - 1].clone();
    let mut deltas = vec![vec![Rational::zero(); m]; n];
    let mut values = vec![vec![Rational::zero(); m]; n];
    let mut delta_max = Rational::zero();
    for i in 0..n {
        for j in 0..m {
            let v = instance.v(i, j);
            if v == 0 {
                continue;
            }
            let d = pow((i + 1) * n) + pow(j + 1);
            values[i][j] = uint(v) + &d;
            if d > delta_max {
                delta_max = d.clone();
            }
            deltas[i][j] = d;
        }
    }
    PerturbedInstance {
        base: instance.clone(),
        delta_bar: delta_bar.clone(),
        deltas,
        values,
        delta_max,
    }
}

fn is_degenerate(p: &PerturbedInstance) -> bool {
    let n = p.agent_count();
    let m = p.good_count();
    for i in 0..n {
        for h in (i + 1)..n {
            for j in 0..m {
                for k in (j + 1)..m {
                    let entries = [(i, j), (h, k), (i, k), (h, j)];
                    if entries.iter().any(|&(a, g)| !p.is_positive(a, g)) {
                        continue;
                    }
                    if &p.values[i][j] * &p.values[h][k] == &p.values[i][k] * &p.values[h][j] {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// The undirected MBB graph on agents and goods has no cycle. Non-degenerate
/// values guarantee this; a cycle means the degeneracy check missed a relation.
pub fn mbb_graph_is_forest<V: Valuations>(vals: &V, outcome: &MarketOutcome) -> bool {
    let n = vals.agent_count();
    let m = vals.good_count();
    let graph = build_mbb_graph(vals, outcome);
    let mut parent: Vec<usize> = (0..n + m).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..m {
            if !graph.is_mbb(i, j) {
                continue;
            }
            let (a, b) = (root(&mut parent, i), root(&mut parent, n + j));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// The price-rise market run on the perturbed values.
    Market,
    /// Exhaustive search for EF1 plus the exact fPO check on the perturbed values.
    BruteForce,
}

#[derive(Debug, Clone)]
pub struct ConstantNOutcome {
    pub allocation: Allocation,
    pub perturbed: PerturbedInstance,
    pub route: Route,
    /// EF1 on the base instance.
    pub ef1: Verdict,
    /// PO on the base instance; `None` when above the enumeration cap.
    pub po: Option<Verdict>,
}

/// EF1 and fPO for the perturbed values, which transfers to EF1 and PO on
/// the base instance. Falls back to exhaustive search if the market run fails.
pub fn solve_constant_n_ef1_po(instance: &Instance) -> Result<ConstantNOutcome, StructuredError> {
    let perturbed = perturb_instance(instance, &Rational::one())?;
    let (allocation, route) = match solve_ef1_fpo(&perturbed) {
        Ok(run) if is_on_mbb(&perturbed, &run.outcome) && mbb_graph_is_forest(&perturbed, &run.outcome) => {
            (run.outcome.allocation, Route::Market)
        }
        _ => (bruteforce_ef1_fpo(&perturbed)?, Route::BruteForce),
    };
    let ef1 = check_ef1(instance, &allocation);
    let po = check_po_bruteforce(instance, &allocation).ok();
    Ok(ConstantNOutcome {
        allocation,
        perturbed,
        route,
        ef1,
        po,
    })
}

/// First allocation in owner-vector order that is EF1 and fPO for `vals`.
pub fn bruteforce_ef1_fpo<V: Valuations>(vals: &V) -> Result<Allocation, StructuredError> {
    let n = vals.agent_count();
    let m = vals.good_count();
    let caps = Caps::global();
    let size = crate::oracles::enumerate::allocation_count(n, m);
    if size > caps.enumeration {
        return Err(StructuredError::CapExceeded {
            what: "allocation space",
            size,
            cap: caps.enumeration,
        });
    }
    let mut lp_error = None;
    let found = for_each_owner_vector(n, m, |owners| {
        let a = Allocation::from_owners_unchecked(n, owners.to_vec());
        if !check_ef1(vals, &a).holds() {
            return ControlFlow::Continue(());
        }
        match check_fpo_lp_capped(vals, &a, caps.lp_variables) {
            Ok(v) if v.holds() => ControlFlow::Break(a),
            Ok(_) => ControlFlow::Continue(()),
            Err(e) => {
                lp_error = Some(e);
                ControlFlow::Break(a)
            }
        }
    });
    if let Some(crate::oracles::OracleError::InstanceTooLarge { size, cap }) = lp_error {
        return Err(StructuredError::CapExceeded {
            what: "fPO linear program",
            size,
            cap,
        });
    }
    found.ok_or(StructuredError::NotFound)
}
