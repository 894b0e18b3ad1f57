use super::SolverError;
use crate::model::{Allocation, Factor, MarketOutcome, MbbGraph, PriceTrigger, Rational, Valuations};
use num_traits::{One, Zero};
use std::collections::VecDeque;

/// Which quantity defines the least agents and the path violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    /// `p(x_h \ j) > p(x_i)` from least spenders.
    Spending,
    /// `v_h(x_h \ j) > v_i(x_i)` from least-utility agents.
    Utility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMode {
    WithGamma2,
    Gamma1Only,
}

/// Agents and goods reachable from a source set along alternating paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Ascending.
    pub agents: Vec<usize>,
    /// Ascending; every good owned by a member.
    pub goods: Vec<usize>,
    /// Per agent: BFS layer from the nearest source, `n` if unreachable.
    pub levels: Vec<usize>,
}

impl Component {
    pub fn contains_agent(&self, agent: usize) -> bool {
        self.agents.binary_search(&agent).is_ok()
    }

    pub fn contains_good(&self, good: usize) -> bool {
        self.goods.binary_search(&good).is_ok()
    }
}

/// `agents[t]` owns `goods[t-1]`, which is MBB for `agents[t-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolatingPath {
    pub agents: Vec<usize>,
    pub goods: Vec<usize>,
}

impl ViolatingPath {
    pub fn source(&self) -> usize {
        self.agents[0]
    }

    pub fn good(&self) -> usize {
        *self.goods.last().expect("path has at least one edge")
    }

    pub fn sender(&self) -> usize {
        self.agents[self.agents.len() - 1]
    }

    pub fn receiver(&self) -> usize {
        self.agents[self.agents.len() - 2]
    }

    /// Number of goods on the path.
    pub fn len(&self) -> usize {
        self.goods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goods.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceRiseFactors {
    pub gamma1: Factor,
    pub gamma2: Factor,
    pub beta: Rational,
    pub trigger: PriceTrigger,
}

/// Each good to its highest-value agent (lowest index on ties), priced at that value.
pub fn initial_outcome<V: Valuations>(vals: &V) -> MarketOutcome {
    let n = vals.agent_count();
    let m = vals.good_count();
    let mut owner = Vec::with_capacity(m);
    let mut prices = Vec::with_capacity(m);
    for good in 0..m {
        let mut best = 0;
        for agent in 1..n {
            if vals.value(agent, good) > vals.value(best, good) {
                best = agent;
            }
        }
        owner.push(best);
        prices.push(vals.value_rational(best, good));
    }
    let allocation = Allocation::from_owners_unchecked(n, owner);
    MarketOutcome::new(allocation, prices).expect("every good has a positive maximum value")
}

/// Agents of minimum spending, ascending.
pub fn least_spenders(outcome: &MarketOutcome) -> Vec<usize> {
    least_spenders_among(outcome, &vec![true; outcome.agents()])
}

/// Minimum-spending agents among the `eligible` ones; empty if none is eligible.
pub fn least_spenders_among(outcome: &MarketOutcome, eligible: &[bool]) -> Vec<usize> {
    let spend = outcome.spendings();
    argmin((0..outcome.agents()).filter(|&a| eligible[a]), |a| &spend[a])
}

/// Agents of minimum utility, ascending.
pub fn least_utility_agents<V: Valuations>(vals: &V, allocation: &Allocation) -> Vec<usize> {
    let utils: Vec<V::Value> = (0..vals.agent_count())
        .map(|a| vals.bundle_value(a, allocation.bundle(a)))
        .collect();
    argmin(0..vals.agent_count(), |a| &utils[a])
}

fn argmin<'a, T: Ord + 'a>(agents: impl Iterator<Item = usize>, key: impl Fn(usize) -> &'a T) -> Vec<usize> {
    let mut best: Option<&T> = None;
    let mut out = Vec::new();
    for agent in agents {
        let k = key(agent);
        match best {
            Some(b) if k > b => {}
            Some(b) if k == b => out.push(agent),
            _ => {
                best = Some(k);
                out.clear();
                out.push(agent);
            }
        }
    }
    out
}

/// Breadth-first alternating closure of `sources`.
pub fn component_of(outcome: &MarketOutcome, graph: &MbbGraph, sources: &[usize]) -> Component {
    closure(&graph.mbb, &graph.owner, &outcome.allocation, sources)
}

/// Alternating closure over explicit MBB lists and an owner map.
pub(crate) fn closure(mbb: &[Vec<usize>], owner: &[usize], allocation: &Allocation, sources: &[usize]) -> Component {
    let n = mbb.len();
    let mut levels = vec![n; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if levels[s] == n {
            levels[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(agent) = queue.pop_front() {
        for &good in &mbb[agent] {
            let next = owner[good];
            if levels[next] == n {
                levels[next] = levels[agent] + 1;
                queue.push_back(next);
            }
        }
    }
    let agents: Vec<usize> = (0..n).filter(|&a| levels[a] < n).collect();
    let mut goods: Vec<usize> = agents
        .iter()
        .flat_map(|&a| allocation.bundle(a).iter().copied())
        .collect();
    goods.sort_unstable();
    Component { agents, goods, levels }
}

/// First violating alternating path from `sources`, scanned source by source
/// in the given order, layer by layer, candidates by (agent, good).
pub fn find_violating_path<V: Valuations>(
    vals: &V,
    outcome: &MarketOutcome,
    graph: &MbbGraph,
    mode: PathMode,
    sources: &[usize],
) -> Option<ViolatingPath> {
    let spend = outcome.spendings();
    let utils: Vec<V::Value> = (0..outcome.agents())
        .map(|a| vals.bundle_value(a, outcome.allocation.bundle(a)))
        .collect();
    search_paths(&graph.mbb, &graph.owner, sources, |source, h, j| match mode {
        PathMode::Spending => &spend[h] - &outcome.prices[j] > spend[source],
        PathMode::Utility => utils[h] > utils[source].clone() + vals.value(h, j),
    })
}

/// Layered path search shared by the market runs: `violates(source, h, j)`
/// tests the terminal agent `h` reached through its good `j`.
pub(crate) fn search_paths(
    mbb: &[Vec<usize>],
    owner: &[usize],
    sources: &[usize],
    mut violates: impl FnMut(usize, usize, usize) -> bool,
) -> Option<ViolatingPath> {
    let n = mbb.len();
    for &source in sources {
        // parent[h] = (previous agent, good owned by h that is MBB for it)
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[source] = true;
        let mut layer = vec![source];
        while !layer.is_empty() {
            let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
            for &a in &layer {
                for &j in &mbb[a] {
                    let h = owner[j];
                    if !seen[h] {
                        candidates.push((h, j, a));
                    }
                }
            }
            // layer is ascending, so the stable sort keeps the lowest predecessor first
            candidates.sort_by_key(|&(h, j, _)| (h, j));
            candidates.dedup_by_key(|c| (c.0, c.1));
            for &(h, j, a) in &candidates {
                if violates(source, h, j) {
                    let mut agents = vec![h, a];
                    let mut goods = vec![j];
                    let mut cur = a;
                    while let Some((prev, g)) = parent[cur] {
                        goods.push(g);
                        agents.push(prev);
                        cur = prev;
                    }
                    agents.reverse();
                    goods.reverse();
                    return Some(ViolatingPath { agents, goods });
                }
            }
            let mut next = Vec::new();
            for &(h, j, a) in &candidates {
                if !seen[h] {
                    seen[h] = true;
                    parent[h] = Some((a, j));
                    next.push(h);
                }
            }
            layer = next;
        }
    }
    None
}

/// Moves the path's last good from its sender to its receiver.
pub fn apply_transfer(outcome: &mut MarketOutcome, path: &ViolatingPath) {
    debug_assert_eq!(outcome.allocation.owner(path.good()), path.sender());
    outcome.allocation.transfer(path.good(), path.receiver());
}

/// Factors at which a new MBB edge leaves the component (`gamma1`) or an
/// eligible outside agent's spending meets the least spending (`gamma2`).
pub fn price_rise_factors<V: Valuations>(
    vals: &V,
    outcome: &MarketOutcome,
    graph: &MbbGraph,
    component: &Component,
    least_spending: &Rational,
    eligible: &[bool],
    mode: FactorMode,
) -> (Factor, Factor) {
    let mut gamma1 = Factor::Infinite;
    for &h in &component.agents {
        for j in 0..outcome.goods() {
            if component.contains_good(j) || !vals.is_positive(h, j) {
                continue;
            }
            let ratio = &graph.alpha[h] * &outcome.prices[j] / vals.value_rational(h, j);
            gamma1 = gamma1.min(Factor::Finite(ratio));
        }
    }
    let mut gamma2 = Factor::Infinite;
    if mode == FactorMode::WithGamma2 && !least_spending.is_zero() {
        for h in 0..outcome.agents() {
            if eligible[h] && !component.contains_agent(h) {
                gamma2 = gamma2.min(Factor::Finite(outcome.bundle_price(h) / least_spending));
            }
        }
    }
    (gamma1, gamma2)
}

/// Combines the two factors; `None` when both are infinite.
pub fn choose_beta(gamma1: Factor, gamma2: Factor) -> Option<PriceRiseFactors> {
    let trigger = if gamma2 < gamma1 {
        PriceTrigger::NewLeastSpender
    } else {
        PriceTrigger::NewMbbEdge
    };
    let beta = gamma1.clone().min(gamma2.clone()).finite()?.clone();
    debug_assert!(beta > Rational::one());
    Some(PriceRiseFactors {
        gamma1,
        gamma2,
        beta,
        trigger,
    })
}

/// Multiplies the prices of the component's goods by `beta`.
pub fn apply_price_rise(outcome: &mut MarketOutcome, component: &Component, beta: &Rational) {
    for &g in &component.goods {
        outcome.prices[g] = &outcome.prices[g] * beta;
    }
}

pub(crate) fn no_factor(step: usize) -> SolverError {
    SolverError::NoFiniteFactor { step }
}

pub(crate) fn rational_utilities<V: Valuations>(vals: &V, allocation: &Allocation) -> Vec<Rational> {
    (0..vals.agent_count())
        .map(|a| {
            allocation
                .bundle(a)
                .iter()
                .fold(Rational::zero(), |acc, &g| acc + vals.value_rational(a, g))
        })
        .collect()
}
