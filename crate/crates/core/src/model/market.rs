use super::instance::{Allocation, ModelError, Valuations};
use super::rational::Rational;
use num_traits::{Signed, Zero};
use std::collections::VecDeque;

/// An integral allocation together with strictly positive prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketOutcome {
    pub allocation: Allocation,
    pub prices: Vec<Rational>,
}

impl MarketOutcome {
    pub fn new(allocation: Allocation, prices: Vec<Rational>) -> Result<Self, ModelError> {
        if prices.len() != allocation.goods() {
            return Err(ModelError::PriceCountMismatch {
                len: prices.len(),
                expected: allocation.goods(),
            });
        }
        if let Some(good) = prices.iter().position(|p| !p.is_positive()) {
            return Err(ModelError::NonPositivePrice { good });
        }
        Ok(MarketOutcome { allocation, prices })
    }

    pub fn agents(&self) -> usize {
        self.allocation.agents()
    }

    pub fn goods(&self) -> usize {
        self.prices.len()
    }

    /// Spending of `agent`: the total price of its bundle.
    pub fn bundle_price(&self, agent: usize) -> Rational {
        self.price_of(self.allocation.bundle(agent))
    }

    pub fn price_of(&self, goods: &[usize]) -> Rational {
        goods.iter().fold(Rational::zero(), |acc, &g| acc + &self.prices[g])
    }

    pub fn spendings(&self) -> Vec<Rational> {
        (0..self.agents()).map(|a| self.bundle_price(a)).collect()
    }

    /// Price of the agent's bundle with its single most expensive good removed.
    pub fn price_without_top(&self, agent: usize) -> Rational {
        let bundle = self.allocation.bundle(agent);
        let top = bundle.iter().map(|&g| &self.prices[g]).max();
        match top {
            Some(top) => self.bundle_price(agent) - top,
            None => Rational::zero(),
        }
    }
}

/// Maximum bang-per-buck structure at fixed prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbbGraph {
    /// Per-agent maximum bang-per-buck ratio.
    pub alpha: Vec<Rational>,
    /// Per-agent goods attaining `alpha`, ascending. Zero-valued goods never appear.
    pub mbb: Vec<Vec<usize>>,
    /// Good → owning agent.
    pub owner: Vec<usize>,
}

impl MbbGraph {
    pub fn is_mbb(&self, agent: usize, good: usize) -> bool {
        self.mbb[agent].binary_search(&good).is_ok()
    }
}

pub fn build_mbb_graph<V: Valuations>(vals: &V, outcome: &MarketOutcome) -> MbbGraph {
    let n = vals.agent_count();
    let m = vals.good_count();
    let mut alpha = Vec::with_capacity(n);
    let mut mbb = Vec::with_capacity(n);
    for agent in 0..n {
        let mut best = Rational::zero();
        let mut set = Vec::new();
        for good in 0..m {
            if !vals.is_positive(agent, good) {
                continue;
            }
            let ratio = vals.value_rational(agent, good) / &outcome.prices[good];
            match ratio.cmp(&best) {
                std::cmp::Ordering::Greater => {
                    best = ratio;
                    set.clear();
                    set.push(good);
                }
                std::cmp::Ordering::Equal => set.push(good),
                std::cmp::Ordering::Less => {}
            }
        }
        alpha.push(best);
        mbb.push(set);
    }
    MbbGraph {
        alpha,
        mbb,
        owner: outcome.allocation.owners().to_vec(),
    }
}

/// True iff every good is in its owner's MBB set (the fPO certificate).
pub fn is_on_mbb<V: Valuations>(vals: &V, outcome: &MarketOutcome) -> bool {
    let graph = build_mbb_graph(vals, outcome);
    (0..outcome.goods()).all(|g| graph.is_mbb(outcome.allocation.owner(g), g))
}

/// Agents that are permanently stuck in any MBB-respecting process.
///
/// Take the largest set `A` of agents such that every member holds at most
/// one good and positively values only goods held inside `A`; the result is
/// the part of `A` reachable, through positive-value edges, from members
/// with an empty bundle. Such an agent can never receive a good along an
/// MBB edge, is EF1 toward everyone, and nobody is EF1-envious of it.
pub fn saturated_agents<V: Valuations>(vals: &V, allocation: &Allocation) -> Vec<bool> {
    let n = vals.agent_count();
    let m = vals.good_count();
    let mut inside: Vec<bool> = (0..n).map(|a| allocation.bundle(a).len() <= 1).collect();
    loop {
        let mut changed = false;
        for agent in 0..n {
            if inside[agent] && (0..m).any(|g| vals.is_positive(agent, g) && !inside[allocation.owner(g)]) {
                inside[agent] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut result = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n)
        .filter(|&a| inside[a] && allocation.bundle(a).is_empty())
        .collect();
    for &a in &queue {
        result[a] = true;
    }
    while let Some(agent) = queue.pop_front() {
        for good in 0..m {
            if vals.is_positive(agent, good) {
                let holder = allocation.owner(good);
                if !result[holder] {
                    result[holder] = true;
                    queue.push_back(holder);
                }
            }
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational::{int, ratio};
    use crate::model::Instance;

    fn outcome(goods: usize, bundles: Vec<Vec<usize>>, prices: &[i64]) -> MarketOutcome {
        MarketOutcome::new(
            Allocation::from_bundles(goods, bundles).unwrap(),
            prices.iter().map(|&p| int(p)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn bundle_prices() {
        let o = outcome(3, vec![vec![0, 2], vec![1]], &[2, 2, 3]);
        assert_eq!(o.bundle_price(0), int(5));
        assert_eq!(o.bundle_price(1), int(2));
        let o = outcome(3, vec![vec![0], vec![1, 2]], &[4, 8, 8]);
        assert_eq!(o.bundle_price(1), int(16));
        let o = outcome(1, vec![vec![0], vec![]], &[4]);
        assert_eq!(o.bundle_price(1), int(0));
    }

    #[test]
    fn rejects_nonpositive_prices() {
        let alloc = Allocation::from_bundles(2, vec![vec![0, 1]]).unwrap();
        assert!(MarketOutcome::new(alloc.clone(), vec![int(1), int(0)]).is_err());
        assert!(MarketOutcome::new(alloc, vec![int(1)]).is_err());
    }

    #[test]
    fn mbb_graph_e1() {
        // Ratios for agent 0: 2/2, 1/2, 3/3; agent 1: 1/2, 2/2, 1/3.
        let inst = Instance::validate(2, 3, &[vec![2, 1, 3], vec![1, 2, 1]]).unwrap();
        let o = outcome(3, vec![vec![0, 2], vec![1]], &[2, 2, 3]);
        let g = build_mbb_graph(&inst, &o);
        assert_eq!(g.alpha, vec![int(1), int(1)]);
        assert_eq!(g.mbb, vec![vec![0, 2], vec![1]]);
        assert_eq!(g.owner, vec![0, 1, 0]);
        assert!(is_on_mbb(&inst, &o));
    }

    #[test]
    fn mbb_graph_skewed_prices() {
        // Row (4,1,1) at prices (4,8,8): ratios 1, 1/8, 1/8.
        let inst = Instance::validate(2, 3, &[vec![4, 1, 1], vec![1, 8, 8]]).unwrap();
        let o = outcome(3, vec![vec![0], vec![1, 2]], &[4, 8, 8]);
        let g = build_mbb_graph(&inst, &o);
        assert_eq!(g.alpha[0], int(1));
        assert_eq!(g.mbb[0], vec![0]);
        assert_eq!(g.alpha[1], int(1));
        assert_eq!(g.mbb[1], vec![1, 2]);
        assert_eq!(ratio(1, 8), inst.value_rational(0, 1) / &o.prices[1]);
    }

    #[test]
    fn unit_prices_give_argmax_sets() {
        let inst = Instance::validate(2, 3, &[vec![2, 5, 5], vec![3, 1, 0]]).unwrap();
        let o = outcome(3, vec![vec![1, 2], vec![0]], &[1, 1, 1]);
        let g = build_mbb_graph(&inst, &o);
        assert_eq!(g.mbb, vec![vec![1, 2], vec![0]]);
    }

    #[test]
    fn off_mbb_detected() {
        let inst = Instance::validate(2, 2, &[vec![2, 1], vec![1, 2]]).unwrap();
        let o = outcome(2, vec![vec![1], vec![0]], &[1, 1]);
        assert!(!is_on_mbb(&inst, &o));
    }

    #[test]
    fn single_agent_proportional_prices() {
        let inst = Instance::validate(1, 3, &[vec![3, 1, 7]]).unwrap();
        let o = outcome(3, vec![vec![0, 1, 2]], &[3, 1, 7]);
        assert!(is_on_mbb(&inst, &o));
    }

    #[test]
    fn saturation_detects_starved_group() {
        // Agents 0 and 2 only want good 0; agent 1 holds goods 1 and 2.
        let inst = Instance::validate(3, 3, &[vec![1, 0, 0], vec![0, 1, 1], vec![1, 0, 0]]).unwrap();
        let alloc = Allocation::from_bundles(3, vec![vec![0], vec![1, 2], vec![]]).unwrap();
        assert_eq!(saturated_agents(&inst, &alloc), vec![true, false, true]);
        // Nobody empty: nothing saturated.
        let inst = Instance::validate(2, 2, &[vec![1, 0], vec![0, 1]]).unwrap();
        let alloc = Allocation::from_bundles(2, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(saturated_agents(&inst, &alloc), vec![false, false]);
        // Empty agent that values a good in a big bundle is not saturated.
        let inst = Instance::validate(2, 2, &[vec![1, 1], vec![1, 1]]).unwrap();
        let alloc = Allocation::from_bundles(2, vec![vec![0, 1], vec![]]).unwrap();
        assert_eq!(saturated_agents(&inst, &alloc), vec![false, false]);
    }
}
