use super::scheme::{EpsilonScheme, PowerCache, RoundedInstance};
use crate::model::{saturated_agents, Allocation, Instance, MarketOutcome, Rational};
use num_bigint::BigUint;
use num_traits::Zero;

/// An allocation with prices `p_j = (1+ε)^{q_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub allocation: Allocation,
    pub exponents: Vec<u64>,
}

impl Configuration {
    pub fn to_outcome(&self, scheme: &EpsilonScheme) -> MarketOutcome {
        let prices = self.exponents.iter().map(|&q| scheme.power(q)).collect();
        MarketOutcome::new(self.allocation.clone(), prices).expect("grid prices are positive")
    }
}

/// `Invalid` sits below every valid cost; valid costs compare by the
/// ε-pEF1 flag first, then by minimum spending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LexCost {
    Invalid,
    Valid { pef1: bool, min_spending: Rational },
}

impl LexCost {
    /// The `(δ, min spending)` pair, `(-1, -1)` for invalid configurations.
    pub fn as_pair(&self) -> (i8, Rational) {
        match self {
            LexCost::Invalid => (-1, Rational::from_integer((-1).into())),
            LexCost::Valid { pef1, min_spending } => (*pef1 as i8, min_spending.clone()),
        }
    }
}

/// Exact evaluation of configurations against the rounded values.
///
/// Spendings are integers `N_i = Σ B^{q_j} D^{Q-q_j}` over the common
/// denominator `D^Q`, where `1+ε = B/D` and `Q = max_j q_j`.
pub(crate) struct Evaluator<'a> {
    pub instance: &'a Instance,
    pub scheme: &'a EpsilonScheme,
    pub rounded: RoundedInstance,
    pub cache: PowerCache<'a>,
}

/// Derived quantities of one configuration.
pub(crate) struct View {
    /// `Q`: prices are `term / D^Q`.
    pub top: u64,
    /// Per-good numerators over `D^Q`.
    pub terms: Vec<BigUint>,
    pub spend: Vec<BigUint>,
    /// Spending without the most expensive good.
    pub reduced: Vec<BigUint>,
    /// Per agent: `max_j (r_ij - q_j)` over positively valued goods.
    pub alpha: Vec<i64>,
    pub mbb: Vec<Vec<usize>>,
    pub eligible: Vec<bool>,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance, scheme: &'a EpsilonScheme) -> Self {
        Evaluator {
            instance,
            scheme,
            rounded: RoundedInstance::new(instance, scheme),
            cache: PowerCache::new(scheme),
        }
    }

    pub fn initial(&self) -> Configuration {
        let n = self.instance.agents();
        let m = self.instance.goods();
        let mut owner = Vec::with_capacity(m);
        let mut exponents = Vec::with_capacity(m);
        for good in 0..m {
            let mut best: Option<(usize, u64)> = None;
            for agent in 0..n {
                if let Some(r) = self.rounded.exponents[agent][good] {
                    if best.is_none_or(|(_, b)| r > b) {
                        best = Some((agent, r));
                    }
                }
            }
            let (agent, r) = best.expect("every good is valued by someone");
            owner.push(agent);
            exponents.push(r);
        }
        Configuration {
            allocation: Allocation::from_owners_unchecked(n, owner),
            exponents,
        }
    }

    pub fn view(&self, config: &Configuration) -> View {
        let n = self.instance.agents();
        let m = self.instance.goods();
        let top = config.exponents.iter().copied().max().unwrap_or(0);
        let terms: Vec<BigUint> = config
            .exponents
            .iter()
            .map(|&q| self.cache.num(q) * self.cache.den(top - q))
            .collect();
        let mut spend = Vec::with_capacity(n);
        let mut reduced = Vec::with_capacity(n);
        for agent in 0..n {
            let bundle = config.allocation.bundle(agent);
            let total: BigUint = bundle.iter().map(|&g| &terms[g]).sum();
            let max = bundle.iter().map(|&g| &terms[g]).max();
            reduced.push(match max {
                Some(t) => &total - t,
                None => BigUint::zero(),
            });
            spend.push(total);
        }
        let mut alpha = Vec::with_capacity(n);
        let mut mbb = Vec::with_capacity(n);
        for agent in 0..n {
            let mut best = i64::MIN;
            let mut set = Vec::new();
            for good in 0..m {
                if let Some(r) = self.rounded.exponents[agent][good] {
                    let bpb = r as i64 - config.exponents[good] as i64;
                    if bpb > best {
                        best = bpb;
                        set.clear();
                        set.push(good);
                    } else if bpb == best {
                        set.push(good);
                    }
                }
            }
            alpha.push(best);
            mbb.push(set);
        }
        let eligible = saturated_agents(&self.rounded, &config.allocation)
            .into_iter()
            .map(|s| !s)
            .collect();
        View {
            top,
            terms,
            spend,
            reduced,
            alpha,
            mbb,
            eligible,
        }
    }

    /// Integral, on MBB for the rounded values, exponents within the grid.
    pub fn is_valid(&self, config: &Configuration) -> bool {
        let n = self.instance.agents();
        let m = self.instance.goods();
        if config.exponents.len() != m
            || config.allocation.goods() != m
            || config.allocation.agents() != n
            || config.exponents.iter().any(|&q| q > self.scheme.max_exponent)
        {
            return false;
        }
        let view = self.view(config);
        (0..m).all(|g| {
            let o = config.allocation.owner(g);
            view.mbb[o].binary_search(&g).is_ok()
        })
    }

    /// Eligible agent of least spending, lowest index on ties.
    pub fn least_spender(&self, view: &View) -> Option<usize> {
        (0..view.spend.len())
            .filter(|&a| view.eligible[a])
            .min_by(|&a, &b| view.spend[a].cmp(&view.spend[b]).then(a.cmp(&b)))
    }

    /// `(1+ε)·p(x_i) >= p(x_h \ top)` for every eligible envier `i`.
    pub fn is_pef1(&self, view: &View) -> bool {
        let b = &self.scheme.base_num;
        let d = &self.scheme.base_den;
        let n = view.spend.len();
        (0..n).filter(|&i| view.eligible[i]).all(|i| {
            let lhs = b * &view.spend[i];
            (0..n).all(|h| h == i || view.reduced[h].is_zero() || lhs >= d * &view.reduced[h])
        })
    }

    pub fn min_spending(&self, view: &View) -> Rational {
        match self.least_spender(view) {
            Some(i) => Rational::new(view.spend[i].clone().into(), self.cache.den(view.top).into()),
            None => Rational::zero(),
        }
    }

    pub fn cost(&self, config: &Configuration) -> LexCost {
        if !self.is_valid(config) {
            return LexCost::Invalid;
        }
        let view = self.view(config);
        LexCost::Valid {
            pef1: self.is_pef1(&view),
            min_spending: self.min_spending(&view),
        }
    }
}
