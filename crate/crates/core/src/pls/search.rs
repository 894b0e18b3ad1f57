use super::configuration::{Configuration, Evaluator, LexCost, View};
use super::scheme::EpsilonScheme;
use super::PlsError;
use crate::config::Caps;
use crate::model::Instance;
use crate::solver::{closure, search_paths};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WalkStats {
    /// Neighbor moves until the fixpoint.
    pub steps: u64,
    pub transfers: u64,
    pub price_rises: u64,
    pub new_mbb_edge: u64,
    pub envy_resolved: u64,
    pub new_least_spender: u64,
    /// Invalid inputs sent back to the initial configuration.
    pub resets: u64,
    /// Largest price exponent seen.
    pub max_exponent_used: u64,
}

#[derive(Debug, Clone)]
pub struct LocalSearchResult {
    pub configuration: Configuration,
    pub stats: WalkStats,
    /// Cost of every configuration on the walk, initial first.
    pub costs: Vec<LexCost>,
    pub walk_budget: u64,
}

pub fn initial_configuration(instance: &Instance, scheme: &EpsilonScheme) -> Configuration {
    Evaluator::new(instance, scheme).initial()
}

pub fn config_cost(instance: &Instance, scheme: &EpsilonScheme, config: &Configuration) -> LexCost {
    Evaluator::new(instance, scheme).cost(config)
}

/// Moves of one neighbor computation before it is declared runaway:
/// `4·(n+1)²·(n³m + n)`.
pub fn neighbor_budget(n: usize, m: usize) -> u64 {
    let (n, m) = (n as u64, m as u64);
    4 * (n + 1).pow(2) * (n.pow(3) * m + n)
}

/// Neighbor moves before the walk is declared runaway:
/// `n·m·(maxExponent + 1)·(m + 1)`.
pub fn walk_budget(n: usize, m: usize, max_exponent: u64) -> u64 {
    (n as u64)
        .saturating_mul(m as u64)
        .saturating_mul(max_exponent.saturating_add(1))
        .saturating_mul(m as u64 + 1)
}

/// The unique neighbor: invalid inputs go to the initial configuration;
/// valid ones run transfers and price rises until the ε-pEF1 flag is set
/// or the least spending strictly increases.
pub fn neighbor_d(
    instance: &Instance,
    scheme: &EpsilonScheme,
    config: &Configuration,
) -> Result<Configuration, PlsError> {
    let eval = Evaluator::new(instance, scheme);
    let mut stats = WalkStats::default();
    neighbor(&eval, config, &mut stats)
}

fn neighbor(eval: &Evaluator<'_>, config: &Configuration, stats: &mut WalkStats) -> Result<Configuration, PlsError> {
    if !eval.is_valid(config) {
        stats.resets += 1;
        return Ok(eval.initial());
    }
    let n = eval.instance.agents();
    let m = eval.instance.goods();
    let budget = neighbor_budget(n, m).saturating_mul(Caps::global().budget_multiplier);
    let view = eval.view(config);
    if eval.is_pef1(&view) {
        return Ok(config.clone());
    }
    let start = eval.min_spending(&view);
    let mut current = config.clone();
    let mut view = view;
    for _ in 0..budget {
        advance(eval, &mut current, &view, stats)?;
        view = eval.view(&current);
        if eval.is_pef1(&view) || eval.min_spending(&view) > start {
            return Ok(current);
        }
    }
    Err(PlsError::StepBudgetExceeded {
        what: "neighbor",
        budget,
    })
}

/// One transfer or one price rise from the least spender.
fn advance(
    eval: &Evaluator<'_>,
    config: &mut Configuration,
    view: &View,
    stats: &mut WalkStats,
) -> Result<(), PlsError> {
    let scheme = eval.scheme;
    let (b, d) = (&scheme.base_num, &scheme.base_den);
    let i = eval
        .least_spender(view)
        .expect("a non-pEF1 configuration has an eligible agent");
    let owner = config.allocation.owners().to_vec();
    let lhs = b * &view.spend[i];
    let path = search_paths(&view.mbb, &owner, &[i], |_, h, j| {
        d * (&view.spend[h] - &view.terms[j]) > lhs
    });
    if let Some(path) = path {
        config.allocation.transfer(path.good(), path.receiver());
        stats.transfers += 1;
        return Ok(());
    }
    let comp = closure(&view.mbb, &owner, &config.allocation, &[i]);
    let mut in_goods = vec![false; config.exponents.len()];
    for &g in &comp.goods {
        in_goods[g] = true;
    }
    let outside: Vec<usize> = (0..view.spend.len()).filter(|&h| !comp.contains_agent(h)).collect();

    // (a) first outside good to tie an MBB ratio of a component agent
    let mut k_a: Option<u64> = None;
    for &h in &comp.agents {
        for (g, r) in eval.rounded.exponents[h].iter().enumerate() {
            if let (Some(r), false) = (r, in_goods[g]) {
                let gap = (view.alpha[h] - (*r as i64 - config.exponents[g] as i64)) as u64;
                k_a = Some(k_a.map_or(gap, |k| k.min(gap)));
            }
        }
    }
    // (b) the least spender envies nobody outside
    let mut k_b: Option<u64> = Some(1);
    for &h in &outside {
        if view.reduced[h].is_zero() {
            continue;
        }
        let step = scheme.smallest_step(&lhs, &(d * &view.reduced[h]));
        k_b = match (k_b, step) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
    }
    // (c) an eligible outside agent reaches the least spending
    let mut k_c: Option<u64> = None;
    for &h in outside.iter().filter(|&&h| view.eligible[h]) {
        if let Some(step) = scheme.smallest_step(&view.spend[i], &view.spend[h]) {
            let step = step.max(1);
            k_c = Some(k_c.map_or(step, |k| k.min(step)));
        }
    }
    let k = [k_b, k_c, k_a]
        .iter()
        .flatten()
        .min()
        .copied()
        .ok_or(PlsError::Stalled { agent: i })?;
    if k_b == Some(k) {
        stats.envy_resolved += 1;
    } else if k_c == Some(k) {
        stats.new_least_spender += 1;
    } else {
        stats.new_mbb_edge += 1;
    }
    for &g in &comp.goods {
        let q = config.exponents[g] + k;
        if q > scheme.max_exponent {
            return Err(PlsError::PriceBoundExceeded {
                good: g,
                exponent: q,
                max: scheme.max_exponent,
            });
        }
        config.exponents[g] = q;
        stats.max_exponent_used = stats.max_exponent_used.max(q);
    }
    stats.price_rises += 1;
    Ok(())
}

/// Follows neighbors from the initial configuration to a fixpoint, which is
/// valid and ε-pEF1.
pub fn local_search(instance: &Instance, scheme: &EpsilonScheme) -> Result<LocalSearchResult, PlsError> {
    let eval = Evaluator::new(instance, scheme);
    let budget = walk_budget(instance.agents(), instance.goods(), scheme.max_exponent)
        .saturating_mul(Caps::global().budget_multiplier);
    let mut stats = WalkStats::default();
    let mut config = eval.initial();
    stats.max_exponent_used = config.exponents.iter().copied().max().unwrap_or(0);
    let mut costs = vec![eval.cost(&config)];
    loop {
        let next = neighbor(&eval, &config, &mut stats)?;
        if next == config {
            break;
        }
        stats.steps += 1;
        if stats.steps > budget {
            return Err(PlsError::StepBudgetExceeded { what: "walk", budget });
        }
        costs.push(eval.cost(&next));
        config = next;
    }
    Ok(LocalSearchResult {
        configuration: config,
        stats,
        costs,
        walk_budget: budget,
    })
}
