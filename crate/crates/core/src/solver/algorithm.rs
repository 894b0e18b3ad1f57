use super::steps::{
    apply_price_rise, apply_transfer, choose_beta, component_of, find_violating_path, initial_outcome,
    least_spenders_among, least_utility_agents, no_factor, price_rise_factors, rational_utilities, FactorMode,
    PathMode,
};
use super::SolverError;
use crate::config::Caps;
use crate::model::{
    build_mbb_graph, is_on_mbb, saturated_agents, MarketOutcome, Rational, TraceEventKind, TraceLog, TraceMode,
    TraceSnapshot, Valuations,
};
use crate::oracles::{check_eq1, pef1_violation};
use crate::structured::achievable_utilities;
use num_traits::Zero;

/// Largest subset-sum table built when sizing the event budget.
const UTILITY_TABLE_CAP: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct MarketRun {
    pub outcome: MarketOutcome,
    pub trace: TraceLog,
    /// Distinct achievable utilities per agent (`U_i`), saturating.
    pub utility_counts: Vec<usize>,
    /// Explicit polynomial bound on the number of events.
    pub event_bound: u64,
}

impl MarketRun {
    pub fn events(&self) -> u64 {
        self.trace.events.len() as u64
    }
}

/// `(n³m + n)·(2nU + 3n + 1)`: events per least-set epoch times epochs.
///
/// An agent re-enters the least set at most `U` times and can drop out by
/// saturation once, so the least set changes at most `2nU + 3n` times; within
/// one epoch there are at most `n³m` transfers and `n` price rises.
pub fn event_bound(n: usize, m: usize, u: usize) -> u64 {
    let (n, m, u) = (n as u64, m as u64, u as u64);
    let per_epoch = n.saturating_pow(3).saturating_mul(m).saturating_add(n);
    let epochs = 2u64
        .saturating_mul(n)
        .saturating_mul(u)
        .saturating_add(n.saturating_mul(3).saturating_add(1));
    per_epoch.saturating_mul(epochs)
}

/// Abort threshold: `10·n³m·(nU + n)` scaled by the configured multiplier.
pub fn safety_budget(n: usize, m: usize, u: usize, multiplier: u64) -> u64 {
    let (n, m, u) = (n as u64, m as u64, u as u64);
    10u64
        .saturating_mul(n.saturating_pow(3))
        .saturating_mul(m)
        .saturating_mul(n.saturating_mul(u).saturating_add(n))
        .saturating_mul(multiplier)
}

fn utility_counts<V: Valuations>(vals: &V) -> Vec<usize> {
    match achievable_utilities(vals, UTILITY_TABLE_CAP) {
        Ok(t) => t.counts(),
        Err(_) => {
            let all = 1usize.checked_shl(vals.good_count() as u32).unwrap_or(usize::MAX);
            vec![all; vals.agent_count()]
        }
    }
}

fn min_of<'a>(values: impl Iterator<Item = &'a Rational>) -> Option<Rational> {
    values.min().cloned()
}

struct Driver<'a, V: Valuations> {
    vals: &'a V,
    mode: TraceMode,
    outcome: MarketOutcome,
    trace: TraceLog,
    budget: u64,
}

impl<'a, V: Valuations> Driver<'a, V> {
    fn new(vals: &'a V, mode: TraceMode, budget: u64) -> Self {
        let outcome = initial_outcome(vals);
        let initial = snapshot(vals, &outcome, mode, &Rational::zero());
        Driver {
            vals,
            mode,
            outcome,
            trace: TraceLog::new(mode, initial),
            budget,
        }
    }

    fn record(&mut self, kind: TraceEventKind) -> Result<(), SolverError> {
        let previous = self.trace.final_snapshot().min_spending.clone();
        let after = snapshot(self.vals, &self.outcome, self.mode, &previous);
        self.trace.push(kind, after);
        let events = self.trace.events.len() as u64;
        if events > self.budget {
            return Err(SolverError::IterationBudgetExceeded {
                events,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// Least set and minima right after an event. In spending mode saturated
/// agents are left out; `fallback` is the minimum spending reported when
/// every agent is saturated.
fn snapshot<V: Valuations>(vals: &V, outcome: &MarketOutcome, mode: TraceMode, fallback: &Rational) -> TraceSnapshot {
    let utilities = rational_utilities(vals, &outcome.allocation);
    let spend = outcome.spendings();
    let min_utility = min_of(utilities.iter()).unwrap_or_else(Rational::zero);
    let (least, min_spending, saturated) = match mode {
        TraceMode::Spending => {
            let sat = saturated_agents(vals, &outcome.allocation);
            let eligible: Vec<bool> = sat.iter().map(|s| !s).collect();
            let least = least_spenders_among(outcome, &eligible);
            let min = least.first().map_or_else(|| fallback.clone(), |&a| spend[a].clone());
            let saturated = (0..sat.len()).filter(|&a| sat[a]).collect();
            (least, min, saturated)
        }
        TraceMode::Utility => {
            let least = least_utility_agents(vals, &outcome.allocation);
            let min = min_of(spend.iter()).unwrap_or_else(Rational::zero);
            (least, min, Vec::new())
        }
    };
    TraceSnapshot {
        least,
        min_spending,
        min_utility,
        utilities,
        saturated,
        on_mbb: is_on_mbb(vals, outcome),
    }
}

fn budgets<V: Valuations>(vals: &V) -> (Vec<usize>, u64, u64) {
    let counts = utility_counts(vals);
    let u = counts.iter().copied().max().unwrap_or(1);
    let (n, m) = (vals.agent_count(), vals.good_count());
    let bound = event_bound(n, m, u);
    let budget = safety_budget(n, m, u, Caps::global().budget_multiplier).max(bound);
    (counts, bound, budget)
}

/// Price-rise market run ending in a pEF1 outcome on MBB, hence EF1 and fPO.
pub fn solve_ef1_fpo<V: Valuations>(vals: &V) -> Result<MarketRun, SolverError> {
    let (utility_counts, event_bound, budget) = budgets(vals);
    let mut d = Driver::new(vals, TraceMode::Spending, budget);
    loop {
        let eligible: Vec<bool> = saturated_agents(vals, &d.outcome.allocation)
            .into_iter()
            .map(|s| !s)
            .collect();
        let least = least_spenders_among(&d.outcome, &eligible);
        if least.is_empty() {
            break;
        }
        let graph = build_mbb_graph(vals, &d.outcome);
        if let Some(path) = find_violating_path(vals, &d.outcome, &graph, PathMode::Spending, &least) {
            apply_transfer(&mut d.outcome, &path);
            d.record(TraceEventKind::Transfer {
                good: path.good(),
                from_agent: path.sender(),
                to_agent: path.receiver(),
                path_length: path.len(),
            })?;
            continue;
        }
        if pef1_violation(&d.outcome, &Rational::zero(), |a| eligible[a]).is_none() {
            break;
        }
        let component = component_of(&d.outcome, &graph, &least);
        let least_spending = d.outcome.bundle_price(least[0]);
        let (g1, g2) = price_rise_factors(
            vals,
            &d.outcome,
            &graph,
            &component,
            &least_spending,
            &eligible,
            FactorMode::WithGamma2,
        );
        let factors = choose_beta(g1, g2).ok_or_else(|| no_factor(d.trace.events.len() + 1))?;
        apply_price_rise(&mut d.outcome, &component, &factors.beta);
        d.record(TraceEventKind::PriceRise {
            component_agents: component.agents,
            component_goods: component.goods,
            beta: factors.beta,
            trigger: factors.trigger,
        })?;
    }
    Ok(MarketRun {
        outcome: d.outcome,
        trace: d.trace,
        utility_counts,
        event_bound,
    })
}

/// Least-utility variant for strictly positive instances, ending EQ1 on MBB.
pub fn solve_eq1_fpo<V: Valuations>(vals: &V) -> Result<MarketRun, SolverError> {
    let n = vals.agent_count();
    let m = vals.good_count();
    if (0..n).any(|a| (0..m).any(|g| !vals.is_positive(a, g))) {
        return Err(SolverError::NotPositiveInstance);
    }
    let (utility_counts, event_bound, budget) = budgets(vals);
    let mut d = Driver::new(vals, TraceMode::Utility, budget);
    let everyone = vec![true; n];
    loop {
        let least = least_utility_agents(vals, &d.outcome.allocation);
        let graph = build_mbb_graph(vals, &d.outcome);
        if let Some(path) = find_violating_path(vals, &d.outcome, &graph, PathMode::Utility, &least) {
            apply_transfer(&mut d.outcome, &path);
            d.record(TraceEventKind::Transfer {
                good: path.good(),
                from_agent: path.sender(),
                to_agent: path.receiver(),
                path_length: path.len(),
            })?;
            continue;
        }
        if check_eq1(vals, &d.outcome.allocation).holds() {
            break;
        }
        let component = component_of(&d.outcome, &graph, &least);
        let (g1, g2) = price_rise_factors(
            vals,
            &d.outcome,
            &graph,
            &component,
            &Rational::zero(),
            &everyone,
            FactorMode::Gamma1Only,
        );
        let factors = choose_beta(g1, g2).ok_or_else(|| no_factor(d.trace.events.len() + 1))?;
        apply_price_rise(&mut d.outcome, &component, &factors.beta);
        d.record(TraceEventKind::PriceRise {
            component_agents: component.agents,
            component_goods: component.goods,
            beta: factors.beta,
            trigger: factors.trigger,
        })?;
    }
    Ok(MarketRun {
        outcome: d.outcome,
        trace: d.trace,
        utility_counts,
        event_bound,
    })
}
