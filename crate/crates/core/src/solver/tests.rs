use super::*;
use crate::model::rational::int;
use crate::model::{build_mbb_graph, is_on_mbb, Allocation, Factor, Instance, MarketOutcome, PriceTrigger, Rational};
use crate::oracles::{check_ef1, check_eq1, check_fpo_lp, check_pef1};
use proptest::prelude::*;

fn inst(rows: &[&[u64]]) -> Instance {
    Instance::from_values(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn outcome(m: usize, bundles: &[&[usize]], prices: &[i64]) -> MarketOutcome {
    let alloc = Allocation::from_bundles(m, bundles.iter().map(|b| b.to_vec()).collect()).unwrap();
    MarketOutcome::new(alloc, prices.iter().map(|&p| int(p)).collect()).unwrap()
}

fn e1() -> Instance {
    inst(&[&[2, 1, 3], &[1, 2, 1]])
}

fn prices(o: &MarketOutcome) -> Vec<Rational> {
    o.prices.clone()
}

#[test]
fn initial_outcome_examples() {
    let o = initial_outcome(&e1());
    assert_eq!(o.allocation.bundles(), &[vec![0, 2], vec![1]]);
    assert_eq!(prices(&o), vec![int(2), int(2), int(3)]);
    assert!(is_on_mbb(&e1(), &o));

    let tie = inst(&[&[3, 1], &[3, 1]]);
    let o = initial_outcome(&tie);
    assert_eq!(o.allocation.bundles(), &[vec![0, 1], vec![]]);
    assert_eq!(prices(&o), vec![int(3), int(1)]);

    let single = inst(&[&[4, 1, 2]]);
    let o = initial_outcome(&single);
    assert_eq!(o.allocation.bundle(0), &[0, 1, 2]);
    assert_eq!(prices(&o), vec![int(4), int(1), int(2)]);
}

#[test]
fn least_spender_examples() {
    let o = outcome(2, &[&[0], &[1]], &[5, 2]);
    assert_eq!(least_spenders(&o), vec![1]);
    let o = outcome(2, &[&[0], &[1]], &[4, 4]);
    assert_eq!(least_spenders(&o), vec![0, 1]);
    let o = outcome(2, &[&[0, 1]], &[4, 4]);
    assert_eq!(least_spenders(&o), vec![0]);
}

#[test]
fn component_examples() {
    let vals = inst(&[&[4, 1, 1], &[1, 8, 8]]);
    let o = outcome(3, &[&[0], &[1, 2]], &[4, 8, 8]);
    let g = build_mbb_graph(&vals, &o);
    let c = component_of(&o, &g, &[0]);
    assert_eq!(c.agents, vec![0]);
    assert_eq!(c.goods, vec![0]);
    assert_eq!(c.levels, vec![0, 2]);

    let c = component_of(&o, &g, &[0, 1]);
    assert_eq!(c.agents, vec![0, 1]);
    assert_eq!(c.goods, vec![0, 1, 2]);

    let o = initial_outcome(&e1());
    let g = build_mbb_graph(&e1(), &o);
    let c = component_of(&o, &g, &[1]);
    assert_eq!(c.agents, vec![1]);
    assert_eq!(c.goods, vec![1]);
}

#[test]
fn violating_path_examples() {
    let vals = inst(&[&[3, 1], &[3, 1]]);
    let mut o = outcome(2, &[&[0, 1], &[]], &[3, 1]);
    let g = build_mbb_graph(&vals, &o);
    let path = find_violating_path(&vals, &o, &g, PathMode::Spending, &least_spenders(&o)).unwrap();
    assert_eq!(path.agents, vec![1, 0]);
    assert_eq!(path.goods, vec![0]);
    assert_eq!((path.sender(), path.receiver(), path.good()), (0, 1, 0));

    let before = o.spendings();
    apply_transfer(&mut o, &path);
    assert_eq!(o.allocation.bundles(), &[vec![1], vec![0]]);
    let after = o.spendings();
    assert_eq!(&before[0] - &after[0], int(3));
    assert_eq!(&after[1] - &before[1], int(3));
    assert!(is_on_mbb(&vals, &o));

    // E1 initial outcome is pEF1 and EQ1: no violating path in either mode
    let o = initial_outcome(&e1());
    let g = build_mbb_graph(&e1(), &o);
    assert!(check_pef1(&o, &int(0)).holds());
    assert!(find_violating_path(&e1(), &o, &g, PathMode::Spending, &least_spenders(&o)).is_none());
    let lu = least_utility_agents(&e1(), &o.allocation);
    assert!(find_violating_path(&e1(), &o, &g, PathMode::Utility, &lu).is_none());
}

#[test]
fn price_rise_example() {
    let vals = inst(&[&[4, 1, 1], &[1, 8, 8]]);
    let mut o = outcome(3, &[&[0], &[1, 2]], &[4, 8, 8]);
    let g = build_mbb_graph(&vals, &o);
    let c = component_of(&o, &g, &[0]);
    let (g1, g2) = price_rise_factors(&vals, &o, &g, &c, &int(4), &[true, true], FactorMode::WithGamma2);
    assert_eq!(g1, Factor::Finite(int(8)));
    assert_eq!(g2, Factor::Finite(int(4)));
    let f = choose_beta(g1, g2).unwrap();
    assert_eq!(f.beta, int(4));
    assert_eq!(f.trigger, PriceTrigger::NewLeastSpender);

    let (g1, g2) = price_rise_factors(&vals, &o, &g, &c, &int(4), &[true, true], FactorMode::Gamma1Only);
    assert_eq!(g2, Factor::Infinite);
    assert_eq!(choose_beta(g1, g2).unwrap().beta, int(8));

    apply_price_rise(&mut o, &c, &int(4));
    assert_eq!(prices(&o), vec![int(16), int(8), int(8)]);
    assert!(is_on_mbb(&vals, &o));
}

#[test]
fn ef1_solver_examples() {
    let run = solve_ef1_fpo(&e1()).unwrap();
    assert_eq!(run.outcome.allocation.bundles(), &[vec![0, 2], vec![1]]);
    assert_eq!(prices(&run.outcome), vec![int(2), int(2), int(3)]);
    assert!(run.trace.events.is_empty());

    let run = solve_ef1_fpo(&inst(&[&[3, 1], &[3, 1]])).unwrap();
    assert_eq!(run.outcome.allocation.bundles(), &[vec![1], vec![0]]);
    assert_eq!(run.trace.transfers(), 1);

    let run = solve_ef1_fpo(&inst(&[&[4, 1, 1], &[1, 8, 8]])).unwrap();
    assert_eq!(run.outcome.allocation.bundles(), &[vec![0], vec![1, 2]]);
    assert_eq!(prices(&run.outcome), vec![int(16), int(8), int(8)]);
    assert_eq!(run.trace.price_rises(), 1);
}

#[test]
fn saturated_least_spender_does_not_stall() {
    // agent 0 ends up empty and only values good 0, which the single-good
    // agent 2 holds; no price rise could ever reach it
    let vals = inst(&[&[1, 0, 0], &[0, 1, 1], &[1, 0, 0]]);
    let run = solve_ef1_fpo(&vals).unwrap();
    assert!(check_ef1(&vals, &run.outcome.allocation).holds());
    assert!(is_on_mbb(&vals, &run.outcome));
}

#[test]
fn eq1_solver_examples() {
    let run = solve_eq1_fpo(&e1()).unwrap();
    assert_eq!(run.outcome.allocation.bundles(), &[vec![0, 2], vec![1]]);
    assert!(run.trace.events.is_empty());

    let run = solve_eq1_fpo(&inst(&[&[1, 1], &[1, 1]])).unwrap();
    assert_eq!(run.outcome.allocation.bundles(), &[vec![1], vec![0]]);
    assert!(check_eq1(&inst(&[&[1, 1], &[1, 1]]), &run.outcome.allocation).holds());

    let run = solve_eq1_fpo(&inst(&[&[2, 5]])).unwrap();
    assert_eq!(run.outcome.allocation.bundle(0), &[0, 1]);

    assert_eq!(
        solve_eq1_fpo(&inst(&[&[1, 0], &[1, 1]])).unwrap_err(),
        SolverError::NotPositiveInstance
    );
}

#[test]
fn bounds_are_monotone() {
    assert_eq!(event_bound(2, 3, 7), (8 * 3 + 2) * (2 * 2 * 7 + 7));
    assert!(safety_budget(2, 3, 7, 1) < safety_budget(2, 3, 7, 2));
    assert_eq!(event_bound(usize::MAX, 2, 2), u64::MAX);
}

fn instance_strategy(positive: bool) -> impl Strategy<Value = Instance> {
    values_strategy(if positive { 1 } else { 0 }, 8)
}

fn values_strategy(lo: u64, hi: u64) -> impl Strategy<Value = Instance> {
    (1usize..=4, 1usize..=6).prop_flat_map(move |(n, m)| {
        proptest::collection::vec(proptest::collection::vec(lo..=hi, m), n)
            .prop_filter_map("unvalued row or column", |rows| Instance::from_values(rows).ok())
    })
}

fn audit(run: &MarketRun, n: usize, m: usize) {
    run.trace.audit_on_mbb().unwrap();
    run.trace.audit_min_monotone().unwrap();
    run.trace.audit_reentry(&run.utility_counts).unwrap();
    run.trace.audit_epoch_transfers(n.pow(3) * m).unwrap();
    assert!(run.events() <= run.event_bound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ef1_runs_are_certified(vals in instance_strategy(false)) {
        let run = solve_ef1_fpo(&vals).unwrap();
        prop_assert!(check_ef1(&vals, &run.outcome.allocation).holds());
        prop_assert!(is_on_mbb(&vals, &run.outcome));
        prop_assert!(check_fpo_lp(&vals, &run.outcome.allocation).unwrap().holds());
        audit(&run, vals.agents(), vals.goods());
    }

    #[test]
    fn sparse_ef1_runs_are_certified(vals in values_strategy(0, 2)) {
        let run = solve_ef1_fpo(&vals).unwrap();
        prop_assert!(check_ef1(&vals, &run.outcome.allocation).holds());
        prop_assert!(check_fpo_lp(&vals, &run.outcome.allocation).unwrap().holds());
        audit(&run, vals.agents(), vals.goods());
    }

    #[test]
    fn eq1_runs_are_certified(vals in instance_strategy(true)) {
        let run = solve_eq1_fpo(&vals).unwrap();
        prop_assert!(check_eq1(&vals, &run.outcome.allocation).holds());
        prop_assert!(is_on_mbb(&vals, &run.outcome));
        audit(&run, vals.agents(), vals.goods());
    }
}
