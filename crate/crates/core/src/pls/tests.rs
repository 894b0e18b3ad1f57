use super::*;
use crate::model::rational::ratio;
use crate::model::{is_on_mbb, Allocation, Instance, Rational};
use crate::oracles::{check_ef1, check_pef1, check_po_bruteforce};
use proptest::prelude::*;

fn inst(rows: &[&[u64]]) -> Instance {
    Instance::from_values(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn e1() -> Instance {
    inst(&[&[2, 1, 3], &[1, 2, 1]])
}

#[test]
fn cost_order() {
    let low = LexCost::Valid {
        pef1: false,
        min_spending: ratio(1, 2),
    };
    let high = LexCost::Valid {
        pef1: false,
        min_spending: ratio(3, 2),
    };
    let done = LexCost::Valid {
        pef1: true,
        min_spending: ratio(0, 1),
    };
    assert!(LexCost::Invalid < low && low < high && high < done);
    assert_eq!(LexCost::Invalid.as_pair().0, -1);
}

#[test]
fn invalid_configuration_resets() {
    let scheme = EpsilonScheme::with_epsilon(&e1(), ratio(1, 2));
    let off_mbb = Configuration {
        allocation: Allocation::from_bundles(3, vec![vec![1], vec![0, 2]]).unwrap(),
        exponents: vec![0, 0, 0],
    };
    assert_eq!(config_cost(&e1(), &scheme, &off_mbb), LexCost::Invalid);
    let next = neighbor_d(&e1(), &scheme, &off_mbb).unwrap();
    assert_eq!(next, initial_configuration(&e1(), &scheme));

    let out_of_grid = Configuration {
        exponents: vec![scheme.max_exponent + 1; 3],
        ..initial_configuration(&e1(), &scheme)
    };
    assert_eq!(config_cost(&e1(), &scheme, &out_of_grid), LexCost::Invalid);
}

#[test]
fn pef1_configuration_is_a_fixpoint() {
    let scheme = EpsilonScheme::with_epsilon(&e1(), ratio(1, 2));
    let start = initial_configuration(&e1(), &scheme);
    match config_cost(&e1(), &scheme, &start) {
        LexCost::Valid { pef1, .. } => assert!(pef1),
        LexCost::Invalid => panic!("initial configuration must be valid"),
    }
    assert_eq!(neighbor_d(&e1(), &scheme, &start).unwrap(), start);
}

#[test]
fn e1_strict_epsilon() {
    let scheme = EpsilonScheme::strict(&e1());
    let result = local_search(&e1(), &scheme).unwrap();
    let a = &result.configuration.allocation;
    assert!(check_ef1(&e1(), a).holds());
    assert!(check_po_bruteforce(&e1(), a).unwrap().holds());
}

#[test]
fn single_agent_and_identical_pair() {
    let one = inst(&[&[3, 5]]);
    let scheme = EpsilonScheme::with_epsilon(&one, ratio(1, 2));
    let result = local_search(&one, &scheme).unwrap();
    assert_eq!(result.stats.steps, 0);
    assert_eq!(result.configuration, initial_configuration(&one, &scheme));

    let pair = inst(&[&[3, 1], &[3, 1]]);
    for scheme in [
        EpsilonScheme::strict(&pair),
        EpsilonScheme::with_epsilon(&pair, ratio(1, 2)),
    ] {
        let result = local_search(&pair, &scheme).unwrap();
        let a = &result.configuration.allocation;
        assert_eq!(a.bundle(0).len(), 1);
        assert_eq!(a.bundle(1).len(), 1);
        assert!(check_ef1(&pair, a).holds());
    }
}

fn small_instance() -> impl Strategy<Value = Instance> {
    (1usize..=3, 1usize..=5).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(0u64..=6, m), n)
            .prop_filter_map("unvalued", |rows| Instance::from_values(rows).ok())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn walks_improve_and_end_fair(vals in small_instance()) {
        let scheme = EpsilonScheme::test_mode(&vals);
        let result = local_search(&vals, &scheme).unwrap();
        for pair in result.costs.windows(2) {
            prop_assert!(pair[0] < pair[1]);
        }
        prop_assert!(result.stats.steps <= result.walk_budget);
        let outcome = result.configuration.to_outcome(&scheme);
        let rounded = RoundedInstance::new(&vals, &scheme);
        prop_assert!(is_on_mbb(&rounded, &outcome));
        prop_assert!(result.stats.max_exponent_used <= scheme.max_exponent);
        match result.costs.last().unwrap() {
            LexCost::Valid { pef1, .. } => prop_assert!(*pef1),
            LexCost::Invalid => prop_assert!(false, "fixpoint is invalid"),
        }
        let a = &result.configuration.allocation;
        prop_assert!(check_ef1(&vals, a).holds());
        prop_assert!(check_po_bruteforce(&vals, a).unwrap().holds());
    }
}

#[test]
fn rational_helpers() {
    let scheme = EpsilonScheme::with_epsilon(&e1(), ratio(1, 2));
    assert_eq!(scheme.power(2), ratio(9, 4));
    assert_eq!(
        largest_power_at_most(&scheme.base_num, &scheme.base_den, &Rational::from_integer(2.into())),
        1
    );
}

#[test]
fn coarse_grid_can_lose_pareto_optimality() {
    // with ε = 1/2 the values 5 and 4 round to the same grid point
    let vals = inst(&[&[5, 4], &[2, 2]]);
    let coarse = EpsilonScheme::with_epsilon(&vals, ratio(1, 2));
    let result = local_search(&vals, &coarse).unwrap();
    let a = &result.configuration.allocation;
    assert!(check_pef1(&result.configuration.to_outcome(&coarse), &coarse.epsilon).holds());
    assert!(!check_po_bruteforce(&vals, a).unwrap().holds());

    let fine = EpsilonScheme::test_mode(&vals);
    let a = local_search(&vals, &fine).unwrap().configuration.allocation;
    assert!(check_ef1(&vals, &a).holds());
    assert!(check_po_bruteforce(&vals, &a).unwrap().holds());
}

#[test]
fn strict_epsilon_small_cases() {
    for rows in [
        &[&[2u64, 1][..], &[1, 2]][..],
        &[&[1, 1, 1], &[1, 1, 1]],
        &[&[2, 0, 1], &[1, 1, 2]],
    ] {
        let vals = inst(rows);
        let scheme = EpsilonScheme::strict(&vals);
        let result = local_search(&vals, &scheme).unwrap();
        let outcome = result.configuration.to_outcome(&scheme);
        assert!(check_pef1(&outcome, &scheme.epsilon).holds());
        assert!(check_ef1(&vals, &result.configuration.allocation).holds());
        assert!(check_po_bruteforce(&vals, &result.configuration.allocation)
            .unwrap()
            .holds());
    }
}
