use super::labels::{feasible_for_target, label_goods};
use super::utilities::achievable_utilities;
use super::StructuredError;
use crate::config::Caps;
use crate::model::{utility, Instance};
use crate::oracles::{compare_scores, leximin_key, Best, NashScore, Objective, Score};

pub fn solve_constant_nk(instance: &Instance, objective: Objective<'_>) -> Result<Best, StructuredError> {
    solve_constant_nk_capped(instance, objective, Caps::global().enumeration)
}

/// Optimizes over achievable utility vectors `T_1 × … × T_n` instead of
/// allocations: vectors are visited best score first (lexicographic vector
/// order on ties) and the first one with a feasible allocation wins.
/// Predicate mode visits vectors in lexicographic order and tests the
/// canonical allocation reconstructed for each feasible one.
pub fn solve_constant_nk_capped(
    instance: &Instance,
    objective: Objective<'_>,
    cap: u64,
) -> Result<Best, StructuredError> {
    let targets = achievable_utilities(instance, usize::try_from(cap).unwrap_or(usize::MAX))?;
    let sizes = targets.counts();
    let total = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))
        .filter(|&t| t <= cap)
        .ok_or(StructuredError::CapExceeded {
            what: "utility vector space",
            size: sizes.iter().fold(1u64, |acc, &s| acc.saturating_mul(s as u64)),
            cap,
        })?;
    let table = label_goods(instance);
    let n = instance.agents();
    let decode = |mut index: u64| -> Vec<u64> {
        let mut out = vec![0; n];
        for agent in (0..n).rev() {
            let s = sizes[agent] as u64;
            out[agent] = targets.per_agent[agent][(index % s) as usize];
            index /= s;
        }
        out
    };
    match objective {
        Objective::Predicate(accept) => {
            for index in 0..total {
                let vector = decode(index);
                if let Some(allocation) = feasible_for_target(&table, &vector) {
                    if accept(&allocation) {
                        return Ok(Best {
                            allocation,
                            utilities: vector,
                            score: Score::Satisfied,
                        });
                    }
                }
            }
            Err(StructuredError::NotFound)
        }
        Objective::MaxNash | Objective::Leximin => {
            let nash = matches!(objective, Objective::MaxNash);
            let score_of = |v: &[u64]| {
                if nash {
                    Score::Nash(NashScore::from_utilities(v))
                } else {
                    Score::Leximin(leximin_key(v))
                }
            };
            let mut order: Vec<(Score, u64)> = (0..total).map(|i| (score_of(&decode(i)), i)).collect();
            order.sort_by(|a, b| compare_scores(&b.0, &a.0).then(a.1.cmp(&b.1)));
            for (score, index) in order {
                let vector = decode(index);
                if let Some(allocation) = feasible_for_target(&table, &vector) {
                    debug_assert!((0..n).all(|a| utility(instance, &allocation, a) == vector[a]));
                    return Ok(Best {
                        allocation,
                        utilities: vector,
                        score,
                    });
                }
            }
            unreachable!("the all-to-first-agent vector is always feasible")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Allocation;
    use crate::oracles::{bruteforce_best, check_ef1};
    use proptest::prelude::*;

    fn e1() -> Instance {
        Instance::validate(2, 3, &[vec![2, 1, 3], vec![1, 2, 1]]).unwrap()
    }

    #[test]
    fn e1_objectives() {
        let best = solve_constant_nk(&e1(), Objective::MaxNash).unwrap();
        assert_eq!(best.allocation.bundles(), &[vec![0, 2], vec![1]]);
        assert_eq!(best.utilities, vec![5, 2]);
        let best = solve_constant_nk(&e1(), Objective::Leximin).unwrap();
        assert_eq!(best.score, Score::Leximin(vec![3, 3]));
    }

    #[test]
    fn identical_agents_single_label() {
        let inst = Instance::validate(2, 4, &[vec![1; 4], vec![1; 4]]).unwrap();
        let best = solve_constant_nk(&inst, Objective::MaxNash).unwrap();
        assert_eq!(best.utilities, vec![2, 2]);
    }

    #[test]
    fn predicate_and_not_found() {
        let inst = e1();
        let ef1 = |a: &Allocation| check_ef1(&inst, a).holds();
        let best = solve_constant_nk(&inst, Objective::Predicate(&ef1)).unwrap();
        assert!(check_ef1(&inst, &best.allocation).holds());
        let never = |_: &Allocation| false;
        assert_eq!(
            solve_constant_nk(&inst, Objective::Predicate(&never)).unwrap_err(),
            StructuredError::NotFound
        );
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            solve_constant_nk_capped(&e1(), Objective::MaxNash, 10),
            Err(StructuredError::CapExceeded { .. })
        ));
    }

    fn kary(k: u64) -> impl Strategy<Value = Instance> {
        (1usize..=3, 1usize..=7).prop_flat_map(move |(n, m)| {
            let row = proptest::collection::vec(0u64..=9, k as usize)
                .prop_flat_map(move |palette| proptest::collection::vec(proptest::sample::select(palette), m));
            proptest::collection::vec(row, n).prop_filter_map("unvalued", |rows| Instance::from_values(rows).ok())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(80))]

        #[test]
        fn matches_bruteforce(inst in kary(2)) {
            let a = solve_constant_nk(&inst, Objective::MaxNash).unwrap();
            let b = bruteforce_best(&inst, Objective::MaxNash).unwrap();
            prop_assert_eq!(a.score, b.score);
            let a = solve_constant_nk(&inst, Objective::Leximin).unwrap();
            let b = bruteforce_best(&inst, Objective::Leximin).unwrap();
            prop_assert_eq!(a.score, b.score);
        }
    }
}
