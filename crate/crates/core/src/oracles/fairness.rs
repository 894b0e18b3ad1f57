//! Up-to-one-good fairness checks. A comparison against an empty bundle
//! holds vacuously.

use super::verdict::{Verdict, Witness};
use crate::model::{Allocation, MarketOutcome, Rational, Valuations};
use num_traits::{One, Zero};

/// Envy-freeness up to one good.
pub fn check_ef1<V: Valuations>(vals: &V, allocation: &Allocation) -> Verdict {
    let n = vals.agent_count();
    for envier in 0..n {
        let own = vals.bundle_value(envier, allocation.bundle(envier));
        for envied in 0..n {
            if envied == envier || allocation.bundle(envied).is_empty() {
                continue;
            }
            let bundle = allocation.bundle(envied);
            let top = bundle.iter().map(|&g| vals.value(envier, g)).max().unwrap();
            if own.clone() + top < vals.bundle_value(envier, bundle) {
                return Verdict::fail(Witness::Envy { envier, envied });
            }
        }
    }
    Verdict::pass()
}

/// Equitability up to one good: `v_i(x_i) >= v_h(x_h \ {j})` for some `j`.
pub fn check_eq1<V: Valuations>(vals: &V, allocation: &Allocation) -> Verdict {
    let n = vals.agent_count();
    let utilities: Vec<V::Value> = (0..n).map(|a| vals.bundle_value(a, allocation.bundle(a))).collect();
    for envier in 0..n {
        for envied in 0..n {
            if envied == envier || allocation.bundle(envied).is_empty() {
                continue;
            }
            let top = allocation
                .bundle(envied)
                .iter()
                .map(|&g| vals.value(envied, g))
                .max()
                .unwrap();
            if utilities[envier].clone() + top < utilities[envied] {
                return Verdict::fail(Witness::Envy { envier, envied });
            }
        }
    }
    Verdict::pass()
}

/// Price envy-freeness up to one good with slack: `(1+eps)·p(x_i) >= p(x_h \ {j})`.
pub fn check_pef1(outcome: &MarketOutcome, epsilon: &Rational) -> Verdict {
    match pef1_violation(outcome, epsilon, |_| true) {
        Some((envier, envied)) => Verdict::fail(Witness::Envy { envier, envied }),
        None => Verdict::pass(),
    }
}

/// First `(envier, envied)` pair, in index order, that violates ε-pEF1
/// among the enviers accepted by `consider`.
pub fn pef1_violation(
    outcome: &MarketOutcome,
    epsilon: &Rational,
    consider: impl Fn(usize) -> bool,
) -> Option<(usize, usize)> {
    let n = outcome.agents();
    let scale = Rational::one() + epsilon;
    let spend: Vec<Rational> = outcome.spendings();
    let reduced: Vec<Rational> = (0..n).map(|a| outcome.price_without_top(a)).collect();
    for envier in (0..n).filter(|&a| consider(a)) {
        let lhs = &scale * &spend[envier];
        for envied in 0..n {
            if envied != envier && !reduced[envied].is_zero() && lhs < reduced[envied] {
                return Some((envier, envied));
            }
        }
    }
    None
}
