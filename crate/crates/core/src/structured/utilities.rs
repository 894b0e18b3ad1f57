use super::StructuredError;
use crate::model::Valuations;
use num_traits::Zero;
use std::collections::BTreeSet;

/// Achievable bundle utilities per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityTargets<T> {
    /// Ascending set of subset sums for each agent; always contains zero.
    pub per_agent: Vec<Vec<T>>,
}

impl<T> UtilityTargets<T> {
    /// Largest per-agent count of distinct achievable utilities.
    pub fn max_count(&self) -> usize {
        self.per_agent.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.per_agent.iter().map(Vec::len).collect()
    }
}

/// Subset-sum table per agent. Any subset of goods is some agent's bundle in
/// some allocation, so these are exactly the achievable utilities.
pub fn achievable_utilities<V: Valuations>(vals: &V, cap: usize) -> Result<UtilityTargets<V::Value>, StructuredError> {
    let mut per_agent = Vec::with_capacity(vals.agent_count());
    for agent in 0..vals.agent_count() {
        let mut sums: BTreeSet<V::Value> = BTreeSet::new();
        sums.insert(V::Value::zero());
        for good in 0..vals.good_count() {
            let v = vals.value(agent, good);
            if v.is_zero() {
                continue;
            }
            let shifted: Vec<V::Value> = sums.iter().map(|s| s.clone() + v.clone()).collect();
            sums.extend(shifted);
            if sums.len() > cap {
                return Err(StructuredError::CapExceeded {
                    what: "achievable utility table",
                    size: sums.len() as u64,
                    cap: cap as u64,
                });
            }
        }
        per_agent.push(sums.into_iter().collect());
    }
    Ok(UtilityTargets { per_agent })
}
