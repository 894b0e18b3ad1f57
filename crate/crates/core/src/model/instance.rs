use super::rational::{uint, Rational};
use num_traits::Zero;
use std::collections::BTreeSet;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("instance must have at least one agent and one good (got n={agents}, m={goods})")]
    EmptyInstance { agents: usize, goods: usize },
    #[error("valuation matrix has {rows} rows, expected {expected}")]
    RowCountMismatch { rows: usize, expected: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    RowLengthMismatch { row: usize, len: usize, expected: usize },
    #[error("negative value {value} at agent {agent}, good {good}")]
    NegativeValue { agent: usize, good: usize, value: i64 },
    #[error("good {good} is valued at zero by every agent")]
    UnvaluedGood { good: usize },
    #[error("agent {agent} values every good at zero")]
    UnvaluedAgent { agent: usize },
    #[error("allocation has {bundles} bundles for {agents} agents")]
    BundleCountMismatch { bundles: usize, agents: usize },
    #[error("good {good} is out of range (m={goods})")]
    GoodOutOfRange { good: usize, goods: usize },
    #[error("good {good} is assigned more than once")]
    DuplicateGood { good: usize },
    #[error("good {good} is not assigned to any agent")]
    MissingGood { good: usize },
    #[error("agent {agent} is out of range (n={agents})")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("price vector has {len} entries, expected {expected}")]
    PriceCountMismatch { len: usize, expected: usize },
    #[error("price of good {good} is not strictly positive")]
    NonPositivePrice { good: usize },
}

/// Additive valuations over `agent_count()` agents and `good_count()` goods.
///
/// Implemented for integer instances and for the rationally perturbed
/// instances; solvers and oracles are generic over it.
pub trait Valuations {
    type Value: Clone + Ord + Debug + Zero + Add<Output = Self::Value> + AddAssign + Sub<Output = Self::Value>;

    fn agent_count(&self) -> usize;
    fn good_count(&self) -> usize;
    fn value(&self, agent: usize, good: usize) -> Self::Value;
    fn value_rational(&self, agent: usize, good: usize) -> Rational;

    fn is_positive(&self, agent: usize, good: usize) -> bool {
        !self.value(agent, good).is_zero()
    }

    fn bundle_value(&self, agent: usize, bundle: &[usize]) -> Self::Value {
        let mut total = Self::Value::zero();
        for &good in bundle {
            total += self.value(agent, good);
        }
        total
    }
}

/// A validated fair division instance with nonnegative integer valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    values: Vec<Vec<u64>>,
    goods: usize,
}

impl Instance {
    /// Validates a raw matrix (rows = agents) against the declared dimensions.
    pub fn validate(agents: usize, goods: usize, raw: &[Vec<i64>]) -> Result<Self, ModelError> {
        if agents == 0 || goods == 0 {
            return Err(ModelError::EmptyInstance { agents, goods });
        }
        if raw.len() != agents {
            return Err(ModelError::RowCountMismatch {
                rows: raw.len(),
                expected: agents,
            });
        }
        let mut values = Vec::with_capacity(agents);
        for (agent, row) in raw.iter().enumerate() {
            if row.len() != goods {
                return Err(ModelError::RowLengthMismatch {
                    row: agent,
                    len: row.len(),
                    expected: goods,
                });
            }
            let mut out = Vec::with_capacity(goods);
            for (good, &value) in row.iter().enumerate() {
                if value < 0 {
                    return Err(ModelError::NegativeValue { agent, good, value });
                }
                out.push(value as u64);
            }
            values.push(out);
        }
        Self::from_values(values)
    }

    /// Builds an instance from an unsigned matrix, checking coverage rules.
    pub fn from_values(values: Vec<Vec<u64>>) -> Result<Self, ModelError> {
        let agents = values.len();
        let goods = values.first().map_or(0, Vec::len);
        if agents == 0 || goods == 0 {
            return Err(ModelError::EmptyInstance { agents, goods });
        }
        for (row, r) in values.iter().enumerate() {
            if r.len() != goods {
                return Err(ModelError::RowLengthMismatch {
                    row,
                    len: r.len(),
                    expected: goods,
                });
            }
        }
        for good in 0..goods {
            if values.iter().all(|r| r[good] == 0) {
                return Err(ModelError::UnvaluedGood { good });
            }
        }
        for (agent, r) in values.iter().enumerate() {
            if r.iter().all(|&v| v == 0) {
                return Err(ModelError::UnvaluedAgent { agent });
            }
        }
        Ok(Instance { values, goods })
    }

    pub fn agents(&self) -> usize {
        self.values.len()
    }

    pub fn goods(&self) -> usize {
        self.goods
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.values
    }

    pub fn row(&self, agent: usize) -> &[u64] {
        &self.values[agent]
    }

    pub fn v(&self, agent: usize, good: usize) -> u64 {
        self.values[agent][good]
    }

    pub fn vmax(&self) -> u64 {
        self.values.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Largest number of distinct values any single agent uses.
    pub fn arity(&self) -> usize {
        self.values
            .iter()
            .map(|r| r.iter().collect::<BTreeSet<_>>().len())
            .max()
            .unwrap_or(0)
    }

    pub fn is_positive_instance(&self) -> bool {
        self.values.iter().flatten().all(|&v| v > 0)
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().flatten().all(|&v| v <= 1)
    }

    /// Total value of all goods for `agent`.
    pub fn grand_value(&self, agent: usize) -> u64 {
        self.values[agent].iter().sum()
    }
}

impl Valuations for Instance {
    type Value = u64;

    fn agent_count(&self) -> usize {
        self.agents()
    }

    fn good_count(&self) -> usize {
        self.goods
    }

    fn value(&self, agent: usize, good: usize) -> u64 {
        self.values[agent][good]
    }

    fn value_rational(&self, agent: usize, good: usize) -> Rational {
        uint(self.values[agent][good])
    }
}

/// Sum of an agent's values over its bundle.
pub fn utility<V: Valuations>(vals: &V, allocation: &Allocation, agent: usize) -> V::Value {
    vals.bundle_value(agent, allocation.bundle(agent))
}

/// An integral allocation: each good belongs to exactly one agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    owner: Vec<usize>,
    bundles: Vec<Vec<usize>>,
}

impl Allocation {
    /// From per-agent bundles. Bundles must partition `0..goods`.
    pub fn from_bundles(goods: usize, bundles: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let mut owner = vec![usize::MAX; goods];
        for (agent, bundle) in bundles.iter().enumerate() {
            for &good in bundle {
                if good >= goods {
                    return Err(ModelError::GoodOutOfRange { good, goods });
                }
                if owner[good] != usize::MAX {
                    return Err(ModelError::DuplicateGood { good });
                }
                owner[good] = agent;
            }
        }
        if let Some(good) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(ModelError::MissingGood { good });
        }
        Ok(Self::from_owners_unchecked(bundles.len(), owner))
    }

    /// From a good → agent map.
    pub fn from_owners(agents: usize, owner: Vec<usize>) -> Result<Self, ModelError> {
        if let Some(&agent) = owner.iter().find(|&&a| a >= agents) {
            return Err(ModelError::AgentOutOfRange { agent, agents });
        }
        Ok(Self::from_owners_unchecked(agents, owner))
    }

    pub(crate) fn from_owners_unchecked(agents: usize, owner: Vec<usize>) -> Self {
        let mut bundles = vec![Vec::new(); agents];
        for (good, &agent) in owner.iter().enumerate() {
            bundles[agent].push(good);
        }
        Allocation { owner, bundles }
    }

    pub fn agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn goods(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, good: usize) -> usize {
        self.owner[good]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn bundle(&self, agent: usize) -> &[usize] {
        &self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    /// Moves `good` to `to`; bundles stay sorted.
    pub fn transfer(&mut self, good: usize, to: usize) {
        let from = self.owner[good];
        if from == to {
            return;
        }
        self.bundles[from].retain(|&g| g != good);
        let pos = self.bundles[to].partition_point(|&g| g < good);
        self.bundles[to].insert(pos, good);
        self.owner[good] = to;
    }

    pub fn check_dimensions<V: Valuations>(&self, vals: &V) -> Result<(), ModelError> {
        if self.agents() != vals.agent_count() {
            return Err(ModelError::BundleCountMismatch {
                bundles: self.agents(),
                agents: vals.agent_count(),
            });
        }
        if self.goods() != vals.good_count() {
            return Err(ModelError::MissingGood {
                good: self.goods().min(vals.good_count()),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Instance {
        Instance::validate(2, 3, &[vec![2, 1, 3], vec![1, 2, 1]]).unwrap()
    }

    #[test]
    fn validation_accepts_e1() {
        let inst = e1();
        assert_eq!(inst.agents(), 2);
        assert_eq!(inst.goods(), 3);
        assert_eq!(inst.vmax(), 3);
        assert_eq!(inst.arity(), 3);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Instance::validate(2, 1, &[vec![0], vec![0]]),
            Err(ModelError::UnvaluedGood { good: 0 })
        );
        assert_eq!(
            Instance::validate(2, 2, &[vec![1, 1], vec![0, 0]]),
            Err(ModelError::UnvaluedAgent { agent: 1 })
        );
        assert!(matches!(
            Instance::validate(1, 2, &[vec![1, -1]]),
            Err(ModelError::NegativeValue { good: 1, .. })
        ));
        assert!(matches!(
            Instance::validate(0, 2, &[]),
            Err(ModelError::EmptyInstance { .. })
        ));
        assert!(matches!(
            Instance::validate(2, 2, &[vec![1, 1]]),
            Err(ModelError::RowCountMismatch { .. })
        ));
        assert!(matches!(
            Instance::validate(2, 2, &[vec![1, 1], vec![1]]),
            Err(ModelError::RowLengthMismatch { row: 1, .. })
        ));
    }

    #[test]
    fn utilities_are_additive() {
        let inst = e1();
        let alloc = Allocation::from_bundles(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert_eq!(utility(&inst, &alloc, 0), 5);
        assert_eq!(utility(&inst, &alloc, 1), 2);
        let empty = Allocation::from_bundles(3, vec![vec![0, 1, 2], vec![]]).unwrap();
        assert_eq!(utility(&inst, &empty, 1), 0);
    }

    #[test]
    fn allocation_partition_rules() {
        assert!(matches!(
            Allocation::from_bundles(3, vec![vec![0, 1], vec![1, 2]]),
            Err(ModelError::DuplicateGood { good: 1 })
        ));
        assert!(matches!(
            Allocation::from_bundles(3, vec![vec![0], vec![2]]),
            Err(ModelError::MissingGood { good: 1 })
        ));
        let mut a = Allocation::from_bundles(3, vec![vec![0, 1], vec![2]]).unwrap();
        a.transfer(0, 1);
        assert_eq!(a.bundle(0), &[1]);
        assert_eq!(a.bundle(1), &[0, 2]);
        assert_eq!(a.owner(0), 1);
    }
}
