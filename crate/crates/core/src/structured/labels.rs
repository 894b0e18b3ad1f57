use crate::model::{Allocation, Instance};
use std::collections::{BTreeMap, HashSet};

/// Goods grouped by identical value columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    /// Good → label id.
    pub labels: Vec<usize>,
    /// Label → number of goods.
    pub counts: Vec<usize>,
    /// `label_values[agent][label]`.
    pub label_values: Vec<Vec<u64>>,
    /// Label → its goods, ascending.
    pub members: Vec<Vec<usize>>,
}

impl LabelTable {
    pub fn label_count(&self) -> usize {
        self.counts.len()
    }

    pub fn agents(&self) -> usize {
        self.label_values.len()
    }

    pub fn goods(&self) -> usize {
        self.labels.len()
    }
}

/// Label ids follow the lexicographic order of the value columns.
pub fn label_goods(instance: &Instance) -> LabelTable {
    let n = instance.agents();
    let m = instance.goods();
    let mut by_column: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    for good in 0..m {
        let column: Vec<u64> = (0..n).map(|a| instance.v(a, good)).collect();
        by_column.entry(column).or_default().push(good);
    }
    let mut labels = vec![0; m];
    let mut counts = Vec::with_capacity(by_column.len());
    let mut label_values = vec![Vec::with_capacity(by_column.len()); n];
    let mut members = Vec::with_capacity(by_column.len());
    for (id, (column, goods)) in by_column.into_iter().enumerate() {
        for &g in &goods {
            labels[g] = id;
        }
        for (agent, v) in column.into_iter().enumerate() {
            label_values[agent].push(v);
        }
        counts.push(goods.len());
        members.push(goods);
    }
    LabelTable {
        labels,
        counts,
        label_values,
        members,
    }
}

/// An allocation giving agent `i` utility exactly `targets[i]`, or `None`.
///
/// Agents are filled in index order by choosing how many goods of each
/// label they take; failed (agent, remaining counts) states are memoized.
/// Within a label, goods go to agents in ascending index order.
pub fn feasible_for_target(table: &LabelTable, targets: &[u64]) -> Option<Allocation> {
    let n = table.agents();
    if targets.len() != n {
        return None;
    }
    let mut search = Search {
        table,
        targets,
        failed: HashSet::new(),
        split: vec![vec![0; table.label_count()]; n],
    };
    let remaining = table.counts.clone();
    if !search.agent(0, remaining) {
        return None;
    }
    let mut owner = vec![0; table.goods()];
    for (label, goods) in table.members.iter().enumerate() {
        let mut next = goods.iter();
        for agent in 0..n {
            for _ in 0..search.split[agent][label] {
                owner[*next.next().expect("split sums to the label count")] = agent;
            }
        }
    }
    Some(Allocation::from_owners_unchecked(n, owner))
}

struct Search<'a> {
    table: &'a LabelTable,
    targets: &'a [u64],
    failed: HashSet<(usize, Vec<usize>)>,
    split: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn agent(&mut self, agent: usize, remaining: Vec<usize>) -> bool {
        let n = self.table.agents();
        if agent == n - 1 {
            let total: u64 = remaining
                .iter()
                .zip(&self.table.label_values[agent])
                .map(|(&c, &v)| c as u64 * v)
                .sum();
            if total == self.targets[agent] {
                self.split[agent] = remaining;
                return true;
            }
            return false;
        }
        if self.failed.contains(&(agent, remaining.clone())) {
            return false;
        }
        let mut take = vec![0; remaining.len()];
        if self.label(agent, 0, self.targets[agent], &remaining, &mut take) {
            return true;
        }
        self.failed.insert((agent, remaining));
        false
    }

    fn label(&mut self, agent: usize, label: usize, left: u64, remaining: &[usize], take: &mut Vec<usize>) -> bool {
        if label == remaining.len() {
            if left != 0 {
                return false;
            }
            let rest: Vec<usize> = remaining.iter().zip(take.iter()).map(|(r, t)| r - t).collect();
            if self.agent(agent + 1, rest) {
                self.split[agent] = take.clone();
                return true;
            }
            return false;
        }
        let v = self.table.label_values[agent][label];
        for count in 0..=remaining[label] {
            let used = v * count as u64;
            if used > left {
                break;
            }
            take[label] = count;
            if self.label(agent, label + 1, left - used, remaining, take) {
                return true;
            }
        }
        take[label] = 0;
        false
    }
}
