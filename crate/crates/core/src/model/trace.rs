//! Event log of a price-rise run and the audits replayed over it.

use super::rational::{serde_fraction, serde_fraction_vec, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceMode {
    /// Least spenders by spending (envy-freeness run).
    Spending,
    /// Least-utility agents by utility (equitability run).
    Utility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PriceTrigger {
    /// A new MBB edge appeared toward a good outside the component.
    #[serde(rename = "gamma1")]
    NewMbbEdge,
    /// An agent outside the component matched the least spending.
    #[serde(rename = "gamma2")]
    NewLeastSpender,
}

/// State summary taken right after an event (or at start-up).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceSnapshot {
    /// Least spenders (or least-utility agents), ascending.
    pub least: Vec<usize>,
    #[serde(with = "serde_fraction")]
    pub min_spending: Rational,
    #[serde(with = "serde_fraction")]
    pub min_utility: Rational,
    #[serde(with = "serde_fraction_vec")]
    pub utilities: Vec<Rational>,
    /// Agents excluded from the least-spender role, see `saturated_agents`.
    pub saturated: Vec<usize>,
    pub on_mbb: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum TraceEventKind {
    #[serde(rename_all = "camelCase")]
    Transfer {
        good: usize,
        from_agent: usize,
        to_agent: usize,
        path_length: usize,
    },
    #[serde(rename_all = "camelCase")]
    PriceRise {
        component_agents: Vec<usize>,
        component_goods: Vec<usize>,
        #[serde(with = "serde_fraction")]
        beta: Rational,
        trigger: PriceTrigger,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEvent {
    pub step: usize,
    #[serde(flatten)]
    pub kind: TraceEventKind,
    pub after: TraceSnapshot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceLog {
    pub mode: TraceMode,
    pub initial: TraceSnapshot,
    pub events: Vec<TraceEvent>,
}

impl TraceLog {
    pub fn new(mode: TraceMode, initial: TraceSnapshot) -> Self {
        TraceLog {
            mode,
            initial,
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, kind: TraceEventKind, after: TraceSnapshot) {
        let step = self.events.len() + 1;
        self.events.push(TraceEvent { step, kind, after });
    }

    pub fn transfers(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, TraceEventKind::Transfer { .. }))
            .count()
    }

    pub fn price_rises(&self) -> usize {
        self.events.len() - self.transfers()
    }

    pub fn final_snapshot(&self) -> &TraceSnapshot {
        self.events.last().map_or(&self.initial, |e| &e.after)
    }

    /// (snapshot before, event) pairs in order.
    pub fn steps(&self) -> impl Iterator<Item = (&TraceSnapshot, &TraceEvent)> {
        let befores = std::iter::once(&self.initial).chain(self.events.iter().map(|e| &e.after));
        befores.zip(self.events.iter())
    }

    /// Every snapshot, initial first.
    pub fn snapshots(&self) -> impl Iterator<Item = &TraceSnapshot> {
        std::iter::once(&self.initial).chain(self.events.iter().map(|e| &e.after))
    }

    /// Steps strictly increase and the outcome stayed on MBB throughout.
    pub fn audit_on_mbb(&self) -> Result<(), String> {
        if !self.initial.on_mbb {
            return Err("initial outcome is off MBB".into());
        }
        for (i, e) in self.events.iter().enumerate() {
            if e.step != i + 1 {
                return Err(format!("event {} has step {}", i, e.step));
            }
            if !e.after.on_mbb {
                return Err(format!("outcome off MBB after step {}", e.step));
            }
        }
        Ok(())
    }

    /// The minimum tracked quantity never decreases; in spending mode a
    /// price rise multiplies the minimum spending by exactly `beta`.
    pub fn audit_min_monotone(&self) -> Result<(), String> {
        for (before, event) in self.steps() {
            let after = &event.after;
            match self.mode {
                TraceMode::Spending => {
                    if after.min_spending < before.min_spending {
                        return Err(format!("min spending decreased at step {}", event.step));
                    }
                    if let TraceEventKind::PriceRise { beta, .. } = &event.kind {
                        // The component always contains every least spender.
                        let expected = &before.min_spending * beta;
                        if after.min_spending != expected {
                            return Err(format!(
                                "min spending {} after price rise at step {} is not beta x {}",
                                after.min_spending, event.step, before.min_spending
                            ));
                        }
                    }
                }
                TraceMode::Utility => {
                    if after.min_utility < before.min_utility {
                        return Err(format!("min utility decreased at step {}", event.step));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whenever an agent leaves the least set and later rejoins it, its
    /// utility on rejoining is strictly larger than just before it left;
    /// each agent rejoins at most `utility_counts[agent]` times.
    pub fn audit_reentry(&self, utility_counts: &[usize]) -> Result<(), String> {
        let n = self.initial.utilities.len();
        let mut left_at: Vec<Option<Rational>> = vec![None; n];
        let mut reentries = vec![0usize; n];
        for (before, event) in self.steps() {
            let was: BTreeSet<usize> = before.least.iter().copied().collect();
            let now: BTreeSet<usize> = event.after.least.iter().copied().collect();
            for agent in 0..n {
                let saturated_now = event.after.saturated.contains(&agent);
                match (was.contains(&agent), now.contains(&agent)) {
                    (true, false) if !saturated_now => {
                        left_at[agent] = Some(before.utilities[agent].clone());
                    }
                    (false, true) => {
                        if let Some(previous) = left_at[agent].take() {
                            reentries[agent] += 1;
                            if event.after.utilities[agent] <= previous {
                                return Err(format!(
                                    "agent {} rejoined at step {} with utility {} <= {}",
                                    agent, event.step, event.after.utilities[agent], previous
                                ));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        for agent in 0..n {
            let cap = utility_counts.get(agent).copied().unwrap_or(usize::MAX);
            if reentries[agent] > cap {
                return Err(format!(
                    "agent {} rejoined {} times, more than its {} utility values",
                    agent, reentries[agent], cap
                ));
            }
        }
        Ok(())
    }

    /// Transfers executed under one unchanged least set never exceed `cap`.
    pub fn audit_epoch_transfers(&self, cap: usize) -> Result<(), String> {
        let mut current: Option<&Vec<usize>> = None;
        let mut count = 0usize;
        for (before, event) in self.steps() {
            if current != Some(&before.least) {
                current = Some(&before.least);
                count = 0;
            }
            if matches!(event.kind, TraceEventKind::Transfer { .. }) {
                count += 1;
                if count > cap {
                    return Err(format!(
                        "{} transfers with least set {:?} by step {}",
                        count, before.least, event.step
                    ));
                }
            }
        }
        Ok(())
    }

    /// Largest number of transfers seen under one unchanged least set.
    pub fn max_epoch_transfers(&self) -> usize {
        let mut current: Option<&Vec<usize>> = None;
        let (mut count, mut best) = (0usize, 0usize);
        for (before, event) in self.steps() {
            if current != Some(&before.least) {
                current = Some(&before.least);
                count = 0;
            }
            if matches!(event.kind, TraceEventKind::Transfer { .. }) {
                count += 1;
                best = best.max(count);
            }
        }
        best
    }
}
