use crate::model::rational::to_fraction_string;
use crate::model::Rational;
use serde::{Deserialize, Serialize};

/// Counterexample attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Witness {
    /// `envier` violates the up-to-one-good condition toward `envied`.
    Envy { envier: usize, envied: usize },
    /// An integral allocation that Pareto-dominates the checked one.
    Dominated { bundles: Vec<Vec<usize>> },
    /// A fractional allocation (agent × good shares, as `p/q`) that dominates.
    FractionallyDominated { shares: Vec<Vec<String>> },
    /// `good` is not a maximum bang-per-buck good of its `owner`.
    OffMbb { good: usize, owner: usize },
}

impl Witness {
    pub fn fractional(shares: &[Vec<Rational>]) -> Self {
        Witness::FractionallyDominated {
            shares: shares
                .iter()
                .map(|row| row.iter().map(to_fraction_string).collect())
                .collect(),
        }
    }
}

/// Result of a check; a witness is present exactly when the check fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
        }
    }

    pub fn holds(&self) -> bool {
        self.holds
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    /// False for a deserialized verdict whose flag and witness disagree.
    pub fn is_consistent(&self) -> bool {
        self.holds == self.witness.is_none()
    }
}
