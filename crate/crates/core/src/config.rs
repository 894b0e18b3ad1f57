//! Size caps for the exhaustive oracles and the solver safety budget.
//!
//! Defaults can be overridden with `FAIRDIV_ENUM_CAP`, `FAIRDIV_LP_CAP` and
//! `FAIRDIV_BUDGET_MULTIPLIER`.

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest `n^m` (or product of target-set sizes) enumerated exhaustively.
    pub enumeration: u64,
    /// Largest number of LP variables for the exact fPO check.
    pub lp_variables: usize,
    /// Multiplier applied to the solver iteration budget.
    pub budget_multiplier: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: 2_000_000,
            lp_variables: 400,
            budget_multiplier: 1,
        }
    }
}

impl Caps {
    pub fn from_env() -> Self {
        fn read(key: &str) -> Option<u64> {
            std::env::var(key).ok()?.trim().parse().ok()
        }
        let d = Caps::default();
        Caps {
            enumeration: read("FAIRDIV_ENUM_CAP").unwrap_or(d.enumeration),
            lp_variables: read("FAIRDIV_LP_CAP").map_or(d.lp_variables, |v| v as usize),
            budget_multiplier: read("FAIRDIV_BUDGET_MULTIPLIER").unwrap_or(d.budget_multiplier).max(1),
        }
    }

    /// Process-wide caps, read from the environment once.
    pub fn global() -> &'static Caps {
        static CAPS: OnceLock<Caps> = OnceLock::new();
        CAPS.get_or_init(Caps::from_env)
    }
}

/// `base^exp`, saturating at `u64::MAX`.
pub fn saturating_pow(base: u64, exp: usize) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
