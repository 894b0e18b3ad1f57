use super::{IoError, ParseError};
use crate::model::rational::{parse_fraction, to_fraction_string};
use crate::model::{Allocation, Instance, MarketOutcome, Rational};
use crate::oracles::Verdict;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk instance; keys serialize in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub agents: usize,
    pub goods: usize,
    pub valuations: Vec<Vec<i64>>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            name: None,
            family: None,
            seed: None,
            agents: instance.agents(),
            goods: instance.goods(),
            valuations: instance
                .rows()
                .iter()
                .map(|r| r.iter().map(|&v| v as i64).collect())
                .collect(),
        }
    }
}

/// Strict parse followed by full validation.
pub fn parse_instance(text: &str) -> Result<(Instance, InstanceFile), IoError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| ParseError::json(&e))?;
    check_version(file.schema_version)?;
    for (row, values) in file.valuations.iter().enumerate() {
        if values.len() != file.goods {
            return Err(ParseError::field(
                format!("valuations[{row}]"),
                format!("row has {} entries, expected {}", values.len(), file.goods),
            )
            .into());
        }
    }
    if file.valuations.len() != file.agents {
        return Err(ParseError::field(
            "valuations",
            format!("{} rows, expected {}", file.valuations.len(), file.agents),
        )
        .into());
    }
    let instance = Instance::validate(file.agents, file.goods, &file.valuations)?;
    Ok((instance, file))
}

/// Canonical form: pretty JSON in declaration order plus a trailing newline.
pub fn serialize_instance(file: &InstanceFile) -> String {
    let mut out = serde_json::to_string_pretty(file).expect("instance files always serialize");
    out.push('\n');
    out
}

fn check_version(version: u32) -> Result<(), ParseError> {
    if version != SCHEMA_VERSION {
        return Err(ParseError::field(
            "schemaVersion",
            format!("unsupported schema version {version}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

/// An allocation to check, optionally with prices. Result files parse as
/// allocation files too; their other keys are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AllocationFile {
    pub schema_version: u32,
    pub bundles: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prices: Option<Vec<String>>,
}

/// Allocation and optional market outcome, checked against `goods`.
pub fn parse_allocation(text: &str, goods: usize) -> Result<(Allocation, Option<MarketOutcome>), IoError> {
    let file: AllocationFile = serde_json::from_str(text).map_err(|e| ParseError::json(&e))?;
    check_version(file.schema_version)?;
    let allocation = Allocation::from_bundles(goods, file.bundles)?;
    let outcome = match file.prices {
        None => None,
        Some(prices) => {
            let prices = parse_prices(&prices)?;
            Some(MarketOutcome::new(allocation.clone(), prices)?)
        }
    };
    Ok((allocation, outcome))
}

fn parse_prices(prices: &[String]) -> Result<Vec<Rational>, ParseError> {
    prices
        .iter()
        .enumerate()
        .map(|(g, p)| parse_fraction(p).map_err(|e| ParseError::field(format!("prices[{g}]"), e.to_string())))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunStats {
    pub transfers: u64,
    pub price_rises: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_bound: Option<u64>,
    /// Distinct achievable utilities of the most varied agent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_count: Option<usize>,
    /// Local-search moves, or the fallback route taken.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    pub wall_time_ms: u64,
}

/// Solver output with the oracle verdicts recorded for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ResultFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub fairness: String,
    pub method: String,
    pub bundles: Vec<Vec<usize>>,
    /// Present iff the solver produced a price certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prices: Option<Vec<String>>,
    /// Oracle name → verdict, for the oracles that ran.
    pub checks: BTreeMap<String, Verdict>,
    pub stats: RunStats,
}

impl ResultFile {
    pub fn set_prices(&mut self, prices: &[Rational]) {
        self.prices = Some(prices.iter().map(to_fraction_string).collect());
    }

    pub fn all_hold(&self) -> bool {
        self.checks.values().all(Verdict::holds)
    }
}

pub fn serialize_result(file: &ResultFile) -> String {
    let mut out = serde_json::to_string_pretty(file).expect("result files always serialize");
    out.push('\n');
    out
}

pub fn parse_result(text: &str) -> Result<ResultFile, IoError> {
    let file: ResultFile = serde_json::from_str(text).map_err(|e| ParseError::json(&e))?;
    check_version(file.schema_version)?;
    if let Some(prices) = &file.prices {
        parse_prices(prices)?;
    }
    Ok(file)
}
