//! Exact-arithmetic domain types shared by the solvers and the oracles.

mod instance;
mod market;
pub mod rational;
pub mod trace;

pub use instance::{utility, Allocation, Instance, ModelError, Valuations};
pub use market::{build_mbb_graph, is_on_mbb, saturated_agents, MarketOutcome, MbbGraph};
pub use rational::{Factor, Rational};
pub use trace::{PriceTrigger, TraceEvent, TraceEventKind, TraceLog, TraceMode, TraceSnapshot};
