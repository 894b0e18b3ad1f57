//! Fair and efficient allocation of indivisible goods.
//!
//! Solvers compute integral market outcomes whose prices certify
//! fractional Pareto optimality, and every claim they make can be re-checked
//! by the exact oracles in [`oracles`].

#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod io;
pub mod model;
pub mod oracles;
pub mod pls;
pub mod solver;
pub mod structured;
