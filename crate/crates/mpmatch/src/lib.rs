//! Exact solvers for multiple partners matching games: stable solutions with
//! payments, their LP duals, and core allocations.

pub mod core_game;
pub mod error;
pub mod fixtures;
pub mod instance;
pub mod json;
pub mod matching;
pub mod rational;
pub mod reduction;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use instance::{Coalition, Instance};
pub use rational::Q;
