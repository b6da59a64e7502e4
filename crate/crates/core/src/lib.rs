//! Cross-correlation of high-frequency returns and the footprint of index
//! momentum traders.
//!
//! - [`gaussian`]: closed-form ρ(h) of the two-asset Gaussian momentum model
//!   and a path simulator that checks it;
//! - [`stochastic`]: exact Brownian / Ornstein–Uhlenbeck samplers and their
//!   increment covariances;
//! - [`abm`]: the agent-based market (noise trader, momentum trader,
//!   market maker);
//! - [`analysis`]: quote ingestion and the empirical ρ̂(h) estimator with
//!   Fisher confidence bands;
//! - [`cli`]: the `epps-lab` command driver.

pub mod abm;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod stats;
pub mod stochastic;
pub mod table;

pub use error::{Error, Result};
