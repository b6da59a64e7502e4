//! Discrete-time two-asset market with three agents.
//!
//! - a noise trader whose executions arrive as Poisson processes with
//!   intensity `A·e^{−kδ}` at half-spread `δ`;
//! - a momentum trader on the normalized index `s¹/s¹₀ + s²/s²₀`, stepping
//!   its position by `ψᵐ` towards the side of the index's moving average,
//!   capped at `q_max`;
//! - an Avellaneda–Stoikov market maker taking the other side of all flow.
//!
//! Mids move linearly with taker flow plus Gaussian noise and are published
//! on the tick grid.

mod agents;
mod params;
mod sim;

pub use agents::{
    arrival_intensity, market_maker_quotes, momentum_trader_step, noise_trader_fills, noise_trader_step,
    price_update, HalfSpreads, MidUpdate, NoiseFills,
};
pub use params::{AbmConfig, AssetParams, MomentumParams, Quantity};
pub use sim::{
    ensemble_curve, ensemble_se, run_simulation, AbmRun, AssetState, InvariantReport, MarketState, MovingAverage,
};
