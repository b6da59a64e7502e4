use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use crate::error::{ensure, Result};

/// Inventory in millionths of a unit.
///
/// Fixed-point storage keeps every inventory sum exact, so market clearing
/// holds to the last unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Quantity(i64);

impl Quantity {
    pub const ZERO: Quantity = Quantity(0);
    const SCALE: f64 = 1e6;

    /// Rounds `units` to the nearest representable quantity.
    pub fn from_units(units: f64) -> Self {
        Quantity((units * Self::SCALE).round() as i64)
    }

    pub fn units(self) -> f64 {
        self.0 as f64 / Self::SCALE
    }

    pub fn raw(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> Self {
        Quantity(self.0.abs())
    }

    pub fn times(self, n: i64) -> Self {
        Quantity(self.0 * n)
    }
}

impl Add for Quantity {
    type Output = Quantity;
    fn add(self, rhs: Quantity) -> Quantity {
        Quantity(self.0 + rhs.0)
    }
}

impl Sub for Quantity {
    type Output = Quantity;
    fn sub(self, rhs: Quantity) -> Quantity {
        Quantity(self.0 - rhs.0)
    }
}

impl Neg for Quantity {
    type Output = Quantity;
    fn neg(self) -> Quantity {
        Quantity(-self.0)
    }
}

impl AddAssign for Quantity {
    fn add_assign(&mut self, rhs: Quantity) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Quantity {
    fn sub_assign(&mut self, rhs: Quantity) {
        self.0 -= rhs.0;
    }
}

/// Microstructure of one asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetParams {
    /// Tick size η; published mids are whole multiples of it.
    pub tick_size: f64,
    /// Arrival intensity `A` at zero half-spread, events per second.
    pub base_intensity: f64,
    /// Spread sensitivity `k` of the arrival intensity `A·e^{−kδ}`.
    pub spread_decay: f64,
    /// Linear impact θ, price per unit of taker flow.
    pub impact: f64,
    /// Exogenous mid volatility ν per √second.
    pub noise_vol: f64,
    /// Market-maker risk aversion γ.
    pub risk_aversion: f64,
    /// Noise-trader trade size ψⁿ.
    pub noise_trade_size: f64,
    pub initial_mid: f64,
}

impl AssetParams {
    /// EUR/USDT-like leg of the calibrated set.
    pub fn fitted_eur() -> Self {
        Self {
            tick_size: 1e-4,
            base_intensity: 1.0,
            spread_decay: 3466.0,
            impact: 2.7e-11,
            noise_vol: 3e-5,
            risk_aversion: 6.46e-6,
            noise_trade_size: 100_000.0,
            initial_mid: 1.10,
        }
    }

    /// BTC/USDT-like leg of the calibrated set.
    pub fn fitted_btc() -> Self {
        Self {
            tick_size: 1e-2,
            base_intensity: 1.0,
            spread_decay: 34.66,
            impact: 2.7e-6,
            noise_vol: 2.04,
            risk_aversion: 3.47e-9,
            noise_trade_size: 4.0,
            initial_mid: 30_000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.tick_size > 0.0 && self.tick_size.is_finite(), "tick_size", "must be > 0", self.tick_size)?;
        ensure(self.base_intensity > 0.0 && self.base_intensity.is_finite(), "base_intensity", "must be > 0", self.base_intensity)?;
        ensure(self.spread_decay > 0.0 && self.spread_decay.is_finite(), "spread_decay", "must be > 0", self.spread_decay)?;
        ensure(self.impact >= 0.0 && self.impact.is_finite(), "impact", "must be >= 0", self.impact)?;
        // The market maker prices inventory risk off ν, so it must be positive.
        ensure(self.noise_vol > 0.0 && self.noise_vol.is_finite(), "noise_vol", "must be > 0", self.noise_vol)?;
        ensure(self.risk_aversion > 0.0 && self.risk_aversion.is_finite(), "risk_aversion", "must be > 0", self.risk_aversion)?;
        ensure(self.noise_trade_size > 0.0 && self.noise_trade_size.is_finite(), "noise_trade_size", "must be > 0", self.noise_trade_size)?;
        ensure(self.initial_mid > 0.0 && self.initial_mid.is_finite(), "initial_mid", "must be > 0", self.initial_mid)?;
        ensure(
            (self.initial_mid / self.tick_size).round() >= 1.0,
            "initial_mid",
            "must be at least one tick",
            self.initial_mid,
        )
    }
}

/// The index momentum trader.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumParams {
    pub enabled: bool,
    /// Moving-average window τ, seconds.
    pub window: f64,
    /// Per-step trade size ψᵐ for each asset.
    pub trade_size: [f64; 2],
    /// Absolute inventory cap for each asset.
    pub max_position: [f64; 2],
}

impl MomentumParams {
    pub fn fitted() -> Self {
        Self {
            enabled: true,
            window: 500.0,
            trade_size: [3_000_000.0, 120.0],
            max_position: [6_500_000.0, 250.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.window > 0.0 && self.window.is_finite(), "window", "must be > 0", self.window)?;
        for i in 0..2 {
            ensure(self.trade_size[i] > 0.0 && self.trade_size[i].is_finite(), "trade_size", "must be > 0", self.trade_size[i])?;
            ensure(
                self.max_position[i] >= self.trade_size[i],
                "max_position",
                "must be >= trade_size",
                self.max_position[i],
            )?;
        }
        Ok(())
    }
}

/// A full agent-based run.
#[derive(Debug, Clone, PartialEq)]
pub struct AbmConfig {
    pub assets: [AssetParams; 2],
    pub momentum: MomentumParams,
    /// Step length, seconds.
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
    /// Stationary stand-in for the market maker's remaining horizon `T − t`.
    pub quote_horizon: f64,
    /// Keep per-step inventories in the output.
    pub record_inventory: bool,
}

impl Default for AbmConfig {
    /// The calibrated parameter vector at `dt = 0.5 s`, 2·10⁶ steps.
    fn default() -> Self {
        Self {
            assets: [AssetParams::fitted_eur(), AssetParams::fitted_btc()],
            momentum: MomentumParams::fitted(),
            dt: 0.5,
            n_steps: 2_000_000,
            seed: 0,
            quote_horizon: 1.0,
            record_inventory: true,
        }
    }
}

impl AbmConfig {
    /// Moving-average length in steps, `round(τ/dt)`, at least one.
    pub fn window_steps(&self) -> usize {
        ((self.momentum.window / self.dt).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.assets {
            a.validate()?;
        }
        self.momentum.validate()?;
        ensure(self.dt > 0.0 && self.dt.is_finite(), "dt", "must be > 0", self.dt)?;
        ensure(
            self.quote_horizon > 0.0 && self.quote_horizon.is_finite(),
            "quote_horizon",
            "must be > 0",
            self.quote_horizon,
        )?;
        let min_steps = (self.momentum.window / self.dt).ceil();
        ensure(
            self.n_steps as f64 >= min_steps,
            "n_steps",
            "must be >= ceil(window / dt)",
            self.n_steps as f64,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantity_is_exact() {
        let a = Quantity::from_units(3_000_000.0);
        let b = Quantity::from_units(0.1);
        assert_eq!((a + b - a).raw(), b.raw());
        assert_eq!(Quantity::from_units(120.0).units(), 120.0);
        assert_eq!((-a).abs(), a);
        assert_eq!(b.times(3), Quantity::from_units(0.3));
    }

    #[test]
    fn default_config_is_valid() {
        let c = AbmConfig::default();
        c.validate().unwrap();
        assert_eq!(c.window_steps(), 1000);
    }

    #[test]
    fn short_runs_rejected() {
        let c = AbmConfig {
            n_steps: 999,
            ..AbmConfig::default()
        };
        assert!(c.validate().is_err());
        let c = AbmConfig {
            n_steps: 1000,
            ..AbmConfig::default()
        };
        assert!(c.validate().is_ok());
    }

    #[test]
    fn cap_below_trade_size_rejected() {
        let mut m = MomentumParams::fitted();
        m.max_position[1] = 100.0;
        assert!(m.validate().is_err());
        let mut a = AssetParams::fitted_btc();
        a.noise_vol = 0.0;
        assert!(a.validate().is_err());
    }
}
