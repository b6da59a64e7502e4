//! One-step rules of the three agents and the mid-price update.

use rand_distr::{Distribution, Poisson};

use super::params::{AssetParams, MomentumParams, Quantity};
use crate::error::{Error, Result};
use crate::stochastic::{std_normal, SimRng};

/// Distances from the mid to the quoted ask and bid, in price units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpreads {
    pub ask: f64,
    pub bid: f64,
}

/// Execution intensity `A·e^{−kδ}` at half-spread `delta`, per second.
pub fn arrival_intensity(a: &AssetParams, delta: f64) -> f64 {
    a.base_intensity * (-a.spread_decay * delta).exp()
}

fn poisson(mean: f64, rng: &mut SimRng) -> i64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as i64
}

/// Executions hitting each side of the book in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NoiseFills {
    /// Noise-trader buys at the ask.
    pub at_ask: i64,
    /// Noise-trader sells at the bid.
    pub at_bid: i64,
}

impl NoiseFills {
    /// Noise-trader inventory change `ψⁿ(ΔNᵃ − ΔNᵇ)`.
    pub fn inventory_delta(&self, trade_size: Quantity) -> Quantity {
        trade_size.times(self.at_ask - self.at_bid)
    }
}

/// Draws one step of Poisson executions against the current quotes.
pub fn noise_trader_fills(quotes: &HalfSpreads, a: &AssetParams, dt: f64, rng: &mut SimRng) -> NoiseFills {
    NoiseFills {
        at_ask: poisson(arrival_intensity(a, quotes.ask) * dt, rng),
        at_bid: poisson(arrival_intensity(a, quotes.bid) * dt, rng),
    }
}

/// Noise-trader inventory change over one step.
pub fn noise_trader_step(quotes: &HalfSpreads, a: &AssetParams, dt: f64, rng: &mut SimRng) -> Quantity {
    noise_trader_fills(quotes, a, dt, rng).inventory_delta(Quantity::from_units(a.noise_trade_size))
}

/// Capped momentum rule: add `ψᵐ` on the long side when the index closed
/// above its moving average (flattening any short first), otherwise the
/// mirror image.
pub fn momentum_trader_step(
    prev: Quantity,
    index_prev: f64,
    ma_prev: f64,
    m: &MomentumParams,
    asset: usize,
) -> Quantity {
    let size = Quantity::from_units(m.trade_size[asset]);
    let cap = Quantity::from_units(m.max_position[asset]);
    if index_prev > ma_prev {
        (prev.max(Quantity::ZERO) + size).min(cap)
    } else {
        (prev.min(Quantity::ZERO) - size).max(-cap)
    }
}

/// Avellaneda–Stoikov quotes around the mid.
///
/// Reservation offset `q·γσ̂²H`, total spread `γσ̂²H + (2/γ)ln(1 + γ/k)`;
/// each half-spread is floored at one tick and the quote rounded outward to
/// the tick grid (the mid is assumed to sit on the grid).
pub fn market_maker_quotes(
    mm_inventory: Quantity,
    a: &AssetParams,
    vol_estimate: f64,
    horizon: f64,
) -> Result<HalfSpreads> {
    if !(vol_estimate > 0.0) {
        return Err(Error::invalid("vol_estimate", "must be > 0", vol_estimate));
    }
    let gamma = a.risk_aversion;
    let risk = gamma * vol_estimate * vol_estimate * horizon;
    let total = risk + 2.0 / gamma * (gamma / a.spread_decay).ln_1p();
    let skew = mm_inventory.units() * risk;
    let tick = a.tick_size;
    let outward = |d: f64| {
        let ticks = (d.max(tick) / tick - 1e-9).ceil();
        ticks * tick
    };
    Ok(HalfSpreads {
        ask: outward(total / 2.0 - skew),
        bid: outward(total / 2.0 + skew),
    })
}

/// Mid after one step: unrounded and published (in whole ticks).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidUpdate {
    pub raw: f64,
    pub ticks: i64,
}

impl MidUpdate {
    pub fn published(&self, tick_size: f64) -> f64 {
        self.ticks as f64 * tick_size
    }
}

/// `s_t = s_{t−1} + θ·flow + ν√dt·ξ` on the unrounded mid, then rounded to
/// the nearest tick. A non-positive published mid aborts the run.
pub fn price_update(
    raw_mid: f64,
    a: &AssetParams,
    flow: Quantity,
    dt: f64,
    rng: &mut SimRng,
    step: u64,
    asset: usize,
) -> Result<MidUpdate> {
    let mut raw = raw_mid + a.impact * flow.units();
    if a.noise_vol > 0.0 {
        raw += a.noise_vol * dt.sqrt() * std_normal(rng);
    }
    let ticks = (raw / a.tick_size).round() as i64;
    if ticks <= 0 {
        return Err(Error::NonPositivePrice {
            step,
            asset,
            price: ticks as f64 * a.tick_size,
        });
    }
    Ok(MidUpdate { raw, ticks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::stream_rng;

    fn btc() -> AssetParams {
        AssetParams::fitted_btc()
    }

    #[test]
    fn intensity_example() {
        let a = btc();
        // e^{−34.66·0.02} = e^{−0.6932} ≈ 0.49997
        assert!((arrival_intensity(&a, 0.02) - 0.499_973_590_977).abs() < 1e-9);
    }

    #[test]
    fn wide_quotes_stop_the_noise_trader() {
        let mut rng = stream_rng(1, 0);
        let q = HalfSpreads { ask: 1e6, bid: 1e6 };
        for _ in 0..1000 {
            assert_eq!(noise_trader_step(&q, &btc(), 0.5, &mut rng), Quantity::ZERO);
        }
    }

    #[test]
    fn symmetric_quotes_give_no_drift() {
        let mut rng = stream_rng(2, 0);
        let a = btc();
        let q = HalfSpreads { ask: 0.02, bid: 0.02 };
        let deltas: Vec<f64> = (0..1_000_000)
            .map(|_| noise_trader_step(&q, &a, 0.5, &mut rng).units())
            .collect();
        let e = crate::stats::mean_and_se(&deltas);
        assert!(e.z_score(0.0).abs() < 3.0, "{e:?}");
    }

    #[test]
    fn momentum_examples() {
        let mut m = MomentumParams::fitted();
        m.trade_size[1] = 120.0;
        m.max_position[1] = 250.0;
        let q = Quantity::from_units;
        assert_eq!(momentum_trader_step(q(200.0), 2.0, 1.0, &m, 1), q(250.0));
        assert_eq!(momentum_trader_step(q(-100.0), 2.0, 1.0, &m, 1), q(120.0));
        assert_eq!(momentum_trader_step(q(0.0), 1.0, 1.0, &m, 1), q(-120.0));
        assert_eq!(momentum_trader_step(q(-240.0), 0.0, 1.0, &m, 1), q(-250.0));
        assert_eq!(momentum_trader_step(q(250.0), 0.0, 1.0, &m, 1), q(-120.0));
    }

    #[test]
    fn flat_inventory_quotes_symmetrically() {
        let a = btc();
        let q = market_maker_quotes(Quantity::ZERO, &a, a.noise_vol, 1.0).unwrap();
        assert_eq!(q.ask, q.bid);
        assert!(q.ask >= a.tick_size);
    }

    #[test]
    fn long_inventory_skews_quotes() {
        let mut a = btc();
        a.risk_aversion = 1e-3;
        let q = market_maker_quotes(Quantity::from_units(50.0), &a, 2.0, 1.0).unwrap();
        assert!(q.bid > q.ask, "{q:?}");
        let q = market_maker_quotes(Quantity::from_units(-50.0), &a, 2.0, 1.0).unwrap();
        assert!(q.ask > q.bid, "{q:?}");
    }

    #[test]
    fn small_gamma_spread_tends_to_two_over_k() {
        let mut a = btc();
        a.risk_aversion = 1e-12;
        a.tick_size = 1e-9;
        let q = market_maker_quotes(Quantity::ZERO, &a, 1e-3, 1.0).unwrap();
        assert!((q.ask + q.bid - 2.0 / a.spread_decay).abs() < 1e-6);
    }

    #[test]
    fn quotes_need_positive_vol() {
        assert!(market_maker_quotes(Quantity::ZERO, &btc(), 0.0, 1.0).is_err());
    }

    #[test]
    fn quotes_sit_on_ticks() {
        let a = AssetParams::fitted_eur();
        let q = market_maker_quotes(Quantity::ZERO, &a, a.noise_vol, 1.0).unwrap();
        // 2/k ≈ 5.77e-4 → half 2.885e-4 → three ticks
        assert!((q.ask - 3e-4).abs() < 1e-15);
    }

    #[test]
    fn price_update_examples() {
        let mut rng = stream_rng(3, 0);
        let mut a = btc();
        a.noise_vol = 0.0;
        a.impact = 0.0;
        let u = price_update(30_000.0, &a, Quantity::from_units(5.0), 0.5, &mut rng, 0, 1).unwrap();
        assert_eq!((u.raw, u.ticks), (30_000.0, 3_000_000));

        let u = price_update(30_000.004, &a, Quantity::ZERO, 0.5, &mut rng, 0, 1).unwrap();
        assert_eq!(u.ticks, 3_000_000);
        assert_eq!(u.published(a.tick_size), 30_000.0);

        a.impact = 2.7e-6;
        let u = price_update(30_000.0, &a, Quantity::from_units(120.0), 0.5, &mut rng, 0, 1).unwrap();
        assert!((u.raw - 30_000.0 - 0.000324).abs() < 1e-9);
    }

    #[test]
    fn non_positive_mid_aborts() {
        let mut rng = stream_rng(4, 0);
        let mut a = btc();
        a.noise_vol = 0.0;
        a.impact = 1.0;
        match price_update(1.0, &a, Quantity::from_units(-5.0), 0.5, &mut rng, 17, 1) {
            Err(Error::NonPositivePrice { step: 17, asset: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
