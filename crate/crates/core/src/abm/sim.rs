use rayon::prelude::*;

use super::agents::{
    market_maker_quotes, momentum_trader_step, noise_trader_fills, price_update, HalfSpreads,
};
use super::params::{AbmConfig, Quantity};
use crate::analysis::{
    correlation_curve, correlation_se, fisher_ci, CiMode, CorrelationCurve, CurveRow, PriceSeries, CI_LEVEL,
};
use crate::error::{Error, Result};
use crate::stochastic::{stream_id, stream_rng, SimRng};

/// Simple moving average over a fixed number of samples.
#[derive(Debug, Clone)]
pub struct MovingAverage {
    buf: Vec<f64>,
    next: usize,
    filled: usize,
    sum: f64,
}

impl MovingAverage {
    pub fn new(window: usize) -> Self {
        assert!(window >= 1);
        Self {
            buf: vec![0.0; window],
            next: 0,
            filled: 0,
            sum: 0.0,
        }
    }

    pub fn push(&mut self, x: f64) {
        let w = self.buf.len();
        if self.filled == w {
            self.sum -= self.buf[self.next];
        } else {
            self.filled += 1;
        }
        self.buf[self.next] = x;
        self.sum += x;
        self.next = (self.next + 1) % w;
        if self.next == 0 {
            // resum once per lap so rounding drift cannot accumulate
            self.sum = self.buf[..self.filled].iter().sum();
        }
    }

    pub fn is_full(&self) -> bool {
        self.filled == self.buf.len()
    }

    pub fn value(&self) -> Option<f64> {
        (self.filled > 0).then(|| self.sum / self.filled as f64)
    }
}

/// State of one asset's market.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetState {
    pub raw_mid: f64,
    pub mid_ticks: i64,
    pub noise_inventory: Quantity,
    pub momentum_inventory: Quantity,
    pub mm_inventory: Quantity,
    /// Market-maker cash from fills at its quotes.
    pub mm_cash: f64,
    pub quotes: HalfSpreads,
}

impl AssetState {
    /// `qⁿ + qᵐ + q^{mm}`; zero whenever the market has cleared.
    pub fn net_inventory(&self) -> Quantity {
        self.noise_inventory + self.momentum_inventory + self.mm_inventory
    }
}

#[derive(Debug, Clone)]
pub struct MarketState {
    pub assets: [AssetState; 2],
    pub index: MovingAverage,
    /// Index and its moving average after the last completed step.
    pub last_index: f64,
    pub last_ma: Option<f64>,
    pub step: u64,
}

/// Running checks of the market invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InvariantReport {
    pub steps_checked: u64,
    pub clearing_violations: u64,
    pub cap_violations: u64,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.clearing_violations == 0 && self.cap_violations == 0
    }
}

/// Output of [`run_simulation`].
#[derive(Debug, Clone)]
pub struct AbmRun {
    /// Published mids of both assets, `n_steps + 1` points each.
    pub mids: [PriceSeries; 2],
    /// Per-step noise and momentum inventories (empty unless recorded).
    pub noise_inventory: [Vec<Quantity>; 2],
    pub momentum_inventory: [Vec<Quantity>; 2],
    pub invariants: InvariantReport,
    pub final_state: MarketState,
}

fn normalized_index(mids: [f64; 2], base: [f64; 2]) -> f64 {
    mids[0] / base[0] + mids[1] / base[1]
}

/// Runs the three-agent market.
///
/// Each step: the market maker quotes, noise-trader executions arrive, the
/// momentum trader reacts to the previous step's index against its moving
/// average, then mids move by linear impact of the combined taker flow plus
/// Gaussian noise and are rounded to the tick grid. The momentum index is
/// `s¹/s¹₀ + s²/s²₀` on published mids.
pub fn run_simulation(cfg: &AbmConfig) -> Result<AbmRun> {
    cfg.validate()?;
    let dt = cfg.dt;
    let params = cfg.assets;
    let noise_size = params.map(|a| Quantity::from_units(a.noise_trade_size));
    let mut rngs: [[SimRng; 2]; 2] = [0, 1].map(|i| {
        [
            stream_rng(cfg.seed, stream_id(&format!("abm.noise.{i}"))),
            stream_rng(cfg.seed, stream_id(&format!("abm.mid.{i}"))),
        ]
    });

    let mut assets = params.map(|a| {
        let ticks = (a.initial_mid / a.tick_size).round() as i64;
        AssetState {
            raw_mid: a.initial_mid,
            mid_ticks: ticks,
            noise_inventory: Quantity::ZERO,
            momentum_inventory: Quantity::ZERO,
            mm_inventory: Quantity::ZERO,
            mm_cash: 0.0,
            quotes: HalfSpreads { ask: a.tick_size, bid: a.tick_size },
        }
    });
    let published = |s: &AssetState, i: usize| s.mid_ticks as f64 * params[i].tick_size;
    let base = [published(&assets[0], 0), published(&assets[1], 1)];

    let n = cfg.n_steps + 1;
    let mut mids: [Vec<f64>; 2] = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let cap = if cfg.record_inventory { n } else { 0 };
    let mut noise_trace: [Vec<Quantity>; 2] = [Vec::with_capacity(cap), Vec::with_capacity(cap)];
    let mut momentum_trace: [Vec<Quantity>; 2] = [Vec::with_capacity(cap), Vec::with_capacity(cap)];
    for i in 0..2 {
        mids[i].push(base[i]);
        if cfg.record_inventory {
            noise_trace[i].push(Quantity::ZERO);
            momentum_trace[i].push(Quantity::ZERO);
        }
    }

    let mut ma = MovingAverage::new(cfg.window_steps());
    let mut last_index = normalized_index(base, base);
    ma.push(last_index);
    let max_position = cfg.momentum.max_position.map(Quantity::from_units);
    let mut report = InvariantReport::default();

    for step in 1..=cfg.n_steps as u64 {
        let momentum_live = cfg.momentum.enabled && ma.is_full();
        let ma_prev = ma.value().expect("seeded with the initial index");
        for (i, s) in assets.iter_mut().enumerate() {
            let a = &params[i];
            s.quotes = market_maker_quotes(s.mm_inventory, a, a.noise_vol, cfg.quote_horizon)?;
            let mid = s.mid_ticks as f64 * a.tick_size;
            let (ask_px, bid_px) = (mid + s.quotes.ask, mid - s.quotes.bid);

            let fills = noise_trader_fills(&s.quotes, a, dt, &mut rngs[i][0]);
            let noise_delta = fills.inventory_delta(noise_size[i]);
            s.noise_inventory += noise_delta;
            s.mm_cash += noise_size[i].units() * (fills.at_ask as f64 * ask_px - fills.at_bid as f64 * bid_px);

            let mut momentum_delta = Quantity::ZERO;
            if momentum_live {
                let next = momentum_trader_step(s.momentum_inventory, last_index, ma_prev, &cfg.momentum, i);
                momentum_delta = next - s.momentum_inventory;
                s.momentum_inventory = next;
                let px = if momentum_delta > Quantity::ZERO { ask_px } else { bid_px };
                s.mm_cash += momentum_delta.units() * px;
            }

            let flow = noise_delta + momentum_delta;
            s.mm_inventory -= flow;
            let upd = price_update(s.raw_mid, a, flow, dt, &mut rngs[i][1], step, i)?;
            s.raw_mid = upd.raw;
            s.mid_ticks = upd.ticks;

            report.clearing_violations += u64::from(s.net_inventory() != Quantity::ZERO);
            report.cap_violations += u64::from(s.momentum_inventory.abs() > max_position[i]);
            mids[i].push(upd.published(a.tick_size));
            if cfg.record_inventory {
                noise_trace[i].push(s.noise_inventory);
                momentum_trace[i].push(s.momentum_inventory);
            }
        }
        report.steps_checked += 1;
        last_index = normalized_index([mids[0][step as usize], mids[1][step as usize]], base);
        ma.push(last_index);
    }

    let last_ma = ma.value();
    let [m0, m1] = mids;
    Ok(AbmRun {
        mids: [PriceSeries::new(0, dt, m0)?, PriceSeries::new(0, dt, m1)?],
        noise_inventory: noise_trace,
        momentum_inventory: momentum_trace,
        invariants: report,
        final_state: MarketState {
            assets,
            index: ma,
            last_index,
            last_ma,
            step: cfg.n_steps as u64,
        },
    })
}

/// ρ̂(h) averaged over independent seeds.
///
/// Each seed contributes a blocked-CI curve from its own run; the reported
/// ρ̂ is the seed average and `n_effective` the pooled blocked count, from
/// which the Fisher band is rebuilt. Seeds run in parallel; the reduction
/// order is fixed by the seed list.
pub fn ensemble_curve(cfg: &AbmConfig, seeds: &[u64], h_grid: &[f64]) -> Result<CorrelationCurve> {
    if seeds.is_empty() {
        return Err(Error::Degenerate("no seeds".into()));
    }
    let curves = seeds
        .par_iter()
        .map(|&seed| {
            let run = run_simulation(&AbmConfig {
                seed,
                record_inventory: false,
                ..cfg.clone()
            })?;
            correlation_curve(&run.mids[0], &run.mids[1], h_grid, CiMode::Blocked)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..h_grid.len())
        .map(|j| {
            let rho = curves.iter().map(|c| c.rows()[j].rho).sum::<f64>() / curves.len() as f64;
            let n: usize = curves.iter().map(|c| c.rows()[j].n_effective.unwrap_or(0)).sum();
            CurveRow {
                h: h_grid[j],
                rho,
                ci: fisher_ci(rho, n, CI_LEVEL).ok(),
                n_effective: Some(n),
            }
        })
        .collect();
    CorrelationCurve::new(rows, Some(CiMode::Blocked))
}

/// Standard error of an ensemble row.
pub fn ensemble_se(row: &CurveRow) -> f64 {
    correlation_se(row.rho, row.n_effective.unwrap_or(4))
}
