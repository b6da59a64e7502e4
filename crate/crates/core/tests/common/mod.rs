#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use epps_lab::analysis::PriceSeries;
use epps_lab::stochastic::{stream_rng, SimRng};
use rand_distr::{Distribution, StandardNormal};

/// Monday 2024-01-01 00:00:00 UTC.
pub const MONDAY_US: i64 = 1_704_067_200_000_000;

/// Two synchronous log-price paths whose one-step increments have
/// correlation `rho`.
pub fn correlated_paths(n: usize, rho: f64, vol: f64, seed: u64) -> (PriceSeries, PriceSeries) {
    let mut rng: SimRng = stream_rng(seed, 0xC0);
    let (mut x, mut y) = (0.0f64, 0.0f64);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let c = (1.0 - rho * rho).sqrt();
    for _ in 0..n {
        a.push(100.0 * x.exp());
        b.push(50.0 * y.exp());
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        x += vol * z1;
        y += vol * (rho * z1 + c * z2);
    }
    (
        PriceSeries::new(0, 1.0, a).unwrap(),
        PriceSeries::new(0, 1.0, b).unwrap(),
    )
}

/// Writes a quote file with one quote per `every_s` seconds, starting at
/// `start_us`, from the mids of `series` and a fixed half-spread.
pub fn write_quotes(path: &Path, start_us: i64, every_s: i64, mids: &[f64], half_spread: f64) {
    let mut out = String::from("timestamp_us,bid,ask\n");
    for (i, m) in mids.iter().enumerate() {
        let t = start_us + i as i64 * every_s * 1_000_000;
        writeln!(out, "{t},{:.6},{:.6}", m - half_spread, m + half_spread).unwrap();
    }
    std::fs::write(path, out).unwrap();
}

pub fn random_walk(n: usize, start: f64, vol: f64, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng: SimRng = stream_rng(seed, stream);
    let mut x = start;
    (0..n)
        .map(|_| {
            let v = x;
            let z: f64 = StandardNormal.sample(&mut rng);
            x = (x + vol * z).max(start * 0.5);
            v
        })
        .collect()
}
