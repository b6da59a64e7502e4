//! Quote files to an Epps curve: ingest, drop weekends, resample, align, estimate.
//!
//! Writes two synthetic quote files whose mids share a common factor, then
//! runs the pipeline on them.
//!
//! cargo run --example empirical_pipeline

use std::fmt::Write as _;

use epps_lab::analysis::{
    correlation_curve, filter_weekends, load_quotes, to_mid_series_with, CiMode, PriceSeries, Resample,
};
use epps_lab::stochastic::{stream_rng, SimRng};
use rand_distr::{Distribution, StandardNormal};

// Monday 2024-01-01 00:00 UTC
const START_US: i64 = 1_704_067_200_000_000;

fn main() -> epps_lab::Result<()> {
    let dir = std::env::temp_dir().join("epps-lab-pipeline");
    std::fs::create_dir_all(&dir).map_err(|e| epps_lab::Error::io(&dir, e))?;
    let mut rng: SimRng = stream_rng(5, 0);
    let (mut a, mut b) = (String::from("timestamp_us,bid,ask\n"), String::from("timestamp_us,bid,ask\n"));
    let (mut x, mut y) = (1.1f64, 30_000.0f64);
    // eight days of quotes every 5 s; the second asset reacts to the first with a lag
    let mut lagged = vec![0.0; 12];
    for i in 0..8 * 17_280i64 {
        let t = START_US + i * 5_000_000;
        let z: f64 = StandardNormal.sample(&mut rng);
        let e: f64 = StandardNormal.sample(&mut rng);
        x *= 1.0 + 2e-5 * z;
        let k = i as usize % lagged.len();
        y *= 1.0 + 2e-5 * lagged[k] + 4e-5 * e;
        lagged[k] = z;
        writeln!(a, "{t},{:.6},{:.6}", x - 5e-5, x + 5e-5).unwrap();
        writeln!(b, "{t},{:.2},{:.2}", y - 0.5, y + 0.5).unwrap();
    }
    let (pa, pb) = (dir.join("a.csv"), dir.join("b.csv"));
    std::fs::write(&pa, a).map_err(|e| epps_lab::Error::io(&pa, e))?;
    std::fs::write(&pb, b).map_err(|e| epps_lab::Error::io(&pb, e))?;

    let resample = Resample {
        skip_weekends: true,
        ..Resample::new(5.0)
    };
    let load = |p: &std::path::Path| -> epps_lab::Result<PriceSeries> {
        let q = load_quotes(p)?;
        let kept = filter_weekends(q.records);
        to_mid_series_with(&kept, &resample)
    };
    let (s1, s2) = PriceSeries::align(&load(&pa)?, &load(&pb)?)?;
    println!("{} grid points, segments {:?}", s1.len(), s1.segments());
    let grid = [5.0, 10.0, 30.0, 60.0, 120.0, 300.0, 600.0];
    let curve = correlation_curve(&s1, &s2, &grid, CiMode::Blocked)?;
    for r in curve.rows() {
        let (lo, hi) = r.ci.unwrap();
        println!("h={:>4}  rho={:.4}  [{lo:.4}, {hi:.4}]  n={}", r.h, r.rho, r.n_effective.unwrap());
    }
    Ok(())
}
