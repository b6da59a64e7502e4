//! Increment covariances of Brownian and OU paths: formula against a sampled path.
//!
//! cargo run --release --example increment_covariances

use epps_lab::stats::batch_means;
use epps_lab::stochastic::{bm_increment_cov, ou_increment_cov, sample_bm_path, sample_ou_path, OuParams, PathGrid};

fn sample_cov(x: &[f64], h: usize, offset: usize) -> (f64, f64) {
    let n = x.len() - h - offset;
    let prods: Vec<f64> = (0..n).map(|t| (x[t + h] - x[t]) * (x[t + offset + h] - x[t + offset])).collect();
    let e = batch_means(&prods, 200);
    (e.mean, e.se)
}

fn main() -> epps_lab::Result<()> {
    let tau = 66.0;
    let ou = OuParams::new(0.03162, 1.0)?;
    let grid = PathGrid::new(1.0, 1_000_000, 1)?;
    let x = sample_ou_path(&ou, &grid, 0).into_values();
    let w = sample_bm_path(1.0, &grid, 1)?.into_values();

    println!("{:>5} {:>2} {:>12} {:>12} {:>8}   {:>9} {:>9}", "h", "m", "OU formula", "OU sample", "SE", "BM formula", "BM sample");
    for h in [10usize, 66, 200] {
        for m in [0u32, 1] {
            let off = m as usize * tau as usize;
            let (c, se) = sample_cov(&x, h, off);
            let (cb, _) = sample_cov(&w, h, off);
            println!(
                "{h:>5} {m:>2} {:>12.5} {c:>12.5} {se:>8.4}   {:>9.2} {cb:>9.2}",
                ou_increment_cov(h as f64, m, tau, &ou)?,
                bm_increment_cov(h as f64, m, tau)?,
            );
        }
    }
    Ok(())
}
