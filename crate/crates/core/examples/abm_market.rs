//! Agent-based market with and without the momentum trader.
//!
//! cargo run --release --example abm_market -- [n_steps]

use epps_lab::abm::{run_simulation, AbmConfig};
use epps_lab::analysis::{correlation_curve, CiMode};

fn main() -> epps_lab::Result<()> {
    let n_steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500_000);
    let grid = [1.0, 5.0, 10.0, 30.0, 60.0, 90.0, 120.0, 240.0, 500.0];
    for enabled in [true, false] {
        let mut cfg = AbmConfig {
            n_steps,
            seed: 7,
            record_inventory: false,
            ..AbmConfig::default()
        };
        cfg.momentum.enabled = enabled;
        let run = run_simulation(&cfg)?;
        let curve = correlation_curve(&run.mids[0], &run.mids[1], &grid, CiMode::Blocked)?;
        println!("momentum {}: invariants hold = {}", if enabled { "on" } else { "off" }, run.invariants.holds());
        for r in curve.rows() {
            let (lo, hi) = r.ci.unwrap_or((f64::NAN, f64::NAN));
            println!("  h={:>5}  rho={:>7.4}  [{lo:.4}, {hi:.4}]", r.h, r.rho);
        }
        let s = &run.final_state.assets;
        println!(
            "  final mids {:.5} / {:.2}, momentum positions {} / {}",
            s[0].mid_ticks as f64 * cfg.assets[0].tick_size,
            s[1].mid_ticks as f64 * cfg.assets[1].tick_size,
            s[0].momentum_inventory.units(),
            s[1].momentum_inventory.units()
        );
    }
    Ok(())
}
