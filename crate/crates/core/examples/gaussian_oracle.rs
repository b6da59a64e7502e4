//! Simulate the Gaussian momentum model and compare ρ̂(h) with the closed form.
//!
//! cargo run --release --example gaussian_oracle -- [n_steps]

use epps_lab::gaussian::{oracle_curve, simulate_prices, GaussianModelParams};
use epps_lab::stochastic::PathGrid;

fn main() -> epps_lab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000_000);
    let p = GaussianModelParams::fitted();
    let (s1, s2) = simulate_prices(&p, &PathGrid::new(1.0, n, 42)?)?;
    let grid = [1.0, 5.0, 10.0, 33.0, 66.0, 99.0, 132.0, 264.0];
    println!("{:>5} {:>9} {:>9} {:>9} {:>6}", "h", "rho_hat", "mc_se", "closed", "z");
    for r in oracle_curve(&s1, &s2, &grid, &p, 50)? {
        println!(
            "{:>5} {:>9.5} {:>9.5} {:>9.5} {:>6.2}",
            r.h,
            r.rho_hat,
            r.mc_se,
            r.rho_closed_form,
            r.z_score()
        );
    }
    // the simulator is first order in epsilon; expect O(eps^2) bias near the peak
    println!("5 eps^2 = {:.5}", 5.0 * p.epsilon() * p.epsilon());
    Ok(())
}
