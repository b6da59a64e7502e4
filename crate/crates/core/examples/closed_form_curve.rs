//! Closed-form ρ(h) of the Gaussian momentum model with the fitted parameters.
//!
//! cargo run --example closed_form_curve

use epps_lab::gaussian::{covariances, rho_curve, GaussianModelParams};

fn main() -> epps_lab::Result<()> {
    let p = GaussianModelParams::fitted();
    println!(
        "lambda={} xi={} theta={} epsilon={} tau={} (nu={:.6})",
        p.lambda(),
        p.xi(),
        p.theta(),
        p.epsilon(),
        p.tau(),
        p.nu()
    );
    let grid: Vec<f64> = [1.0, 5.0, 10.0, 33.0, 60.0, 66.0, 72.0, 99.0, 132.0, 264.0, 600.0].to_vec();
    let curve = rho_curve(&grid, &p)?;
    println!("{:>6} {:>10} {:>12} {:>12}", "h", "rho", "c11", "c12/2eps");
    for row in curve.rows() {
        let c = covariances(row.h, &p)?;
        println!("{:>6} {:>10.6} {:>12.4} {:>12.4}", row.h, row.rho, c.c11, c.c12 / (2.0 * p.epsilon()));
    }
    let peak = curve.peak().unwrap();
    println!("peak: rho({}) = {:.6}", peak.h, peak.rho);
    Ok(())
}
