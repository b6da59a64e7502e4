//! Model and simulation curves side by side, through the CLI's compare step.
//!
//! cargo run --release --example compare_curves

use epps_lab::abm::{run_simulation, AbmConfig};
use epps_lab::analysis::{correlation_curve, CiMode};
use epps_lab::cli::{Mode, RunConfig};
use epps_lab::gaussian::{rho_curve, GaussianModelParams};

fn main() -> epps_lab::Result<()> {
    let dir = std::env::temp_dir().join("epps-lab-compare");
    std::fs::create_dir_all(&dir).map_err(|e| epps_lab::Error::io(&dir, e))?;
    let grid: Vec<f64> = (1..=24).map(|k| 10.0 * k as f64).collect();

    let gaussian = dir.join("gaussian.csv");
    rho_curve(&grid, &GaussianModelParams::fitted())?.write_csv(&gaussian)?;

    let run = run_simulation(&AbmConfig {
        n_steps: 400_000,
        record_inventory: false,
        ..AbmConfig::default()
    })?;
    let abm = dir.join("abm.csv");
    correlation_curve(&run.mids[0], &run.mids[1], &grid, CiMode::Blocked)?.write_csv(&abm)?;

    let out = dir.join("comparison.csv");
    let cmp = RunConfig::new(Mode::Compare, None, vec![], Some(out.clone()), vec![gaussian, abm])?;
    println!("{}", cmp.execute()?);
    print!("{}", std::fs::read_to_string(&out).map_err(|e| epps_lab::Error::io(&out, e))?);
    Ok(())
}
