//! Exact samplers for Brownian and Ornstein–Uhlenbeck paths, and the
//! closed-form covariances of their increments.
//!
//! The OU process `dX = -λX dt + σ dW` is started from its stationary law
//! `N(0, σ²/2λ)` and advanced with the exact Gaussian transition, so sampled
//! paths carry no discretization bias. Every sampler draws from a ChaCha8
//! stream selected by `(seed, stream_id)`; distinct stream ids give
//! independent, reproducible paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure, Error, Result};

/// The generator used for every random draw in the crate.
pub type SimRng = ChaCha8Rng;

/// Generator for stream `stream` of the top-level `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stable stream id for a named component (64-bit FNV-1a of the name).
pub const fn stream_id(name: &str) -> u64 {
    let bytes = name.as_bytes();
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut i = 0;
    while i < bytes.len() {
        hash ^= bytes[i] as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        i += 1;
    }
    hash
}

#[inline]
pub(crate) fn std_normal(rng: &mut SimRng) -> f64 {
    StandardNormal.sample(rng)
}

/// Mean-reversion rate and volatility of a zero-mean OU process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    lambda: f64,
    sigma: f64,
}

impl OuParams {
    pub fn new(lambda: f64, sigma: f64) -> Result<Self> {
        ensure(lambda > 0.0 && lambda.is_finite(), "lambda", "must be > 0", lambda)?;
        ensure(sigma > 0.0 && sigma.is_finite(), "sigma", "must be > 0", sigma)?;
        Ok(Self { lambda, sigma })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// σ²/2λ.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.lambda)
    }

    /// Exact one-step transition over `dt`.
    pub fn stepper(&self, dt: f64) -> OuStepper {
        let decay = (-self.lambda * dt).exp();
        // Var[X_dt | X_0] = σ²/2λ · (1 - e^{-2λdt})
        let innovation_sd = (self.stationary_variance() * -(-2.0 * self.lambda * dt).exp_m1()).sqrt();
        OuStepper {
            decay,
            innovation_sd,
            stationary_sd: self.stationary_variance().sqrt(),
        }
    }
}

/// Exact OU transition `X' = e^{-λdt} X + sd·ξ`.
#[derive(Debug, Clone, Copy)]
pub struct OuStepper {
    decay: f64,
    innovation_sd: f64,
    stationary_sd: f64,
}

impl OuStepper {
    /// A draw from the stationary law.
    #[inline]
    pub fn initial(&self, rng: &mut SimRng) -> f64 {
        self.stationary_sd * std_normal(rng)
    }

    #[inline]
    pub fn step(&self, x: f64, rng: &mut SimRng) -> f64 {
        self.decay * x + self.innovation_sd * std_normal(rng)
    }
}

/// Uniform time grid for a sampled path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGrid {
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
}

impl PathGrid {
    pub fn new(dt: f64, n_steps: usize, seed: u64) -> Result<Self> {
        ensure(dt > 0.0 && dt.is_finite(), "dt", "must be > 0", dt)?;
        ensure(n_steps >= 1, "n_steps", "must be >= 1", n_steps as f64)?;
        Ok(Self { dt, n_steps, seed })
    }
}

/// A realized path on a [`PathGrid`]: `n_steps + 1` values, `values[0]` being
/// the initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    values: Vec<f64>,
    grid: PathGrid,
}

impl SampledPath {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &PathGrid {
        &self.grid
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Stationary OU path sampled with the exact transition.
pub fn sample_ou_path(p: &OuParams, grid: &PathGrid, stream: u64) -> SampledPath {
    let mut rng = stream_rng(grid.seed, stream);
    let step = p.stepper(grid.dt);
    let mut values = Vec::with_capacity(grid.n_steps + 1);
    let mut x = step.initial(&mut rng);
    values.push(x);
    for _ in 0..grid.n_steps {
        x = step.step(x, &mut rng);
        values.push(x);
    }
    SampledPath { values, grid: *grid }
}

/// Brownian path `vol · Z` started at zero.
pub fn sample_bm_path(vol: f64, grid: &PathGrid, stream: u64) -> Result<SampledPath> {
    ensure(vol >= 0.0 && vol.is_finite(), "vol", "must be >= 0", vol)?;
    let mut rng = stream_rng(grid.seed, stream);
    let sd = vol * grid.dt.sqrt();
    let mut values = Vec::with_capacity(grid.n_steps + 1);
    let mut z = 0.0;
    values.push(z);
    for _ in 0..grid.n_steps {
        z += sd * std_normal(&mut rng);
        values.push(z);
    }
    Ok(SampledPath { values, grid: *grid })
}

fn check_lag(h: f64, m: u32, tau: f64) -> Result<()> {
    ensure(h > 0.0 && h.is_finite(), "h", "must be > 0", h)?;
    ensure(tau >= 0.0 && tau.is_finite(), "tau", "must be >= 0", tau)?;
    if m > 1 {
        return Err(Error::invalid("m", "must be 0 or 1", m));
    }
    Ok(())
}

/// `⟨Z_{t+h} − Z_t, Z_{t+h−mτ} − Z_{t−mτ}⟩ = (h − mτ)₊` for standard Brownian `Z`.
pub fn bm_increment_cov(h: f64, m: u32, tau: f64) -> Result<f64> {
    check_lag(h, m, tau)?;
    Ok((h - f64::from(m) * tau).max(0.0))
}

/// `⟨X_{t+h} − X_t, X_{t+h−mτ} − X_{t−mτ}⟩` for the stationary OU process:
/// `σ²/2λ · (2e^{−λmτ} − e^{−λ(h+mτ)} − e^{−λ|h−mτ|})`.
pub fn ou_increment_cov(h: f64, m: u32, tau: f64, p: &OuParams) -> Result<f64> {
    check_lag(h, m, tau)?;
    let lag = f64::from(m) * tau;
    let l = p.lambda;
    if m == 0 {
        // σ²/λ · (1 − e^{−λh}), written to avoid cancellation at small h
        return Ok(2.0 * p.stationary_variance() * -(-l * h).exp_m1());
    }
    Ok(p.stationary_variance()
        * (2.0 * (-l * lag).exp() - (-l * (h + lag)).exp() - (-l * (h - lag).abs()).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{batch_means, variance};
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn bm_cov_examples() {
        assert_eq!(bm_increment_cov(5.0, 0, 60.0).unwrap(), 5.0);
        assert_eq!(bm_increment_cov(60.0, 1, 60.0).unwrap(), 0.0);
        assert_eq!(bm_increment_cov(120.0, 1, 60.0).unwrap(), 60.0);
    }

    #[test]
    fn lag_argument_is_checked() {
        assert!(bm_increment_cov(1.0, 2, 1.0).is_err());
        assert!(bm_increment_cov(0.0, 0, 1.0).is_err());
        assert!(bm_increment_cov(-1.0, 0, 1.0).is_err());
        let p = OuParams::new(1.0, 1.0).unwrap();
        assert!(ou_increment_cov(1.0, 3, 1.0, &p).is_err());
    }

    #[test]
    fn ou_cov_examples() {
        let p = OuParams::new(1.0, 1.0).unwrap();
        assert!((ou_increment_cov(LN2, 0, 123.0, &p).unwrap() - 0.5).abs() < 1e-15);
        let p = OuParams::new(1.0, 2f64.sqrt()).unwrap();
        assert!((ou_increment_cov(LN2, 1, LN2, &p).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn ou_cov_tail_limit() {
        let p = OuParams::new(0.03162, 1.3).unwrap();
        let h = 50.0 / p.lambda() + 1.0;
        let limit = p.sigma().powi(2) / p.lambda();
        assert!((ou_increment_cov(h, 0, 0.0, &p).unwrap() - limit).abs() < 1e-9);
    }

    #[test]
    fn ou_params_reject_non_positive() {
        assert!(OuParams::new(0.0, 1.0).is_err());
        assert!(OuParams::new(1.0, -1.0).is_err());
        assert!(OuParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn paths_are_deterministic_per_stream() {
        let grid = PathGrid::new(0.5, 1000, 7).unwrap();
        let p = OuParams::new(0.2, 1.0).unwrap();
        assert_eq!(sample_ou_path(&p, &grid, 3), sample_ou_path(&p, &grid, 3));
        assert_ne!(sample_ou_path(&p, &grid, 3), sample_ou_path(&p, &grid, 4));
        assert_eq!(
            sample_bm_path(1.0, &grid, 3).unwrap(),
            sample_bm_path(1.0, &grid, 3).unwrap()
        );
    }

    #[test]
    fn path_lengths() {
        let grid = PathGrid::new(1.0, 10, 0).unwrap();
        let p = OuParams::new(1.0, 1.0).unwrap();
        assert_eq!(sample_ou_path(&p, &grid, 0).values().len(), 11);
        let bm = sample_bm_path(1.0, &grid, 0).unwrap();
        assert_eq!(bm.values().len(), 11);
        assert_eq!(bm.values()[0], 0.0);
        assert!(PathGrid::new(1.0, 0, 0).is_err());
        assert!(PathGrid::new(0.0, 1, 0).is_err());
    }

    #[test]
    fn zero_vol_bm_is_flat() {
        let grid = PathGrid::new(1.0, 100, 1).unwrap();
        assert!(sample_bm_path(0.0, &grid, 0)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn bm_increment_variance() {
        for (vol, dt, tol) in [(1.0, 1.0, 0.005), (2.0, 0.25, 0.005)] {
            let grid = PathGrid::new(dt, 1_000_000, 11).unwrap();
            let path = sample_bm_path(vol, &grid, 0).unwrap();
            let incs: Vec<f64> = path.values().windows(2).map(|w| w[1] - w[0]).collect();
            let v = variance(&incs);
            assert!((v - vol * vol * dt).abs() < tol, "vol={vol} dt={dt} var={v}");
        }
    }

    #[test]
    fn ou_stationary_variance_from_independent_draws() {
        // 10⁶ independent stationary draws, one per stream-seeded path start.
        let p = OuParams::new(0.5, 1.0).unwrap();
        let step = p.stepper(1.0);
        let mut rng = stream_rng(5, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| step.initial(&mut rng)).collect();
        let v = variance(&xs);
        assert!((v - 1.0).abs() < 0.01, "var={v}");
    }

    #[test]
    fn ou_long_path_variance_within_three_se() {
        let p = OuParams::new(0.5, 1.0).unwrap();
        let grid = PathGrid::new(1.0, 1_000_000, 21).unwrap();
        let path = sample_ou_path(&p, &grid, 0);
        let sq: Vec<f64> = path.values().iter().map(|x| x * x).collect();
        let est = batch_means(&sq, 500);
        assert!(est.z_score(p.stationary_variance()).abs() < 3.0, "{est:?}");
    }

    #[test]
    fn ou_lag_autocorrelation() {
        let p = OuParams::new(0.03162, 1.0).unwrap();
        let grid = PathGrid::new(1.0, 1_000_000, 8).unwrap();
        let x = sample_ou_path(&p, &grid, 0).into_values();
        let lag = 66;
        let n = x.len() - lag;
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let c0 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        let c66 = (0..n).map(|i| (x[i] - mean) * (x[i + lag] - mean)).sum::<f64>() / n as f64;
        let expected = (-0.03162f64 * 66.0).exp();
        assert!((expected - 0.124).abs() < 1e-3);
        assert!((c66 / c0 - expected).abs() < 0.01, "acf={}", c66 / c0);
    }

    proptest! {
        #[test]
        fn bm_cov_nonnegative_and_monotone(h in 1e-3f64..500.0, dh in 0.0f64..100.0, tau in 0.0f64..300.0, m in 0u32..2) {
            let a = bm_increment_cov(h, m, tau).unwrap();
            let b = bm_increment_cov(h + dh, m, tau).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!(b >= a);
            prop_assert_eq!(bm_increment_cov(h, 0, tau).unwrap(), h);
        }

        #[test]
        fn ou_cov_is_bounded_by_variance(h in 1e-3f64..500.0, tau in 0.0f64..300.0, lambda in 1e-3f64..2.0) {
            // |cov| ≤ Var of one increment (Cauchy–Schwarz, stationarity)
            let p = OuParams::new(lambda, 1.0).unwrap();
            let v = ou_increment_cov(h, 0, tau, &p).unwrap();
            let c = ou_increment_cov(h, 1, tau, &p).unwrap();
            prop_assert!(c.abs() <= v * (1.0 + 1e-12));
        }
    }
}
