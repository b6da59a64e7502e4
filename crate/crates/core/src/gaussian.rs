//! The two-asset Gaussian momentum model.
//!
//! A momentum trader holds `p̄·(s¹_t − s¹_{t−τ} + s²_t − s²_{t−τ})` of an
//! equally weighted index, each asset carries an independent OU noise-trader
//! inventory `X^k`, and prices move linearly with flow (elasticity `θ`) plus
//! Brownian noise `ν Z^k`. To first order in the coupling `ε = p̄θ` the
//! cross-correlation of h-returns has the closed form evaluated by
//! [`rho_closed_form`]; it peaks with a kink at `h = τ`.
//!
//! [`simulate_prices`] builds price paths from the explicit first-order
//! solution and serves as the brute-force check of the closed form.

use crate::analysis::{
    fisher_ci, pearson, returns, CorrelationCurve, CurveRow, PriceSeries, ReturnKind,
    CI_LEVEL,
};
use crate::error::{ensure, Error, Result};
use crate::stats::mean_and_se;
use crate::stochastic::{std_normal, stream_id, stream_rng, OuParams, PathGrid};

/// Largest coupling accepted; results are first-order expansions in ε.
pub const MAX_EPSILON: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModelParams {
    lambda: f64,
    sigma: f64,
    theta: f64,
    nu: f64,
    epsilon: f64,
    tau: f64,
}

impl GaussianModelParams {
    /// Validates and builds a parameter set.
    ///
    /// `theta`, `nu`, `tau` and `epsilon` may sit at zero, which switches off
    /// the corresponding channel; at least one of `theta`, `nu` must be
    /// positive so that returns have variance.
    pub fn new(lambda: f64, sigma: f64, theta: f64, nu: f64, epsilon: f64, tau: f64) -> Result<Self> {
        OuParams::new(lambda, sigma)?;
        ensure(theta >= 0.0 && theta.is_finite(), "theta", "must be >= 0", theta)?;
        ensure(nu >= 0.0 && nu.is_finite(), "nu", "must be >= 0", nu)?;
        ensure(tau >= 0.0 && tau.is_finite(), "tau", "must be >= 0", tau)?;
        ensure(
            (0.0..=MAX_EPSILON).contains(&epsilon),
            "epsilon",
            "must lie in [0, 0.25] (first-order expansion)",
            epsilon,
        )?;
        ensure(theta > 0.0 || nu > 0.0, "theta", "theta and nu cannot both be 0", theta)?;
        Ok(Self {
            lambda,
            sigma,
            theta,
            nu,
            epsilon,
            tau,
        })
    }

    /// Parameters expressed through `ξ = ν²/(σ²/λ)` with `σ = 1`.
    pub fn from_xi(lambda: f64, xi: f64, theta: f64, epsilon: f64, tau: f64) -> Result<Self> {
        ensure(xi >= 0.0 && xi.is_finite(), "xi", "must be >= 0", xi)?;
        ensure(lambda > 0.0, "lambda", "must be > 0", lambda)?;
        Self::new(lambda, 1.0, theta, (xi / lambda).sqrt(), epsilon, tau)
    }

    /// The calibrated set λ = 0.03162, ξ = 1e−4, θ = 0.6, τ = 66 s, ε = 0.0505.
    pub fn fitted() -> Self {
        Self::from_xi(0.03162, 0.0001, 0.6, 0.0505, 66.0).expect("valid constants")
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `ξ = ν²/(σ²/λ)`.
    pub fn xi(&self) -> f64 {
        self.nu * self.nu * self.lambda / (self.sigma * self.sigma)
    }

    /// Momentum position scale `p̄ = ε/θ` (infinite when θ = 0).
    pub fn p_bar(&self) -> f64 {
        self.epsilon / self.theta
    }

    pub fn ou(&self) -> OuParams {
        OuParams::new(self.lambda, self.sigma).expect("validated")
    }

    /// `σ²θ²/λ`, the OU contribution scale.
    fn inventory_scale(&self) -> f64 {
        self.sigma * self.sigma * self.theta * self.theta / self.lambda
    }
}

impl Default for GaussianModelParams {
    fn default() -> Self {
        Self::fitted()
    }
}

/// Return covariances at one horizon: `c11 = c22` and `c12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariancePair {
    pub c11: f64,
    pub c12: f64,
}

fn check_h(h: f64) -> Result<()> {
    ensure(h > 0.0 && h.is_finite(), "h", "must be > 0", h)
}

/// `c₁₁(h) = c₂₂(h) = (σ²θ²/λ)(1 − e^{−λh}) + ν²h`.
pub fn c_diag(h: f64, p: &GaussianModelParams) -> Result<f64> {
    check_h(h)?;
    Ok(p.inventory_scale() * -(-p.lambda * h).exp_m1() + p.nu * p.nu * h)
}

/// `c₁₂(h)/2ε = (σ²θ²/λ)(1 − e^{−λh} − e^{−λτ} + ½e^{−λ(h+τ)} + ½e^{−λ|h−τ|}) + ν²(h ∧ τ)`.
pub fn c_cross_over_2eps(h: f64, p: &GaussianModelParams) -> Result<f64> {
    check_h(h)?;
    Ok(p.inventory_scale() * ou_bracket(p.lambda * h, p.lambda * p.tau) + p.nu * p.nu * h.min(p.tau))
}

/// `1 − e^{−a} − e^{−b} + ½e^{−(a+b)} + ½e^{−|a−b|}` for `a = λh`, `b = λτ`.
fn ou_bracket(a: f64, b: f64) -> f64 {
    // = (1 − e^{−a})(1 − e^{−b}) − ½e^{−(a+b)} + ½e^{−|a−b|}; the product form
    // keeps precision when either argument is small.
    let ea = -(-a).exp_m1();
    let eb = -(-b).exp_m1();
    ea * eb + 0.5 * ((-(a - b).abs()).exp() - (-(a + b)).exp())
}

pub fn covariances(h: f64, p: &GaussianModelParams) -> Result<CovariancePair> {
    Ok(CovariancePair {
        c11: c_diag(h, p)?,
        c12: 2.0 * p.epsilon * c_cross_over_2eps(h, p)?,
    })
}

/// First-order cross-correlation `ρ(h) = 2ε · [θ²B(h) + ξ(h∧τ)] / [θ²(1 − e^{−λh}) + ξh]`.
pub fn rho_closed_form(h: f64, p: &GaussianModelParams) -> Result<f64> {
    check_h(h)?;
    let th2 = p.theta * p.theta;
    let xi = p.xi();
    let num = th2 * ou_bracket(p.lambda * h, p.lambda * p.tau) + xi * h.min(p.tau);
    let den = th2 * -(-p.lambda * h).exp_m1() + xi * h;
    Ok(2.0 * p.epsilon * num / den)
}

/// [`rho_closed_form`] over a grid; confidence fields are left empty.
pub fn rho_curve(h_grid: &[f64], p: &GaussianModelParams) -> Result<CorrelationCurve> {
    crate::analysis::validate_grid(h_grid)?;
    let rows = h_grid
        .iter()
        .map(|&h| {
            Ok(CurveRow {
                h,
                rho: rho_closed_form(h, p)?,
                ci: None,
                n_effective: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelationCurve::new(rows, None)
}

/// Grid steps in the momentum window, failing unless `dt` divides `tau`.
pub fn window_steps(tau: f64, dt: f64) -> Result<usize> {
    let w = tau / dt;
    let rounded = w.round();
    if (w - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::invalid("dt", "must divide tau exactly", dt));
    }
    Ok(rounded as usize)
}

/// Price paths of both assets from the explicit first-order solution
///
/// `s^k_t = θX^k_t + νZ^k_t + εθ Σ_j (X^j_t − X^j_{t−τ}) + εν Σ_j (Z^j_t − Z^j_{t−τ})`.
///
/// The four drivers are sampled on `[−τ, T]` so lagged terms exist from
/// `t = 0`; the OU drivers start from their stationary law, so the return
/// series is stationary throughout. Prices are arithmetic levels.
pub fn simulate_prices(p: &GaussianModelParams, grid: &PathGrid) -> Result<(PriceSeries, PriceSeries)> {
    let w = window_steps(p.tau, grid.dt)?;
    let ou = p.ou().stepper(grid.dt);
    let bm_sd = grid.dt.sqrt();
    let mut rngs = [
        stream_rng(grid.seed, stream_id("gaussian.x1")),
        stream_rng(grid.seed, stream_id("gaussian.x2")),
        stream_rng(grid.seed, stream_id("gaussian.z1")),
        stream_rng(grid.seed, stream_id("gaussian.z2")),
    ];
    let (theta, nu, eps) = (p.theta, p.nu, p.epsilon);

    // ring of the last w+1 driver states [X1, X2, Z1, Z2]
    let mut ring = vec![[0.0f64; 4]; w + 1];
    let mut state = [
        ou.initial(&mut rngs[0]),
        ou.initial(&mut rngs[1]),
        0.0,
        0.0,
    ];
    ring[0] = state;
    let advance = |state: &mut [f64; 4], rngs: &mut [_; 4]| {
        state[0] = ou.step(state[0], &mut rngs[0]);
        state[1] = ou.step(state[1], &mut rngs[1]);
        state[2] += bm_sd * std_normal(&mut rngs[2]);
        state[3] += bm_sd * std_normal(&mut rngs[3]);
    };
    for slot in ring.iter_mut().skip(1) {
        advance(&mut state, &mut rngs);
        *slot = state;
    }

    let n = grid.n_steps + 1;
    let mut s1 = Vec::with_capacity(n);
    let mut s2 = Vec::with_capacity(n);
    let mut head = w; // ring index of time t; time t − τ sits at head + 1 (mod w + 1)
    for i in 0..n {
        if i > 0 {
            advance(&mut state, &mut rngs);
            head = (head + 1) % (w + 1);
            ring[head] = state;
        }
        let now = ring[head];
        let then = ring[(head + 1) % (w + 1)];
        let momentum = eps
            * (theta * (now[0] - then[0] + now[1] - then[1]) + nu * (now[2] - then[2] + now[3] - then[3]));
        s1.push(theta * now[0] + nu * now[2] + momentum);
        s2.push(theta * now[1] + nu * now[3] + momentum);
    }
    Ok((PriceSeries::levels(0, grid.dt, s1)?, PriceSeries::levels(0, grid.dt, s2)?))
}

/// One horizon of a Monte Carlo check against the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub h: f64,
    /// ρ̂ over the whole simulated path.
    pub rho_hat: f64,
    /// Batch-means standard error of `rho_hat`.
    pub mc_se: f64,
    pub rho_closed_form: f64,
    pub ci: Option<(f64, f64)>,
    pub n_effective: usize,
}

impl OracleRow {
    /// `|ρ̂ − ρ|` in units of the Monte Carlo standard error.
    pub fn z_score(&self) -> f64 {
        (self.rho_hat - self.rho_closed_form).abs() / self.mc_se
    }
}

/// Estimates ρ̂(h) from simulated difference returns and compares with the
/// closed form. The standard error comes from `n_batches` contiguous batches.
pub fn oracle_curve(
    s1: &PriceSeries,
    s2: &PriceSeries,
    h_grid: &[f64],
    p: &GaussianModelParams,
    n_batches: usize,
) -> Result<Vec<OracleRow>> {
    crate::analysis::validate_grid(h_grid)?;
    ensure(n_batches >= 2, "n_batches", "must be >= 2", n_batches as f64)?;
    use rayon::prelude::*;
    h_grid
        .par_iter()
        .map(|&h| {
            let r1 = returns(s1, h, ReturnKind::Difference)?;
            let r2 = returns(s2, h, ReturnKind::Difference)?;
            let whole = pearson(r1.values(), r2.values())?;
            let len = r1.values().len() / n_batches;
            if len < 2 * r1.lag() {
                return Err(Error::Degenerate(format!(
                    "path too short for {n_batches} batches at h = {h}"
                )));
            }
            let batch_rhos = (0..n_batches)
                .map(|b| {
                    let span = b * len..(b + 1) * len;
                    pearson(&r1.values()[span.clone()], &r2.values()[span]).map(|c| c.rho)
                })
                .collect::<Result<Vec<_>>>()?;
            let n_effective = whole.n / r1.lag();
            Ok(OracleRow {
                h,
                rho_hat: whole.rho,
                mc_se: mean_and_se(&batch_rhos).se,
                rho_closed_form: rho_closed_form(h, p)?,
                ci: fisher_ci(whole.rho, n_effective, CI_LEVEL).ok(),
                n_effective,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn with(theta: f64, nu: f64, epsilon: f64, tau: f64) -> GaussianModelParams {
        GaussianModelParams::new(1.0, 1.0, theta, nu, epsilon, tau).unwrap()
    }

    #[test]
    fn fitted_parameters() {
        let p = GaussianModelParams::fitted();
        assert!((p.xi() - 1e-4).abs() < 1e-18);
        assert_eq!(p.sigma(), 1.0);
        assert!((p.p_bar() * p.theta() - p.epsilon()).abs() < 1e-15);
    }

    #[test]
    fn c_diag_examples() {
        let p = GaussianModelParams::new(1.0, 1.0, 1.0, 0.0, 0.05, 10.0).unwrap();
        assert!((c_diag(LN2, &p).unwrap() - 0.5).abs() < 1e-15);
        let f = GaussianModelParams::fitted();
        let small = c_diag(1e-9, &f).unwrap();
        assert!(small > 0.0 && small < 1e-8);
        assert!(c_diag(0.0, &f).is_err());
    }

    #[test]
    fn cross_term_examples() {
        assert_eq!(c_cross_over_2eps(17.0, &with(1.0, 1.0, 0.05, 0.0)).unwrap(), 0.0);
        assert_eq!(c_cross_over_2eps(30.0, &with(0.0, 1.0, 0.05, 60.0)).unwrap(), 30.0);
        assert!(c_cross_over_2eps(-1.0, &with(1.0, 1.0, 0.05, 1.0)).is_err());
    }

    #[test]
    fn rho_examples() {
        let p = with(0.0, 1.0, 0.05, 60.0);
        assert!((rho_closed_form(120.0, &p).unwrap() - 0.05).abs() < 1e-15);
        for h in [0.1, 3.0, 500.0] {
            assert_eq!(rho_closed_form(h, &with(0.6, 0.1, 0.05, 0.0)).unwrap(), 0.0);
        }
        // 0.144327678877 from an independent 40-digit evaluation
        let v = rho_closed_form(66.0, &GaussianModelParams::fitted()).unwrap();
        assert!((v - 0.144_327_678_877).abs() < 1e-11, "{v}");
    }

    #[test]
    fn rho_curve_rows() {
        let c = rho_curve(&[30.0, 60.0, 90.0], &with(0.0, 1.0, 0.05, 60.0)).unwrap();
        let rhos: Vec<f64> = c.rows().iter().map(|r| r.rho).collect();
        assert!((rhos[0] - 0.1).abs() < 1e-15 && (rhos[1] - 0.1).abs() < 1e-15);
        assert!((rhos[2] - 0.1 * 60.0 / 90.0).abs() < 1e-15);
        assert!(c.rows().iter().all(|r| r.ci.is_none() && r.n_effective.is_none()));
        assert!(rho_curve(&[], &with(0.0, 1.0, 0.05, 60.0)).is_err());
        let single = rho_curve(&[66.0], &GaussianModelParams::fitted()).unwrap();
        assert!((single.rows()[0].rho - 0.1443).abs() < 5e-5);
    }

    #[test]
    fn composition_matches() {
        let p = GaussianModelParams::fitted();
        for h in [0.5, 1.0, 33.0, 65.9, 66.0, 66.1, 200.0, 5000.0] {
            let direct = rho_closed_form(h, &p).unwrap();
            let composed = 2.0 * p.epsilon() * c_cross_over_2eps(h, &p).unwrap() / c_diag(h, &p).unwrap();
            assert!((direct - composed).abs() < 1e-12, "h={h}");
        }
    }

    #[test]
    fn kink_at_tau() {
        let p = GaussianModelParams::fitted();
        let r = |h: f64| rho_closed_form(h, &p).unwrap();
        let second = |h: f64| (r(h + 1.0) - r(h)) - (r(h) - r(h - 1.0));
        assert!(second(66.0) < 0.0);
        assert!(second(66.0).abs() > 10.0 * second(33.0).abs());
        assert!((r(66.0 + 1e-6) - r(66.0 - 1e-6)).abs() < 1e-7);
        assert!(r(20.0 * 66.0).abs() < r(66.0) / 2.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(GaussianModelParams::new(0.0, 1.0, 1.0, 1.0, 0.05, 1.0).is_err());
        assert!(GaussianModelParams::new(1.0, 1.0, -1.0, 1.0, 0.05, 1.0).is_err());
        assert!(GaussianModelParams::new(1.0, 1.0, 1.0, 1.0, 0.3, 1.0).is_err());
        assert!(GaussianModelParams::new(1.0, 1.0, 1.0, 1.0, 0.05, -1.0).is_err());
        assert!(GaussianModelParams::new(1.0, 1.0, 0.0, 0.0, 0.05, 1.0).is_err());
        assert!(GaussianModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn simulation_needs_tau_on_grid() {
        let p = GaussianModelParams::fitted();
        let grid = PathGrid::new(4.0, 100, 1).unwrap();
        assert!(simulate_prices(&p, &grid).is_err());
        let grid = PathGrid::new(0.5, 100, 1).unwrap();
        let (a, b) = simulate_prices(&p, &grid).unwrap();
        assert_eq!((a.len(), b.len()), (101, 101));
    }

    #[test]
    fn simulation_is_deterministic() {
        let p = GaussianModelParams::fitted();
        let grid = PathGrid::new(1.0, 5000, 42).unwrap();
        assert_eq!(simulate_prices(&p, &grid).unwrap(), simulate_prices(&p, &grid).unwrap());
        let other = PathGrid { seed: 43, ..grid };
        assert_ne!(simulate_prices(&p, &grid).unwrap().0, simulate_prices(&p, &other).unwrap().0);
    }
}
