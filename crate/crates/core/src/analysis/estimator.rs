use statrs::distribution::{ContinuousCDF, Normal};

use super::series::ReturnSeries;
use crate::error::{Error, Result};

/// Pearson correlation of two equally-timed return series.
///
/// Sample means are subtracted explicitly and the mean-removed product is
/// normalized by both standard deviations. Grid points where either series
/// is undefined (a gap) are skipped.
pub fn cross_correlation(r1: &ReturnSeries, r2: &ReturnSeries) -> Result<f64> {
    if r1.lag() != r2.lag() || r1.values().len() != r2.values().len() {
        return Err(Error::Degenerate(format!(
            "return series differ in horizon or length ({} s/{} vs {} s/{})",
            r1.h(),
            r1.values().len(),
            r2.h(),
            r2.values().len()
        )));
    }
    pearson(r1.values(), r2.values()).map(|c| c.rho)
}

/// A correlation estimate with the number of pairs behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub rho: f64,
    pub n: usize,
}

/// Pearson correlation over the pairs where both values are defined.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    assert_eq!(x.len(), y.len());
    let pairs = || {
        x.iter()
            .zip(y)
            .filter(|(a, b)| !a.is_nan() && !b.is_nan())
    };
    let (mut n, mut sx, mut sy) = (0usize, 0.0, 0.0);
    for (a, b) in pairs() {
        n += 1;
        sx += a;
        sy += b;
    }
    if n < 2 {
        return Err(Error::Degenerate(format!("{n} paired observations, need >= 2")));
    }
    let (mx, my) = (sx / n as f64, sy / n as f64);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in pairs() {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("a return series has zero variance".into()));
    }
    let rho = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(Correlation { rho, n })
}

/// Two-sided Fisher-transform confidence interval for a correlation.
///
/// `z = atanh(ρ)`, half-width `z_crit/√(n − 3)`, mapped back with `tanh`.
pub fn fisher_ci(rho: f64, n_effective: usize, level: f64) -> Result<(f64, f64)> {
    if !(rho.abs() < 1.0) {
        return Err(Error::invalid("rho", "|rho| must be < 1", rho));
    }
    if n_effective < 4 {
        return Err(Error::invalid("n_effective", "must be >= 4", n_effective));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid("level", "must lie in (0, 1)", level));
    }
    let z = rho.atanh();
    let half = z_critical(level) / ((n_effective - 3) as f64).sqrt();
    Ok(((z - half).tanh(), (z + half).tanh()))
}

/// Standard-normal quantile for a two-sided interval at `level`.
pub fn z_critical(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + level / 2.0)
}

/// Approximate standard error of a correlation estimate from `n` effective
/// samples, `(1 − ρ²)/√(n − 3)`.
pub fn correlation_se(rho: f64, n_effective: usize) -> f64 {
    (1.0 - rho * rho) / ((n_effective.max(4) - 3) as f64).sqrt()
}
