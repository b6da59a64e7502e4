use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use super::estimator::{correlation_se, fisher_ci, pearson};
use super::series::{lag_steps, returns, PriceSeries, ReturnKind};
use crate::error::{Error, Result};
use crate::table::{fmt_sig, Table};

pub const CURVE_HEADER: [&str; 5] = ["h_seconds", "rho", "ci_low", "ci_high", "n_effective"];

/// Confidence level of every interval the curve builder attaches.
pub const CI_LEVEL: f64 = 0.95;

/// Effective sample size used for confidence intervals on overlapping returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CiMode {
    /// `floor(pairs / (h/dt))`: one independent sample per non-overlapping window.
    #[default]
    Blocked,
    /// Every overlapping pair counts; intervals come out too narrow.
    Overlapping,
}

impl fmt::Display for CiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CiMode::Blocked => "blocked",
            CiMode::Overlapping => "overlapping",
        })
    }
}

impl FromStr for CiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blocked" => Ok(CiMode::Blocked),
            "overlapping" => Ok(CiMode::Overlapping),
            _ => Err(Error::Config(format!("unknown ci mode `{s}` (blocked|overlapping)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub h: f64,
    pub rho: f64,
    pub ci: Option<(f64, f64)>,
    pub n_effective: Option<usize>,
}

impl CurveRow {
    /// Approximate standard error of `rho`, when a sample size is attached.
    pub fn se(&self) -> Option<f64> {
        self.n_effective.map(|n| correlation_se(self.rho, n))
    }
}

/// ρ(h) over an ascending horizon grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrelationCurve {
    rows: Vec<CurveRow>,
    ci_mode: Option<CiMode>,
}

impl CorrelationCurve {
    pub fn new(rows: Vec<CurveRow>, ci_mode: Option<CiMode>) -> Result<Self> {
        if rows.windows(2).any(|w| !(w[0].h < w[1].h)) {
            return Err(Error::Degenerate("curve horizons must be strictly ascending".into()));
        }
        Ok(Self { rows, ci_mode })
    }

    pub fn rows(&self) -> &[CurveRow] {
        &self.rows
    }

    pub fn ci_mode(&self) -> Option<CiMode> {
        self.ci_mode
    }

    pub fn row_at(&self, h: f64) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.h == h)
    }

    /// Row with the largest ρ.
    pub fn peak(&self) -> Option<&CurveRow> {
        self.rows.iter().max_by(|a, b| a.rho.total_cmp(&b.rho))
    }

    /// Absent CI and sample-size fields are written as empty cells.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(CURVE_HEADER);
        for r in &self.rows {
            let (lo, hi) = r.ci.map_or((String::new(), String::new()), |(l, h)| (fmt_sig(l), fmt_sig(h)));
            t.push(vec![
                fmt_sig(r.h),
                fmt_sig(r.rho),
                lo,
                hi,
                r.n_effective.map_or(String::new(), |n| n.to_string()),
            ]);
        }
        t
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_table().write(path)
    }
}

/// Checks a horizon grid: non-empty, positive, strictly ascending.
pub fn validate_grid(h_grid: &[f64]) -> Result<()> {
    if h_grid.is_empty() {
        return Err(Error::Degenerate("empty horizon grid".into()));
    }
    if let Some(&bad) = h_grid.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(Error::invalid("h_grid", "horizons must be > 0", bad));
    }
    if h_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Degenerate("horizon grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Empirical ρ̂(h) from log returns, with Fisher 95% bands.
pub fn correlation_curve(
    p1: &PriceSeries,
    p2: &PriceSeries,
    h_grid: &[f64],
    ci_mode: CiMode,
) -> Result<CorrelationCurve> {
    correlation_curve_with(p1, p2, h_grid, ci_mode, ReturnKind::Log)
}

/// [`correlation_curve`] with a choice of return definition.
pub fn correlation_curve_with(
    p1: &PriceSeries,
    p2: &PriceSeries,
    h_grid: &[f64],
    ci_mode: CiMode,
    kind: ReturnKind,
) -> Result<CorrelationCurve> {
    validate_grid(h_grid)?;
    if p1.dt() != p2.dt() || p1.t0_us() != p2.t0_us() || p1.len() != p2.len() {
        return Err(Error::Degenerate(
            "price series are not aligned (align them onto a common grid first)".into(),
        ));
    }
    for &h in h_grid {
        lag_steps(h, p1.dt())?;
    }
    let rows = h_grid
        .par_iter()
        .map(|&h| curve_row(p1, p2, h, ci_mode, kind))
        .collect::<Result<Vec<_>>>()?;
    CorrelationCurve::new(rows, Some(ci_mode))
}

fn curve_row(p1: &PriceSeries, p2: &PriceSeries, h: f64, mode: CiMode, kind: ReturnKind) -> Result<CurveRow> {
    let r1 = returns(p1, h, kind)?;
    let r2 = returns(p2, h, kind)?;
    let c = pearson(r1.values(), r2.values())?;
    let n_effective = match mode {
        CiMode::Blocked => c.n / r1.lag(),
        CiMode::Overlapping => c.n,
    };
    let ci = if c.rho.abs() >= 1.0 {
        Some((c.rho, c.rho))
    } else {
        fisher_ci(c.rho, n_effective, CI_LEVEL).ok()
    };
    Ok(CurveRow {
        h,
        rho: c.rho,
        ci,
        n_effective: Some(n_effective),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(n: usize, seed: u64) -> Vec<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut p = 100.0;
        (0..n)
            .map(|_| {
                p *= 1.0 + 0.001 * (rng.random::<f64>() - 0.5);
                p
            })
            .collect()
    }

    #[test]
    fn identical_series_correlate_perfectly() {
        let p = PriceSeries::new(0, 1.0, walk(2000, 1)).unwrap();
        let c = correlation_curve(&p, &p, &[1.0, 5.0, 20.0], CiMode::Blocked).unwrap();
        for r in c.rows() {
            assert!((r.rho - 1.0).abs() < 1e-12);
            let (lo, hi) = r.ci.unwrap();
            assert!(lo <= r.rho && r.rho <= hi);
        }
    }

    #[test]
    fn blocked_vs_overlapping_counts() {
        let p = PriceSeries::new(0, 1.0, walk(1001, 2)).unwrap();
        let q = PriceSeries::new(0, 1.0, walk(1001, 3)).unwrap();
        let b = correlation_curve(&p, &q, &[10.0], CiMode::Blocked).unwrap();
        let o = correlation_curve(&p, &q, &[10.0], CiMode::Overlapping).unwrap();
        assert_eq!(o.rows()[0].n_effective, Some(991));
        assert_eq!(b.rows()[0].n_effective, Some(99));
        assert_eq!(b.rows()[0].rho, o.rows()[0].rho);
    }

    #[test]
    fn grid_errors() {
        let p = PriceSeries::new(0, 1.0, walk(100, 4)).unwrap();
        assert!(correlation_curve(&p, &p, &[], CiMode::Blocked).is_err());
        assert!(correlation_curve(&p, &p, &[2.0, 1.0], CiMode::Blocked).is_err());
        assert!(correlation_curve(&p, &p, &[1.5], CiMode::Blocked).is_err());
        let short = PriceSeries::new(0, 1.0, walk(50, 4)).unwrap();
        assert!(correlation_curve(&p, &short, &[1.0], CiMode::Blocked).is_err());
    }

    #[test]
    fn csv_layout() {
        let c = CorrelationCurve::new(
            vec![
                CurveRow { h: 30.0, rho: 0.1, ci: None, n_effective: None },
                CurveRow { h: 60.0, rho: 0.1, ci: Some((0.05, 0.15)), n_effective: Some(400) },
            ],
            None,
        )
        .unwrap();
        let bytes = String::from_utf8(c.to_table().to_bytes()).unwrap();
        assert_eq!(bytes, "h_seconds,rho,ci_low,ci_high,n_effective\n30,0.1,,,\n60,0.1,0.05,0.15,400\n");
    }

    #[test]
    fn ci_mode_parses() {
        assert_eq!("blocked".parse::<CiMode>().unwrap(), CiMode::Blocked);
        assert_eq!(CiMode::Overlapping.to_string(), "overlapping");
        assert!("other".parse::<CiMode>().is_err());
    }
}
