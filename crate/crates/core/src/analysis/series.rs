use std::ops::Range;

use crate::error::{ensure, Error, Result};

/// Mid prices on a uniform time grid.
///
/// Grid point `i` sits at `t0_us + i·dt`. Points covered by data are grouped
/// into contiguous `segments`; points outside every segment are gaps (their
/// stored value is NaN) and no return is ever computed across a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    t0_us: i64,
    dt: f64,
    mids: Vec<f64>,
    segments: Vec<Range<usize>>,
}

impl PriceSeries {
    /// A gap-free series of strictly positive prices.
    pub fn new(t0_us: i64, dt: f64, mids: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = mids.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::invalid("mids", "prices must be finite and > 0", bad));
        }
        Self::levels(t0_us, dt, mids)
    }

    /// A gap-free series of arbitrary finite levels.
    ///
    /// Arithmetic price models (such as the Gaussian momentum model) produce
    /// levels that may cross zero; only difference returns make sense on them.
    pub fn levels(t0_us: i64, dt: f64, mids: Vec<f64>) -> Result<Self> {
        let n = mids.len();
        Self::with_segments(t0_us, dt, mids, vec![0..n])
    }

    /// A series with explicit coverage. Segments must be non-empty, sorted
    /// and disjoint; uncovered points are overwritten with NaN.
    pub fn with_segments(
        t0_us: i64,
        dt: f64,
        mut mids: Vec<f64>,
        segments: Vec<Range<usize>>,
    ) -> Result<Self> {
        ensure(dt > 0.0 && dt.is_finite(), "dt", "must be > 0", dt)?;
        let mut covered_to = 0;
        for seg in &segments {
            if seg.start < covered_to || seg.start >= seg.end || seg.end > mids.len() {
                return Err(Error::Degenerate(format!(
                    "segment {seg:?} is empty, overlapping, or out of bounds"
                )));
            }
            for i in covered_to..seg.start {
                mids[i] = f64::NAN;
            }
            if let Some(&bad) = mids[seg.clone()].iter().find(|p| !p.is_finite()) {
                return Err(Error::invalid("mids", "covered prices must be finite", bad));
            }
            covered_to = seg.end;
        }
        for m in &mut mids[covered_to..] {
            *m = f64::NAN;
        }
        Ok(Self {
            t0_us,
            dt,
            mids,
            segments,
        })
    }

    pub fn t0_us(&self) -> i64 {
        self.t0_us
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.mids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mids.is_empty()
    }

    pub fn mids(&self) -> &[f64] {
        &self.mids
    }

    pub fn segments(&self) -> &[Range<usize>] {
        &self.segments
    }

    /// Number of covered grid points.
    pub fn covered(&self) -> usize {
        self.segments.iter().map(|s| s.len()).sum()
    }

    /// Grid steps per horizon `h`, failing unless `h` is a positive multiple of `dt`.
    pub fn lag_for(&self, h: f64) -> Result<usize> {
        lag_steps(h, self.dt)
    }

    fn dt_us(&self) -> i64 {
        (self.dt * 1e6).round() as i64
    }

    /// Restricts both series to their common time window.
    ///
    /// Both must share `dt` and sit on the same grid (start times differing by
    /// a whole number of steps).
    pub fn align(a: &PriceSeries, b: &PriceSeries) -> Result<(PriceSeries, PriceSeries)> {
        if a.dt != b.dt {
            return Err(Error::Degenerate(format!(
                "series have different steps ({} s vs {} s)",
                a.dt, b.dt
            )));
        }
        let step = a.dt_us();
        if step <= 0 || (a.t0_us - b.t0_us) % step != 0 {
            return Err(Error::Degenerate("series are not on a common grid".into()));
        }
        let start = a.t0_us.max(b.t0_us);
        let end_a = a.t0_us + step * a.len() as i64;
        let end_b = b.t0_us + step * b.len() as i64;
        let end = end_a.min(end_b);
        if end <= start {
            return Err(Error::Degenerate("series do not overlap in time".into()));
        }
        let len = ((end - start) / step) as usize;
        let cut = |s: &PriceSeries| {
            let off = ((start - s.t0_us) / step) as usize;
            let window = off..off + len;
            let segments = s
                .segments
                .iter()
                .filter_map(|seg| {
                    let lo = seg.start.max(window.start);
                    let hi = seg.end.min(window.end);
                    (lo < hi).then(|| lo - off..hi - off)
                })
                .collect();
            PriceSeries::with_segments(start, s.dt, s.mids[window].to_vec(), segments)
        };
        Ok((cut(a)?, cut(b)?))
    }
}

pub(crate) fn lag_steps(h: f64, dt: f64) -> Result<usize> {
    ensure(h > 0.0 && h.is_finite(), "h", "must be > 0", h)?;
    let lag = h / dt;
    let rounded = lag.round();
    if rounded < 1.0 || (lag - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::invalid("h", "must be a whole multiple of the grid step", h));
    }
    Ok(rounded as usize)
}

/// Overlapping horizon-`h` returns, one per grid point from `lag` onward.
///
/// `values[j]` belongs to grid point `j + lag`; it is NaN when the return
/// would reach across a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    h: f64,
    lag: usize,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Count of defined (non-gap) returns.
    pub fn defined(&self) -> usize {
        self.values.iter().filter(|v| !v.is_nan()).count()
    }
}

/// How a return over `[t − h, t]` is formed from two prices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnKind {
    /// `ln(P(t)/P(t − h))`
    #[default]
    Log,
    /// `P(t) − P(t − h)`
    Difference,
}

/// `r_h(t) = ln(P(t)/P(t − h))` at every grid point with `t − h` on the grid.
pub fn log_returns(series: &PriceSeries, h: f64) -> Result<ReturnSeries> {
    returns(series, h, ReturnKind::Log)
}

/// `P(t) − P(t − h)`; the return used for arithmetic price models.
pub fn diff_returns(series: &PriceSeries, h: f64) -> Result<ReturnSeries> {
    returns(series, h, ReturnKind::Difference)
}

pub fn returns(series: &PriceSeries, h: f64, kind: ReturnKind) -> Result<ReturnSeries> {
    let lag = series.lag_for(h)?;
    if series.len() <= lag {
        return Err(Error::Degenerate(format!(
            "series of {} points is too short for a {lag}-step return",
            series.len()
        )));
    }
    let mut values = vec![f64::NAN; series.len() - lag];
    let p = series.mids();
    for seg in series.segments() {
        for i in (seg.start + lag)..seg.end {
            let (now, then) = (p[i], p[i - lag]);
            values[i - lag] = match kind {
                ReturnKind::Log => {
                    if !(now > 0.0 && then > 0.0) {
                        return Err(Error::invalid(
                            "mids",
                            "log returns need strictly positive prices",
                            now.min(then),
                        ));
                    }
                    (now / then).ln()
                }
                ReturnKind::Difference => now - then,
            };
        }
    }
    Ok(ReturnSeries { h, lag, values })
}
