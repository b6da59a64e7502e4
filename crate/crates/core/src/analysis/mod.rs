//! Empirical cross-correlation pipeline: quote ingestion, weekday filtering,
//! mid-price resampling, horizon-h log returns, the ρ̂(h) estimator with
//! Fisher confidence bands, and curves over a horizon grid.

mod curve;
mod estimator;
mod ingest;
mod series;

pub use curve::{
    correlation_curve, correlation_curve_with, validate_grid, CiMode, CorrelationCurve, CurveRow,
    CI_LEVEL, CURVE_HEADER,
};
pub use estimator::{correlation_se, cross_correlation, fisher_ci, pearson, z_critical, Correlation};
pub use ingest::{
    filter_weekends, is_weekend, load_quotes, to_mid_series, to_mid_series_with, Malformed, QuoteFile,
    QuoteRecord, Resample, DEFAULT_MAX_GAP_S, QUOTE_HEADER,
};
pub use series::{diff_returns, log_returns, returns, PriceSeries, ReturnKind, ReturnSeries};
