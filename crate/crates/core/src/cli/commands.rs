use std::ffi::OsString;
use std::path::{Path, PathBuf};

use super::config::{parse_h_grid, Settings};
use crate::abm::{ensemble_curve, run_simulation, AbmRun};
use crate::analysis::{
    correlation_curve, filter_weekends, load_quotes, to_mid_series_with, CiMode, PriceSeries, Resample,
    CURVE_HEADER,
};
use crate::error::{Error, Result};
use crate::gaussian::{oracle_curve, rho_curve, simulate_prices};
use crate::stochastic::PathGrid;
use crate::table::{fmt_sig, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    GaussianCurve,
    GaussianMc,
    AbmRun,
    Analyze,
    Compare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::GaussianCurve => "gaussian-curve",
            Mode::GaussianMc => "gaussian-mc",
            Mode::AbmRun => "abm-run",
            Mode::Analyze => "analyze",
            Mode::Compare => "compare",
        }
    }

    fn default_grid(self) -> &'static str {
        match self {
            Mode::GaussianCurve | Mode::Analyze => "1:300:1",
            Mode::GaussianMc => "3:264:3",
            Mode::AbmRun => "5:300:5",
            Mode::Compare => "1",
        }
    }

    fn default_out(self) -> &'static str {
        match self {
            Mode::GaussianCurve => "gaussian_curve.csv",
            Mode::GaussianMc => "gaussian_mc.csv",
            Mode::AbmRun => "abm_curve.csv",
            Mode::Analyze => "empirical_curve.csv",
            Mode::Compare => "comparison.csv",
        }
    }

    /// Settings that influence this command, echoed into its sidecar.
    fn prefixes(self) -> &'static [&'static str] {
        match self {
            Mode::GaussianCurve => &["gaussian."],
            Mode::GaussianMc => &["gaussian.", "mc.", "run.seed"],
            Mode::AbmRun => &["abm.", "run.seed"],
            Mode::Analyze => &["analyze."],
            Mode::Compare => &[],
        }
    }
}

/// A fully resolved command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub settings: Settings,
    pub out: PathBuf,
    pub inputs: Vec<PathBuf>,
    /// Extra output for `abm-run`: the simulated mid prices.
    pub prices_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(
        mode: Mode,
        config: Option<&Path>,
        overrides: Vec<(String, String)>,
        out: Option<PathBuf>,
        inputs: Vec<PathBuf>,
    ) -> Result<Self> {
        let settings = Settings::resolve(config, overrides)?;
        let out = out.unwrap_or_else(|| PathBuf::from(mode.default_out()));
        let prices_out = (mode == Mode::AbmRun).then(|| sibling(&out, "prices"));
        Ok(Self {
            mode,
            settings,
            out,
            inputs,
            prices_out,
        })
    }

    pub fn h_grid(&self) -> Result<Vec<f64>> {
        parse_h_grid(self.settings.get("run.h_grid").unwrap_or(self.mode.default_grid()))
    }

    pub fn seed(&self) -> Result<u64> {
        self.settings.parse("run.seed")
    }

    pub fn execute(&self) -> Result<String> {
        match self.mode {
            Mode::GaussianCurve => cmd_gaussian_curve(self),
            Mode::GaussianMc => cmd_gaussian_mc(self),
            Mode::AbmRun => cmd_abm_run(self),
            Mode::Analyze => cmd_analyze(self),
            Mode::Compare => cmd_compare(self),
        }
    }
}

/// `dir/stem.csv` → `dir/stem.<tag>.csv`.
fn sibling(out: &Path, tag: &str) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| OsString::from("out"), OsString::from);
    let mut name = stem;
    name.push(format!(".{tag}"));
    if let Some(ext) = out.extension() {
        name.push(".");
        name.push(ext);
    }
    out.with_file_name(name)
}

/// Path of the metadata file accompanying `out`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn write_sidecar(run: &RunConfig, extra: &[(String, String)]) -> Result<()> {
    let mut body = format!("command={}\n", run.mode.name());
    if let Some(grid) = run.settings.get("run.h_grid") {
        body.push_str(&format!("h_grid={grid}\n"));
    } else if run.mode != Mode::Compare {
        body.push_str(&format!("h_grid={}\n", run.mode.default_grid()));
    }
    body.push_str(&run.settings.render(run.mode.prefixes()));
    for (i, input) in run.inputs.iter().enumerate() {
        body.push_str(&format!("input{}={}\n", i + 1, input.display()));
    }
    for (k, v) in extra {
        body.push_str(&format!("{k}={v}\n"));
    }
    let path = sidecar_path(&run.out);
    std::fs::write(&path, body).map_err(|e| Error::io(path, e))
}

pub fn cmd_gaussian_curve(run: &RunConfig) -> Result<String> {
    let p = run.settings.gaussian()?;
    if !(p.tau() > 0.0) {
        return Err(Error::invalid("tau", "invariant tau > 0 (a momentum window is required)", p.tau()));
    }
    let curve = rho_curve(&run.h_grid()?, &p)?;
    curve.write_csv(&run.out)?;
    write_sidecar(run, &[])?;
    let peak = curve.peak().expect("non-empty grid");
    Ok(format!(
        "wrote {} rows to {}; max rho {} at h = {} s",
        curve.rows().len(),
        run.out.display(),
        fmt_sig(peak.rho),
        fmt_sig(peak.h)
    ))
}

pub fn cmd_gaussian_mc(run: &RunConfig) -> Result<String> {
    let p = run.settings.gaussian()?;
    let grid = PathGrid::new(
        run.settings.parse("mc.dt")?,
        run.settings.parse("mc.n_steps")?,
        run.seed()?,
    )?;
    let (s1, s2) = simulate_prices(&p, &grid)?;
    let rows = oracle_curve(&s1, &s2, &run.h_grid()?, &p, run.settings.parse("mc.batches")?)?;

    let mut header: Vec<&str> = CURVE_HEADER.to_vec();
    header.extend(["mc_se", "rho_closed_form"]);
    let mut t = Table::new(header);
    let mut worst = 0.0f64;
    for r in &rows {
        let (lo, hi) = r.ci.map_or((String::new(), String::new()), |(l, h)| (fmt_sig(l), fmt_sig(h)));
        t.push(vec![
            fmt_sig(r.h),
            fmt_sig(r.rho_hat),
            lo,
            hi,
            r.n_effective.to_string(),
            fmt_sig(r.mc_se),
            fmt_sig(r.rho_closed_form),
        ]);
        worst = worst.max(r.z_score());
    }
    t.write(&run.out)?;
    write_sidecar(run, &[("max_abs_z".into(), fmt_sig(worst))])?;
    Ok(format!(
        "wrote {} rows to {}; max |rho_hat - rho| = {} standard errors",
        rows.len(),
        run.out.display(),
        fmt_sig(worst)
    ))
}

fn prices_table(run: &AbmRun) -> Table {
    let mut t = Table::new(["t_seconds", "mid1", "mid2"]);
    let dt = run.mids[0].dt();
    for (i, (a, b)) in run.mids[0].mids().iter().zip(run.mids[1].mids()).enumerate() {
        t.push(vec![fmt_sig(i as f64 * dt), fmt_sig(*a), fmt_sig(*b)]);
    }
    t
}

pub fn cmd_abm_run(run: &RunConfig) -> Result<String> {
    let cfg = run.settings.abm()?;
    let grid = run.h_grid()?;
    let replicas: u64 = run.settings.parse("abm.replicas")?;
    if replicas == 0 {
        return Err(Error::invalid("replicas", "must be >= 1", 0));
    }
    let sim = run_simulation(&crate::abm::AbmConfig {
        record_inventory: false,
        ..cfg.clone()
    })?;
    let curve = if replicas == 1 {
        correlation_curve(&sim.mids[0], &sim.mids[1], &grid, CiMode::Blocked)?
    } else {
        let seeds: Vec<u64> = (0..replicas).map(|k| cfg.seed.wrapping_add(k)).collect();
        ensemble_curve(&cfg, &seeds, &grid)?
    };
    curve.write_csv(&run.out)?;
    let prices_out = run.prices_out.clone().unwrap_or_else(|| sibling(&run.out, "prices"));
    prices_table(&sim).write(&prices_out)?;
    let inv = sim.invariants;
    let status = if inv.holds() { "ok" } else { "VIOLATED" };
    eprintln!(
        "invariants {status}: {} steps, {} clearing violations, {} cap violations",
        inv.steps_checked, inv.clearing_violations, inv.cap_violations
    );
    write_sidecar(
        run,
        &[
            ("prices_out".into(), prices_out.display().to_string()),
            ("invariants".into(), status.into()),
        ],
    )?;
    let peak = curve.peak().expect("non-empty grid");
    Ok(format!(
        "wrote {} and {}; peak rho {} at h = {} s",
        run.out.display(),
        prices_out.display(),
        fmt_sig(peak.rho),
        fmt_sig(peak.h)
    ))
}

/// Loads, filters and resamples one quote file.
pub fn quote_series(path: &Path, resample: &Resample) -> Result<PriceSeries> {
    let file = load_quotes(path)?;
    for m in file.malformed.iter().take(10) {
        eprintln!("{}:{}: skipped: {}", path.display(), m.line, m.reason);
    }
    let records = filter_weekends(file.records);
    to_mid_series_with(&records, resample)
}

pub fn cmd_analyze(run: &RunConfig) -> Result<String> {
    let [a, b] = run.inputs.as_slice() else {
        return Err(Error::Config("analyze needs exactly two quote files".into()));
    };
    let resample = Resample {
        dt: run.settings.parse("analyze.dt")?,
        max_gap: run.settings.parse("analyze.max_gap")?,
        end_us: None,
        skip_weekends: true,
    };
    let mode: CiMode = run.settings.parse("analyze.ci_mode")?;
    let (p1, p2) = PriceSeries::align(&quote_series(a, &resample)?, &quote_series(b, &resample)?)?;
    let curve = correlation_curve(&p1, &p2, &run.h_grid()?, mode)?;
    curve.write_csv(&run.out)?;
    let mut extra = vec![("grid_points".into(), p1.len().to_string())];
    if mode == CiMode::Overlapping {
        extra.push(("warning".into(), "overlapping n_effective; intervals are too narrow".into()));
    }
    write_sidecar(run, &extra)?;
    Ok(format!("wrote {} rows to {}", curve.rows().len(), run.out.display()))
}

/// Inner join of curve files on `h_seconds`, one `rho` column per input.
pub fn cmd_compare(run: &RunConfig) -> Result<String> {
    if run.inputs.len() < 2 {
        return Err(Error::Config("compare needs at least two curve files".into()));
    }
    let mut names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<(f64, String)>> = Vec::new();
    for path in &run.inputs {
        let t = Table::read(path)?;
        let (Some(hc), Some(rc)) = (t.column("h_seconds"), t.column("rho")) else {
            return Err(Error::Parse {
                path: path.clone(),
                line: 1,
                message: "curve files need `h_seconds` and `rho` columns".into(),
            });
        };
        let mut col = Vec::with_capacity(t.rows.len());
        for (i, row) in t.rows.iter().enumerate() {
            let h: f64 = row[hc].parse().map_err(|_| Error::Parse {
                path: path.clone(),
                line: i as u64 + 2,
                message: format!("bad h_seconds `{}`", row[hc]),
            })?;
            col.push((h, row[rc].clone()));
        }
        let stem = path.file_stem().map_or("curve".into(), |s| s.to_string_lossy().into_owned());
        let mut name = stem.clone();
        let mut k = 2;
        while names.contains(&name) {
            name = format!("{stem}_{k}");
            k += 1;
        }
        names.push(name);
        columns.push(col);
    }

    let mut header = vec!["h_seconds".to_string()];
    header.extend(names);
    let mut t = Table::new(header);
    for (h, first) in &columns[0] {
        let others: Option<Vec<&String>> = columns[1..]
            .iter()
            .map(|c| c.iter().find(|(h2, _)| h2 == h).map(|(_, v)| v))
            .collect();
        if let Some(others) = others {
            let mut row = vec![fmt_sig(*h), first.clone()];
            row.extend(others.into_iter().cloned());
            t.push(row);
        }
    }
    if t.rows.is_empty() {
        return Err(Error::Degenerate("curve grids do not overlap".into()));
    }
    t.write(&run.out)?;
    write_sidecar(run, &[])?;
    Ok(format!("joined {} rows into {}", t.rows.len(), run.out.display()))
}
