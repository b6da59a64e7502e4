//! Flat `key = value` configuration.
//!
//! One setting per line, `#` starts a comment, keys are module-prefixed
//! (`gaussian.theta`, `abm.asset2.impact`, `run.seed`). Command-line flags
//! map one-to-one onto keys and override file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::abm::{AbmConfig, AssetParams};
use crate::analysis::CiMode;
use crate::error::{Error, Result};
use crate::gaussian::GaussianModelParams;
use crate::table::fmt_sig;

/// Every key the driver understands, with its default.
pub fn defaults() -> BTreeMap<String, String> {
    let mut kv = BTreeMap::new();
    let mut set = |k: &str, v: String| {
        kv.insert(k.to_string(), v);
    };
    let g = GaussianModelParams::fitted();
    set("gaussian.lambda", fmt_sig(g.lambda()));
    set("gaussian.sigma", fmt_sig(g.sigma()));
    set("gaussian.theta", fmt_sig(g.theta()));
    set("gaussian.xi", fmt_sig(g.xi()));
    set("gaussian.epsilon", fmt_sig(g.epsilon()));
    set("gaussian.tau", fmt_sig(g.tau()));
    set("mc.dt", "1".into());
    set("mc.n_steps", "1000000".into());
    set("mc.batches", "50".into());

    let abm = AbmConfig::default();
    for (i, a) in abm.assets.iter().enumerate() {
        let p = format!("abm.asset{}.", i + 1);
        set(&format!("{p}tick_size"), fmt_sig(a.tick_size));
        set(&format!("{p}base_intensity"), fmt_sig(a.base_intensity));
        set(&format!("{p}spread_decay"), fmt_sig(a.spread_decay));
        set(&format!("{p}impact"), fmt_sig(a.impact));
        set(&format!("{p}noise_vol"), fmt_sig(a.noise_vol));
        set(&format!("{p}risk_aversion"), fmt_sig(a.risk_aversion));
        set(&format!("{p}noise_trade_size"), fmt_sig(a.noise_trade_size));
        set(&format!("{p}initial_mid"), fmt_sig(a.initial_mid));
    }
    set("abm.momentum.enabled", abm.momentum.enabled.to_string());
    set("abm.momentum.window", fmt_sig(abm.momentum.window));
    for i in 0..2 {
        set(&format!("abm.momentum.trade_size{}", i + 1), fmt_sig(abm.momentum.trade_size[i]));
        set(&format!("abm.momentum.max_position{}", i + 1), fmt_sig(abm.momentum.max_position[i]));
    }
    set("abm.dt", fmt_sig(abm.dt));
    set("abm.n_steps", abm.n_steps.to_string());
    set("abm.quote_horizon", fmt_sig(abm.quote_horizon));
    set("abm.replicas", "1".into());

    set("analyze.dt", "1".into());
    set("analyze.max_gap", "600".into());
    set("analyze.ci_mode", CiMode::default().to_string());

    set("run.seed", "0".into());
    kv
}

/// Parses a configuration file body.
pub fn parse_kv(text: &str, origin: &Path) -> Result<BTreeMap<String, String>> {
    let mut kv = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: origin.into(),
                line: n as u64 + 1,
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(kv)
}

pub fn read_kv(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_kv(&text, path)
}

/// Effective settings after layering defaults, file, and flags.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Defaults, then `file` entries, then `overrides` in order. Unknown keys are rejected.
    pub fn resolve(
        file: Option<&Path>,
        overrides: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut values = defaults();
        let known = values.clone();
        let mut apply = |k: String, v: String| -> Result<()> {
            if !known.contains_key(&k) && k != "gaussian.nu" && k != "run.h_grid" {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
            // ν and ξ are two spellings of the same parameter; the later one wins.
            match k.as_str() {
                "gaussian.nu" => {
                    values.remove("gaussian.xi");
                }
                "gaussian.xi" => {
                    values.remove("gaussian.nu");
                }
                _ => {}
            }
            values.insert(k, v);
            Ok(())
        };
        if let Some(path) = file {
            for (k, v) in read_kv(path)? {
                apply(k, v)?;
            }
        }
        for (k, v) in overrides {
            apply(k, v)?;
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{raw}`")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Keys under `prefix`, rendered as `key=value` lines.
    pub fn render(&self, prefixes: &[&str]) -> String {
        self.iter()
            .filter(|(k, _)| prefixes.iter().any(|p| k.starts_with(p)))
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn gaussian(&self) -> Result<GaussianModelParams> {
        let lambda: f64 = self.parse("gaussian.lambda")?;
        let sigma: f64 = self.parse("gaussian.sigma")?;
        let nu = match self.get("gaussian.nu") {
            Some(_) => self.parse("gaussian.nu")?,
            None => {
                let xi: f64 = self.parse("gaussian.xi")?;
                if !(xi >= 0.0) {
                    return Err(Error::invalid("xi", "must be >= 0", xi));
                }
                (xi * sigma * sigma / lambda).sqrt()
            }
        };
        GaussianModelParams::new(
            lambda,
            sigma,
            self.parse("gaussian.theta")?,
            nu,
            self.parse("gaussian.epsilon")?,
            self.parse("gaussian.tau")?,
        )
    }

    pub fn abm(&self) -> Result<AbmConfig> {
        let mut cfg = AbmConfig::default();
        for (i, a) in cfg.assets.iter_mut().enumerate() {
            let p = format!("abm.asset{}.", i + 1);
            let f = |name: &str| self.parse::<f64>(&format!("{p}{name}"));
            *a = AssetParams {
                tick_size: f("tick_size")?,
                base_intensity: f("base_intensity")?,
                spread_decay: f("spread_decay")?,
                impact: f("impact")?,
                noise_vol: f("noise_vol")?,
                risk_aversion: f("risk_aversion")?,
                noise_trade_size: f("noise_trade_size")?,
                initial_mid: f("initial_mid")?,
            };
        }
        cfg.momentum.enabled = self.parse("abm.momentum.enabled")?;
        cfg.momentum.window = self.parse("abm.momentum.window")?;
        for i in 0..2 {
            cfg.momentum.trade_size[i] = self.parse(&format!("abm.momentum.trade_size{}", i + 1))?;
            cfg.momentum.max_position[i] = self.parse(&format!("abm.momentum.max_position{}", i + 1))?;
        }
        cfg.dt = self.parse("abm.dt")?;
        cfg.n_steps = self.parse("abm.n_steps")?;
        cfg.quote_horizon = self.parse("abm.quote_horizon")?;
        cfg.seed = self.parse("run.seed")?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `start:stop:step` (inclusive of `stop`) or a comma-separated list.
pub fn parse_h_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad horizon grid `{spec}` (start:stop:step or h1,h2,...)"));
    let grid: Vec<f64> = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0 && start > 0.0 && stop >= start) {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    crate::analysis::validate_grid(&grid)?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_h_grid("1:5:1").unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(parse_h_grid("0.5:1.5:0.5").unwrap(), vec![0.5, 1.0, 1.5]);
        assert_eq!(parse_h_grid("120").unwrap(), vec![120.0]);
        assert_eq!(parse_h_grid("1, 5,66").unwrap(), vec![1.0, 5.0, 66.0]);
        assert!(parse_h_grid("0:5:1").is_err());
        assert!(parse_h_grid("5:1:1").is_err());
        assert!(parse_h_grid("3,2").is_err());
        assert!(parse_h_grid("a:b").is_err());
    }

    #[test]
    fn kv_parsing() {
        let kv = parse_kv("# comment\n gaussian.theta = 0 # off\n\nrun.seed=7\n", Path::new("x")).unwrap();
        assert_eq!(kv["gaussian.theta"], "0");
        assert_eq!(kv["run.seed"], "7");
        assert!(matches!(parse_kv("oops\n", Path::new("x")), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn defaults_reproduce_fitted_sets() {
        let s = Settings::resolve(None, []).unwrap();
        let g = s.gaussian().unwrap();
        let f = GaussianModelParams::fitted();
        assert!((g.nu() - f.nu()).abs() < 1e-12 && g.tau() == f.tau() && g.epsilon() == f.epsilon());
        assert_eq!(s.abm().unwrap(), AbmConfig::default());
    }

    #[test]
    fn overrides_win_and_unknown_keys_fail() {
        let s = Settings::resolve(None, [("gaussian.nu".to_string(), "0.5".to_string())]).unwrap();
        assert_eq!(s.gaussian().unwrap().nu(), 0.5);
        assert!(s.get("gaussian.xi").is_none());
        assert!(Settings::resolve(None, [("gaussian.bogus".to_string(), "1".to_string())]).is_err());
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "gaussian.theta = 0.1\ngaussian.tau = 30\n").unwrap();
        let s = Settings::resolve(Some(&path), [("gaussian.tau".into(), "40".into())]).unwrap();
        let g = s.gaussian().unwrap();
        assert_eq!((g.theta(), g.tau()), (0.1, 40.0));
    }
}
