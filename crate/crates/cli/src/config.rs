//! The TOML run configuration and the command-line value syntaxes.

use std::collections::BTreeMap;
use std::path::Path;

use ab_spectral::ab3d::{ChannelTheta, ThetaSpec};
use ab_spectral::measures::{theta_kappa, Theta};
use ab_spectral::verify::SuiteConfig;
use serde::Deserialize;

use crate::CliError;

/// Contents of a `--config` file. Every section is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub phi: Option<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub channel: Vec<ChannelEntry>,
    pub verify: Option<SuiteConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub radial_nodes: usize,
    pub node_budget: usize,
    /// `None` picks E_max by doubling (1D) or uses the series cap (3D).
    pub e_max: Option<f64>,
    pub m_max: u32,
    pub p_max: f64,
    pub p_nodes: usize,
    pub angular_nodes: usize,
    pub axial_nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            radial_nodes: 128,
            node_budget: 512,
            e_max: None,
            m_max: 3,
            p_max: 8.0,
            p_nodes: 32,
            angular_nodes: 128,
            axial_nodes: 128,
        }
    }
}

/// One `[[channel]]` table: either `theta` or `breakpoints` plus `thetas`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    pub m: i64,
    pub theta: Option<f64>,
    pub breakpoints: Option<Vec<f64>>,
    pub thetas: Option<Vec<f64>>,
}

impl ChannelEntry {
    fn to_theta(&self) -> Result<ChannelTheta, CliError> {
        match (&self.theta, &self.breakpoints, &self.thetas) {
            (Some(t), None, None) => Ok(ChannelTheta::Constant(Theta::new(*t))),
            (None, Some(b), Some(t)) => Ok(ChannelTheta::Table {
                breakpoints: b.clone(),
                thetas: t.iter().map(|&x| Theta::new(x)).collect(),
            }),
            _ => Err(CliError::Usage(format!(
                "channel m = {} needs either theta or breakpoints and thetas",
                self.m
            ))),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that does not depend on command-line overrides.
    fn validate(&self) -> Result<(), CliError> {
        if !self.channel.is_empty() {
            self.channel_spec(
                self.phi
                    .ok_or_else(|| CliError::Usage("[[channel]] entries need a top-level phi".into()))?,
            )?;
        }
        if let Some(v) = &self.verify {
            v.validate()?;
        }
        let g = &self.grid;
        if g.e_max.is_some_and(|e| !(e > 0.0 && e.is_finite())) || !(g.p_max > 0.0 && g.p_max.is_finite()) {
            return Err(CliError::Usage(
                "grid e_max and p_max must be positive and finite".into(),
            ));
        }
        if g.p_nodes == 0 || g.angular_nodes == 0 || g.axial_nodes == 0 || g.node_budget < 16 {
            return Err(CliError::Usage("grid sizes are too small".into()));
        }
        Ok(())
    }

    fn channel_spec(&self, phi: f64) -> Result<ThetaSpec, CliError> {
        let mut entries = BTreeMap::new();
        for entry in &self.channel {
            if entries.insert(entry.m, entry.to_theta()?).is_some() {
                return Err(CliError::Usage(format!("channel m = {} is given twice", entry.m)));
            }
        }
        Ok(ThetaSpec::new(phi, entries)?)
    }

    /// The θ specification from `[[channel]]` entries, or a constant θ
    /// from the command line. Command-line values take precedence.
    pub fn theta_spec(&self, phi: Option<f64>, theta: Option<ThetaArg>) -> Result<ThetaSpec, CliError> {
        let phi = phi
            .or(self.phi)
            .ok_or_else(|| CliError::Usage("flux is missing: pass --phi or set phi in the config".into()))?;
        match theta {
            Some(ThetaArg::Value(t)) => Ok(ThetaSpec::constant(phi, t)?),
            Some(ThetaArg::Kappa) => Ok(ThetaSpec::theta_kappa(phi)?),
            None if !self.channel.is_empty() => self.channel_spec(phi),
            None => Err(CliError::Usage(
                "extension angles are missing: pass --theta or add [[channel]] entries".into(),
            )),
        }
    }
}

/// An extension angle: a number, or `kappa` for the atom-free angle πκ/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaArg {
    Value(f64),
    Kappa,
}

impl ThetaArg {
    pub fn resolve(self, kappa: f64) -> f64 {
        match self {
            ThetaArg::Value(t) => t,
            ThetaArg::Kappa => theta_kappa(kappa),
        }
    }
}

pub fn parse_theta(s: &str) -> Result<ThetaArg, String> {
    if s == "kappa" {
        return Ok(ThetaArg::Kappa);
    }
    parse_finite(s).map(ThetaArg::Value)
}

/// Locale-independent: Rust's float parser only accepts '.' as decimal point.
pub fn parse_finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("{s:?} is not a finite number")),
    }
}

/// `start:stop:count`, both ends included.
#[derive(Clone, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(format!("{s:?} is not of the form start:stop:count"));
    };
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| format!("bad count {count:?} in {s:?}"))?;
    let (start, stop) = (parse_finite(start)?, parse_finite(stop)?);
    if count == 0 || (count > 1 && stop <= start) {
        return Err(format!("{s:?} needs start < stop and a positive count"));
    }
    Ok(Range { start, stop, count })
}

/// Colon-separated finite numbers, exactly `n` of them.
pub fn parse_numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(':')
        .map(parse_finite)
        .collect::<Result<_, _>>()
        .map_err(CliError::Usage)?;
    if v.len() != n {
        return Err(CliError::Usage(format!(
            "{what} expects {n} colon-separated numbers, got {s:?}"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r = parse_range("0.5:1:3").unwrap();
        assert_eq!(r.points(), vec![0.5, 0.75, 1.0]);
        assert_eq!(parse_range("2:2:1").unwrap().points(), vec![2.0]);
        assert!(parse_range("1:0:4").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0,5:1:3").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn thetas() {
        assert_eq!(parse_theta("kappa").unwrap(), ThetaArg::Kappa);
        assert_eq!(parse_theta("1.5").unwrap(), ThetaArg::Value(1.5));
        assert!(parse_theta("nan").is_err());
    }

    #[test]
    fn channel_tables() {
        let cfg: RunConfig = toml::from_str(
            "phi = 0.5\n[[channel]]\nm = -1\ntheta = 1.0\n[[channel]]\nm = 0\nbreakpoints = [0.0]\nthetas = [1.0, 2.0]\n",
        )
        .unwrap();
        cfg.validate().unwrap();
        let spec = cfg.theta_spec(None, None).unwrap();
        assert_eq!(spec.theta(0, 1.0).unwrap().value(), 2.0);
        let missing: RunConfig = toml::from_str("phi = 0.5\n[[channel]]\nm = 0\ntheta = 1.0\n").unwrap();
        assert!(missing.validate().is_err());
    }
}
