//! The three-dimensional Aharonov–Bohm expansion: channel reduction over
//! `s = (m, p)`, the eigenfunctions 𝒲^φ_θ, the measure M^φ_θ assembled as
//! (sum over m) × (Gauss rule in p) × (per-channel measure), and the
//! diagonal action of H^φ_θ.

mod fields;
mod forward;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{atom_weight, bound_state_energy, ExtensionParams, Theta};
use crate::quadrature::GaussLegendre;
use crate::transform1d::kernel;

pub use fields::{BlobField, CylField, HamiltonianField, SeparableField, SumField, TransformedField};
pub use forward::{
    apply_h, field_norm_sqr, full_forward, radial_reduce, reduce_channels, symmetry_defect, ChannelCoefficients,
    Forward3d, ModeCoefficients, ReductionConfig,
};

/// θ on one A^φ channel: a constant, or piecewise constant in `p`.
///
/// A table with breakpoints `b₁ < … < b_k` and angles `θ₀ … θ_k` takes
/// `θ_i` on `b_i ≤ p < b_{i+1}` (with `b₀ = −∞`, `b_{k+1} = ∞`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChannelTheta {
    Constant(Theta),
    Table { breakpoints: Vec<f64>, thetas: Vec<Theta> },
}

impl ChannelTheta {
    pub fn at(&self, p: f64) -> Theta {
        match self {
            ChannelTheta::Constant(t) => *t,
            ChannelTheta::Table { breakpoints, thetas } => thetas[breakpoints.partition_point(|&b| b <= p)],
        }
    }

    /// Index of the constant piece containing `p`.
    pub fn piece(&self, p: f64) -> usize {
        match self {
            ChannelTheta::Constant(_) => 0,
            ChannelTheta::Table { breakpoints, .. } => breakpoints.partition_point(|&b| b <= p),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ChannelTheta::Constant(t) if t.is_finite() => Ok(()),
            ChannelTheta::Constant(t) => Err(Error::Config(format!("theta {t} is not finite"))),
            ChannelTheta::Table { breakpoints, thetas } => {
                if thetas.len() != breakpoints.len() + 1 {
                    return Err(Error::Config(format!(
                        "a theta table with {} breakpoints needs {} angles, got {}",
                        breakpoints.len(),
                        breakpoints.len() + 1,
                        thetas.len()
                    )));
                }
                if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("theta breakpoints must be finite and increasing".into()));
                }
                if thetas.iter().any(|t| !t.is_finite()) {
                    return Err(Error::Config("theta table contains a non-finite angle".into()));
                }
                Ok(())
            }
        }
    }

    fn shifted(&self, n: i64) -> Self {
        match self {
            ChannelTheta::Constant(t) => ChannelTheta::Constant(t.shifted(n)),
            ChannelTheta::Table { breakpoints, thetas } => ChannelTheta::Table {
                breakpoints: breakpoints.clone(),
                thetas: thetas.iter().map(|t| t.shifted(n)).collect(),
            },
        }
    }
}

/// The channels `m` with `|m + φ| < 1`: one for integer φ, two otherwise.
pub fn a_phi_channels(phi: f64) -> Vec<i64> {
    let base = (-phi).floor() as i64;
    (base - 1..=base + 1)
        .filter(|&m| (m as f64 + phi).abs() < 1.0)
        .collect()
}

/// Flux φ and the extension angle θ on every A^φ channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSpec {
    phi: f64,
    entries: BTreeMap<i64, ChannelTheta>,
}

impl ThetaSpec {
    /// Validates that entries exist exactly for the A^φ channels.
    pub fn new(phi: f64, entries: BTreeMap<i64, ChannelTheta>) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::Config(format!("flux phi must be finite, got {phi}")));
        }
        let expected = a_phi_channels(phi);
        let given: Vec<i64> = entries.keys().copied().collect();
        if given != expected {
            return Err(Error::Config(format!(
                "phi = {phi} needs theta for channels {expected:?}, got {given:?}"
            )));
        }
        for entry in entries.values() {
            entry.validate()?;
        }
        Ok(ThetaSpec { phi, entries })
    }

    /// The same constant θ on every A^φ channel.
    pub fn constant(phi: f64, theta: impl Into<Theta>) -> Result<Self> {
        let theta = theta.into();
        let entries = a_phi_channels(phi)
            .into_iter()
            .map(|m| (m, ChannelTheta::Constant(theta)))
            .collect();
        Self::new(phi, entries)
    }

    /// θ = ϑ_{m+φ} on every A^φ channel: the atom-free extensions with
    /// kernel u^{m+φ}.
    pub fn theta_kappa(phi: f64) -> Result<Self> {
        let entries = a_phi_channels(phi)
            .into_iter()
            .map(|m| (m, ChannelTheta::Constant(Theta::new(0.5 * PI * (m as f64 + phi)))))
            .collect();
        Self::new(phi, entries)
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn entries(&self) -> &BTreeMap<i64, ChannelTheta> {
        &self.entries
    }

    /// κ = m + φ.
    pub fn kappa(&self, m: i64) -> f64 {
        m as f64 + self.phi
    }

    pub fn theta(&self, m: i64, p: f64) -> Result<Theta> {
        self.entries
            .get(&m)
            .map(|e| e.at(p))
            .ok_or_else(|| Error::Config(format!("no theta for channel m = {m} at phi = {}", self.phi)))
    }

    /// The radial problem of channel `(m, p)`.
    pub fn params(&self, m: i64, p: f64) -> Result<ExtensionParams> {
        let kappa = self.kappa(m);
        if kappa.abs() >= 1.0 {
            ExtensionParams::free(kappa)
        } else {
            ExtensionParams::new(kappa, self.theta(m, p)?)
        }
    }

    /// Every angle shifted by `n` half turns.
    pub fn shifted(&self, n: i64) -> Self {
        ThetaSpec {
            phi: self.phi,
            entries: self.entries.iter().map(|(m, e)| (*m, e.shifted(n))).collect(),
        }
    }
}

/// One channel of the truncated set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelInfo {
    pub m: i64,
    pub kappa: f64,
    pub in_a_phi: bool,
}

/// Channels `−M_max ≤ m ≤ M_max` with κ = m + φ and the A^φ flag.
pub fn channel_set(phi: f64, m_max: u32) -> Vec<ChannelInfo> {
    let m_max = i64::from(m_max);
    (-m_max..=m_max)
        .map(|m| {
            let kappa = m as f64 + phi;
            ChannelInfo {
                m,
                kappa,
                in_a_phi: kappa.abs() < 1.0,
            }
        })
        .collect()
}

/// `s = (m, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelIndex {
    pub m: i64,
    pub p: f64,
}

impl ChannelIndex {
    pub fn kappa(self, phi: f64) -> f64 {
        self.m as f64 + phi
    }
}

/// Truncated mode set: `|m| ≤ m_max` and a Gauss rule on `[−P_max, P_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    pub m_max: u32,
    pub p_max: f64,
    pub p_nodes: Vec<f64>,
    pub p_weights: Vec<f64>,
}

impl ModeGrid {
    pub fn gauss(m_max: u32, p_max: f64, p_count: usize) -> Result<Self> {
        if !(p_max > 0.0 && p_max.is_finite()) || p_count == 0 {
            return Err(Error::InvalidInput(format!(
                "mode grid needs P_max > 0 and at least one p node, got {p_max} and {p_count}"
            )));
        }
        let (p_nodes, p_weights) = GaussLegendre::new(p_count).on_interval(-p_max, p_max);
        Ok(ModeGrid {
            m_max,
            p_max,
            p_nodes,
            p_weights,
        })
    }

    pub fn m_values(&self) -> Vec<i64> {
        let m = i64::from(self.m_max);
        (-m..=m).collect()
    }
}

/// 𝒲^φ_θ(s, E | x) = e^{ipx₃} ((x₁ + ix₂)/r)^m 𝒥(s, E | r) / (2π√r).
pub fn eigenfunction_3d(spec: &ThetaSpec, channel: ChannelIndex, energy: f64, x: [f64; 3]) -> Result<Complex64> {
    let r = x[0].hypot(x[1]);
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    let params = spec.params(channel.m, channel.p)?;
    let radial = kernel(params, energy, r)?.value;
    let angular = Complex64::new(x[0] / r, x[1] / r).powi(channel.m as i32);
    let axial = Complex64::from_polar(1.0, channel.p * x[2]);
    Ok(axial * angular * (radial / (2.0 * PI * r.sqrt())))
}

/// One bound state of a channel (or of one constant piece of it).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStateRow {
    pub m: i64,
    pub kappa: f64,
    pub energy: f64,
    pub weight: f64,
    pub theta: Theta,
}

/// Bound states of the A^φ channels with `|m| ≤ m_max`, one row per
/// constant θ piece that carries an atom.
pub fn bound_state_table(spec: &ThetaSpec, m_max: u32) -> Result<Vec<BoundStateRow>> {
    let mut rows = Vec::new();
    for (&m, entry) in &spec.entries {
        if m.unsigned_abs() > u64::from(m_max) {
            continue;
        }
        let thetas = match entry {
            ChannelTheta::Constant(t) => vec![*t],
            ChannelTheta::Table { thetas, .. } => thetas.clone(),
        };
        let kappa = spec.kappa(m);
        for theta in thetas {
            let params = ExtensionParams::new(kappa, theta)?;
            if let (Some(energy), Some(weight)) = (bound_state_energy(params)?, atom_weight(params)?) {
                rows.push(BoundStateRow {
                    m,
                    kappa,
                    energy,
                    weight,
                    theta,
                });
            }
        }
    }
    Ok(rows)
}

/// Writes the table as `m,kappa,E_b,weight,theta` rows.
pub fn write_bound_states_csv<W: Write>(rows: &[BoundStateRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "m,kappa,E_b,weight,theta")?;
    for row in rows {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e}",
            row.m,
            row.kappa,
            row.energy,
            row.weight,
            row.theta.value()
        )?;
    }
    Ok(())
}
