//! Spectral measures 𝒱_κ and 𝒱_{κ,ϑ}: an absolutely continuous density on
//! `E ≥ 0` plus at most one bound-state atom at `E < 0`, and the graded
//! Gauss–Legendre rule that discretizes them.

mod discretize;
mod theta;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ab3d::ThetaSpec;
use crate::error::{Error, Result};
use crate::special_fns::Order;

pub use discretize::{discretize, MeasureQuadrature, GRADING_LEVELS, PANEL_ORDER};
pub use theta::Theta;

/// ϑ_κ = πκ/2.
pub fn theta_kappa(kappa: f64) -> f64 {
    0.5 * PI * kappa
}

/// Order κ and extension angle ϑ of one radial problem. The angle is
/// ignored when `|κ| ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub kappa: f64,
    pub theta: Theta,
}

impl ExtensionParams {
    pub fn new(kappa: f64, theta: impl Into<Theta>) -> Result<Self> {
        let theta = theta.into();
        if !kappa.is_finite() {
            return Err(Error::InvalidInput(format!("kappa must be finite, got {kappa}")));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidInput(format!("theta must be finite, got {theta}")));
        }
        Ok(ExtensionParams { kappa, theta })
    }

    /// Parameters for `|κ| ≥ 1`, where no angle is needed.
    pub fn free(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0)
    }

    pub fn order(self) -> Order {
        Order::new(self.kappa).expect("kappa validated on construction")
    }

    pub fn is_extension_family(self) -> bool {
        self.kappa.abs() < 1.0
    }

    /// The same extension with ϑ shifted by `n` half turns.
    pub fn shifted(self, n: i64) -> Self {
        ExtensionParams {
            theta: self.theta.shifted(n),
            ..self
        }
    }

    fn require_extension(self) -> Result<()> {
        if self.is_extension_family() {
            Ok(())
        } else {
            Err(Error::NotExtensionOrder(self.kappa))
        }
    }
}

/// A bound-state atom of a spectral measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub energy: f64,
    pub weight: f64,
}

/// True iff ϑ mod π lies strictly inside `(|ϑ_κ|, π − |ϑ_κ|)`.
pub fn has_bound_state(params: ExtensionParams) -> Result<bool> {
    params.require_extension()?;
    let t = params.theta.reduced();
    let x = theta_kappa(params.kappa).abs();
    Ok(t > x && t < PI - x)
}

/// E_{κ,ϑ} = −(sin(ϑ+ϑ_κ)/sin(ϑ−ϑ_κ))^{1/κ}, or −e^{π cot ϑ} at κ = 0.
pub fn bound_state_energy(params: ExtensionParams) -> Result<Option<f64>> {
    if !has_bound_state(params)? {
        return Ok(None);
    }
    let t = params.theta.reduced();
    let cot = t.cos() / t.sin();
    let kappa = params.kappa;
    let log_abs = if kappa == 0.0 {
        PI * cot
    } else {
        // ln(A/B) with A/B = (1 + τ)/(1 − τ), τ = cot ϑ tan ϑ_κ ∈ (−1, 1).
        2.0 * (cot * theta_kappa(kappa).tan()).atanh() / kappa
    };
    Ok(Some(-log_abs.exp()))
}

/// Mass of the bound-state atom, when there is one.
pub fn atom_weight(params: ExtensionParams) -> Result<Option<f64>> {
    let Some(energy) = bound_state_energy(params)? else {
        return Ok(None);
    };
    let t = params.theta.reduced();
    let kappa = params.kappa;
    let sin_t = t.sin();
    let weight = if kappa == 0.0 {
        PI * PI * energy.abs() / (2.0 * sin_t * sin_t)
    } else {
        let sin_x = theta_kappa(kappa).sin();
        // sin(ϑ+ϑ_κ) sin(ϑ−ϑ_κ) = sin²ϑ − sin²ϑ_κ
        let ab = (sin_t - sin_x) * (sin_t + sin_x);
        PI * (PI * kappa).sin() * energy.abs() / (2.0 * kappa * ab)
    };
    Ok(Some(weight))
}

/// Density of the absolutely continuous part at `E`.
///
/// Returns `+∞` at `E = 0` when the density is singular there.
pub fn ac_density(params: ExtensionParams, energy: f64) -> f64 {
    if energy.is_nan() {
        return f64::NAN;
    }
    if energy < 0.0 {
        return 0.0;
    }
    let kappa = params.kappa;
    if !params.is_extension_family() {
        return 0.5 * energy.powf(kappa.abs());
    }
    let t = params.theta.reduced();
    let (sin_t, cos_t) = t.sin_cos();
    if energy == 0.0 {
        return density_at_origin(kappa, t);
    }
    let log_e = energy.ln();
    if kappa == 0.0 {
        let a = cos_t - log_e * sin_t / PI;
        return 0.5 / (a * a + sin_t * sin_t);
    }
    // Equivalent to ½ sin²πκ / (E^{−κ}A² − 2 cos πκ·AB + E^κ B²) with
    // A = sin(ϑ+ϑ_κ), B = sin(ϑ−ϑ_κ), free of cancellation as κ → 0.
    let (sin_x, cos_x) = theta_kappa(kappa).sin_cos();
    let h = 0.5 * kappa * log_e;
    let a = cos_t * h.cosh() - sin_t * cos_x * (h.sinh() / sin_x);
    let ab = (sin_t - sin_x) * (sin_t + sin_x);
    0.5 * cos_x * cos_x / (a * a + ab)
}

fn density_at_origin(kappa: f64, t: f64) -> f64 {
    const DEGENERATE: f64 = 1e-12;
    if kappa == 0.0 {
        return if t == 0.0 { 0.5 } else { 0.0 };
    }
    let x = theta_kappa(kappa);
    // The E^{−|κ|} term dominates unless its coefficient vanishes.
    let dominant = if kappa > 0.0 { (t + x).sin() } else { (t - x).sin() };
    if dominant.abs() < DEGENERATE {
        f64::INFINITY
    } else {
        0.0
    }
}

/// 𝒱_κ (no atom) or 𝒱_{κ,ϑ} (density plus optional atom).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub params: ExtensionParams,
    pub atoms: Vec<Atom>,
}

impl SpectralMeasure {
    pub fn density(&self, energy: f64) -> f64 {
        ac_density(self.params, energy)
    }

    /// The same density with its atoms removed.
    pub fn without_atoms(&self) -> Self {
        SpectralMeasure {
            params: self.params,
            atoms: Vec::new(),
        }
    }

    /// Writes `E,density` rows at the given energies, preceded by one
    /// `# atom E weight` line per atom.
    pub fn write_csv<W: Write>(&self, energies: &[f64], mut out: W) -> std::io::Result<()> {
        for atom in &self.atoms {
            writeln!(out, "# atom {:e} {:e}", atom.energy, atom.weight)?;
        }
        writeln!(out, "E,density")?;
        for &e in energies {
            writeln!(out, "{:e},{:e}", e, self.density(e))?;
        }
        Ok(())
    }
}

/// Assembles the measure of an extension: density plus atom for `|κ| < 1`,
/// density ½E^{|κ|} only for `|κ| ≥ 1`.
pub fn spectral_measure(params: ExtensionParams) -> SpectralMeasure {
    let mut atoms = Vec::new();
    if params.is_extension_family() {
        if let (Ok(Some(energy)), Ok(Some(weight))) = (bound_state_energy(params), atom_weight(params)) {
            atoms.push(Atom { energy, weight });
        }
    }
    SpectralMeasure { params, atoms }
}

/// μ^φ_θ(m, p): 𝒱_{|m+φ|} off A^φ, 𝒱_{m+φ, θ(m,p)} on it.
pub fn channel_measure(phi: f64, theta_spec: &ThetaSpec, m: i64, p: f64) -> Result<SpectralMeasure> {
    if phi != theta_spec.phi() {
        return Err(Error::Config(format!(
            "theta specification is for phi = {}, not {phi}",
            theta_spec.phi()
        )));
    }
    Ok(spectral_measure(theta_spec.params(m, p)?))
}
