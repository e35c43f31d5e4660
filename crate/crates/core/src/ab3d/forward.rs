use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fields::{CylField, TransformedField};
use super::{ChannelIndex, ModeGrid, ThetaSpec};
use crate::error::{Error, Result};
use crate::measures::{discretize, spectral_measure, ExtensionParams};
use crate::quadrature::{periodic_trapezoid, GaussLegendre};
use crate::transform1d::{RadialFunction, RadialGrid, TransformCoefficients, TransformPlan};

/// Quadrature sizes for the channel reduction and the 3D norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    /// Gauss–Legendre nodes in `r` on the radial support.
    pub radial_nodes: usize,
    /// Trapezoid nodes in the angle.
    pub angular_nodes: usize,
    /// Gauss–Legendre nodes in `x₃` on the axial support.
    pub axial_nodes: usize,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            radial_nodes: 128,
            angular_nodes: 128,
            axial_nodes: 128,
        }
    }
}

/// Φ̃(m, p | r) = (√r/2π) ∫dx₃ ∫dφ Φ e^{−ipx₃ − imφ} for every `m` and `p`,
/// indexed `[m][p]`.
pub fn reduce_channels(
    field: &dyn CylField,
    m_values: &[i64],
    p_nodes: &[f64],
    grid: &RadialGrid,
    cfg: &ReductionConfig,
) -> Result<Vec<Vec<RadialFunction>>> {
    if cfg.angular_nodes == 0 || cfg.axial_nodes == 0 {
        return Err(Error::InvalidInput("reduction needs angular and axial nodes".into()));
    }
    let (angles, wa) = periodic_trapezoid(cfg.angular_nodes);
    let (z_lo, z_hi) = field.axial_support();
    let (zs, wz) = GaussLegendre::new(cfg.axial_nodes).on_interval(z_lo, z_hi);
    let angle_phase: Vec<Vec<Complex64>> = m_values
        .iter()
        .map(|&m| {
            angles
                .iter()
                .map(|&a| Complex64::from_polar(wa, -(m as f64) * a))
                .collect()
        })
        .collect();
    let axial_phase: Vec<Vec<Complex64>> = p_nodes
        .iter()
        .map(|&p| {
            zs.iter()
                .zip(&wz)
                .map(|(&z, &w)| Complex64::from_polar(w, -p * z))
                .collect()
        })
        .collect();

    // samples[j][m][p] for radius r_j.
    let samples: Vec<Vec<Vec<Complex64>>> = grid
        .r_nodes
        .par_iter()
        .map(|&r| {
            let mut fm = vec![vec![Complex64::new(0.0, 0.0); zs.len()]; m_values.len()];
            let mut ring = vec![Complex64::new(0.0, 0.0); angles.len()];
            for (k, &z) in zs.iter().enumerate() {
                for (slot, &a) in ring.iter_mut().zip(&angles) {
                    *slot = field.value(r, a, z);
                }
                for (row, phase) in fm.iter_mut().zip(&angle_phase) {
                    row[k] = ring.iter().zip(phase).map(|(v, e)| v * e).sum();
                }
            }
            let scale = r.sqrt() / (2.0 * PI);
            fm.iter()
                .map(|row| {
                    axial_phase
                        .iter()
                        .map(|phase| row.iter().zip(phase).map(|(v, e)| v * e).sum::<Complex64>() * scale)
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(m_values.len());
    for mi in 0..m_values.len() {
        let mut row = Vec::with_capacity(p_nodes.len());
        for pi in 0..p_nodes.len() {
            let values = samples.iter().map(|s| s[mi][pi]).collect();
            row.push(RadialFunction::new(grid.clone(), values)?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Φ̃(m, p | ·) on `grid` for a single channel.
pub fn radial_reduce(
    field: &dyn CylField,
    channel: ChannelIndex,
    grid: &RadialGrid,
    cfg: &ReductionConfig,
) -> Result<RadialFunction> {
    let mut rows = reduce_channels(field, &[channel.m], &[channel.p], grid, cfg)?;
    Ok(rows.remove(0).remove(0))
}

/// ∫|Φ|² d³x by tensor quadrature (Gauss in `r` and `x₃`, trapezoid in the
/// angle).
pub fn field_norm_sqr(field: &dyn CylField, cfg: &ReductionConfig) -> f64 {
    let (a, b) = field.radial_support();
    let (rs, wr) = GaussLegendre::new(cfg.radial_nodes).on_interval(a, b);
    let (angles, wa) = periodic_trapezoid(cfg.angular_nodes);
    let (z_lo, z_hi) = field.axial_support();
    let (zs, wz) = GaussLegendre::new(cfg.axial_nodes).on_interval(z_lo, z_hi);
    rs.par_iter()
        .zip(&wr)
        .map(|(&r, &w)| {
            let mut acc = 0.0;
            for (&z, &v) in zs.iter().zip(&wz) {
                let ring: f64 = angles.iter().map(|&t| field.value(r, t, z).norm_sqr()).sum();
                acc += v * ring;
            }
            w * r * wa * acc
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// Coefficients of one channel `(m, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelCoefficients {
    pub m: i64,
    pub p: f64,
    pub p_weight: f64,
    pub params: ExtensionParams,
    pub coeffs: TransformCoefficients,
}

/// Coefficients c(m, p, E) over a mode grid, ordered by `m` then `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeCoefficients {
    pub phi: f64,
    pub channels: Vec<ChannelCoefficients>,
}

impl ModeCoefficients {
    /// Σ_m Σ_p w_p ‖c(m, p)‖²_μ.
    pub fn norm_sqr(&self) -> f64 {
        self.channels.iter().map(|c| c.p_weight * c.coeffs.norm_sqr()).sum()
    }

    /// The contribution of each `m` to [`Self::norm_sqr`], in ascending `m`.
    pub fn channel_norms(&self) -> Vec<(i64, f64)> {
        let mut out: Vec<(i64, f64)> = Vec::new();
        for c in &self.channels {
            let v = c.p_weight * c.coeffs.norm_sqr();
            match out.last_mut() {
                Some((m, acc)) if *m == c.m => *acc += v,
                _ => out.push((c.m, v)),
            }
        }
        out
    }

    /// Squared distance in the same norm; both sets must share the layout.
    pub fn distance_sqr(&self, other: &Self) -> Result<f64> {
        if self.channels.len() != other.channels.len() {
            return Err(Error::InvalidInput(
                "coefficient sets have different channel layouts".into(),
            ));
        }
        self.channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| {
                if a.m != b.m || a.p != b.p {
                    return Err(Error::InvalidInput(
                        "coefficient sets have different channel layouts".into(),
                    ));
                }
                Ok(a.p_weight * a.coeffs.distance_sqr(&b.coeffs)?)
            })
            .sum()
    }

    /// Writes `# atom m p E_b weight re im` lines followed by `m,p,E,re,im`
    /// rows. Channels whose share of the norm is at most `min_share` are
    /// left out.
    pub fn write_csv<W: Write>(&self, min_share: f64, mut out: W) -> std::io::Result<()> {
        let total = self.norm_sqr();
        let keep = |c: &ChannelCoefficients| {
            let n: f64 = self
                .channels
                .iter()
                .filter(|d| d.m == c.m)
                .map(|d| d.p_weight * d.coeffs.norm_sqr())
                .sum();
            n > min_share * total
        };
        let kept: Vec<&ChannelCoefficients> = self.channels.iter().filter(|c| keep(c)).collect();
        for c in &kept {
            for (a, v) in c.coeffs.quad.atoms.iter().zip(&c.coeffs.atom_values) {
                writeln!(
                    out,
                    "# atom {} {:e} {:e} {:e} {:e} {:e}",
                    c.m, c.p, a.energy, a.weight, v.re, v.im
                )?;
            }
        }
        writeln!(out, "m,p,E,re,im")?;
        for c in &kept {
            for (e, v) in c.coeffs.quad.e_nodes.iter().zip(&c.coeffs.continuum_values) {
                writeln!(out, "{},{:e},{:e},{:e},{:e}", c.m, c.p, e, v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Multiplies every entry by 𝔣(m, p; E) = p² + E (atoms by p² + E_b).
pub fn apply_h(coeffs: &ModeCoefficients) -> ModeCoefficients {
    ModeCoefficients {
        phi: coeffs.phi,
        channels: coeffs
            .channels
            .iter()
            .map(|c| ChannelCoefficients {
                coeffs: c.coeffs.multiply_by_energy(c.p * c.p),
                ..c.clone()
            })
            .collect(),
    }
}

type PlanKey = (i64, u64, bool);

/// The forward map Φ ↦ c(m, p, E) for a fixed θ specification, radial grid
/// and per-channel quadrature. Transform plans are cached per channel and
/// constant θ piece, so repeated calls (other fields, other mode grids)
/// reuse the kernel matrices.
pub struct Forward3d {
    spec: ThetaSpec,
    grid: RadialGrid,
    support: (f64, f64),
    reduction: ReductionConfig,
    e_max: f64,
    node_budget: usize,
    drop_atoms: bool,
    plans: Mutex<HashMap<PlanKey, Arc<TransformPlan>>>,
}

impl Forward3d {
    /// `radial_support` must contain the radial support of every field
    /// passed to [`Forward3d::forward`].
    pub fn new(
        spec: ThetaSpec,
        radial_support: (f64, f64),
        reduction: ReductionConfig,
        e_max: f64,
        node_budget: usize,
    ) -> Result<Self> {
        let grid = RadialGrid::gauss_legendre(radial_support.0, radial_support.1, reduction.radial_nodes)?;
        Ok(Forward3d {
            spec,
            grid,
            support: radial_support,
            reduction,
            e_max,
            node_budget,
            drop_atoms: false,
            plans: Mutex::new(HashMap::new()),
        })
    }

    /// Removes the atoms from every channel measure (a negative control).
    pub fn drop_atoms(mut self, drop: bool) -> Self {
        self.drop_atoms = drop;
        self
    }

    pub fn spec(&self) -> &ThetaSpec {
        &self.spec
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn reduction(&self) -> &ReductionConfig {
        &self.reduction
    }

    fn plan(&self, params: ExtensionParams, m: i64) -> Result<Arc<TransformPlan>> {
        let key = if params.is_extension_family() {
            let (t, odd) = params.theta.canonical();
            (m, t.to_bits(), odd)
        } else {
            (m, 0, false)
        };
        if let Some(plan) = self.plans.lock().expect("plan cache poisoned").get(&key) {
            return Ok(plan.clone());
        }
        let mut measure = spectral_measure(params);
        if self.drop_atoms {
            measure = measure.without_atoms();
        }
        let quad = discretize(&measure, self.e_max, self.node_budget)?;
        let plan = Arc::new(TransformPlan::new(params, quad, self.grid.clone())?);
        self.plans
            .lock()
            .expect("plan cache poisoned")
            .insert(key, plan.clone());
        Ok(plan)
    }

    /// c(m, p, E) = U_{params(m,p)} Φ̃(m, p) for every mode of `modes`.
    pub fn forward(&self, field: &dyn CylField, modes: &ModeGrid) -> Result<ModeCoefficients> {
        let (a, b) = field.radial_support();
        let (lo, hi) = self.support;
        let slack = 1e-12 * (hi - lo);
        if a < lo - slack || b > hi + slack {
            return Err(Error::InvalidInput(format!(
                "field support [{a}, {b}] is not covered by the radial grid on [{lo}, {hi}]"
            )));
        }
        let m_values = modes.m_values();
        let reduced = reduce_channels(field, &m_values, &modes.p_nodes, &self.grid, &self.reduction)?;
        let mut channels = Vec::with_capacity(m_values.len() * modes.p_nodes.len());
        for (&m, row) in m_values.iter().zip(reduced) {
            for ((&p, &w), psi) in modes.p_nodes.iter().zip(&modes.p_weights).zip(row) {
                let params = self.spec.params(m, p)?;
                let coeffs = self.plan(params, m)?.forward(&psi)?;
                channels.push(ChannelCoefficients {
                    m,
                    p,
                    p_weight: w,
                    params,
                    coeffs,
                });
            }
        }
        Ok(ModeCoefficients {
            phi: self.spec.phi(),
            channels,
        })
    }
}

/// One-shot forward map; see [`Forward3d`] for the cached form.
pub fn full_forward(
    spec: &ThetaSpec,
    field: &dyn CylField,
    modes: &ModeGrid,
    reduction: ReductionConfig,
    e_max: f64,
    node_budget: usize,
) -> Result<ModeCoefficients> {
    Forward3d::new(spec.clone(), field.radial_support(), reduction, e_max, node_budget)?.forward(field, modes)
}

/// sup over modes, energies and atoms of
/// `|c_{Φ∘G⁻¹}(m,p,E) − e^{−imα−ipβ} c_Φ(m,p,E)|`.
pub fn symmetry_defect(
    engine: &Forward3d,
    field: Arc<dyn CylField>,
    alpha: f64,
    beta: f64,
    modes: &ModeGrid,
) -> Result<f64> {
    let base = engine.forward(field.as_ref(), modes)?;
    let moved = TransformedField {
        inner: field,
        alpha,
        beta,
    };
    let shifted = engine.forward(&moved, modes)?;
    let mut worst: f64 = 0.0;
    for (a, b) in base.channels.iter().zip(&shifted.channels) {
        let phase = Complex64::from_polar(1.0, -(a.m as f64) * alpha - a.p * beta);
        let pairs = a
            .coeffs
            .continuum_values
            .iter()
            .zip(&b.coeffs.continuum_values)
            .chain(a.coeffs.atom_values.iter().zip(&b.coeffs.atom_values));
        for (x, y) in pairs {
            worst = worst.max((y - phase * x).norm());
        }
    }
    Ok(worst)
}
