use serde::{Deserialize, Serialize};

use super::{Atom, SpectralMeasure};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Gauss–Legendre points per panel.
pub const PANEL_ORDER: usize = 16;

/// Number of geometric refinements `[0, E_max]·4^{−j}` toward `E = 0`.
pub const GRADING_LEVELS: usize = 12;

/// A discretized spectral measure: weighted nodes on `[0, E_max]` plus the
/// atoms of the measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureQuadrature {
    pub e_nodes: Vec<f64>,
    /// Density times quadrature weight at each node.
    pub e_weights: Vec<f64>,
    pub atoms: Vec<Atom>,
}

impl MeasureQuadrature {
    pub fn len(&self) -> usize {
        self.e_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_nodes.is_empty()
    }

    /// Σ weights over the continuum nodes.
    pub fn continuum_mass(&self) -> f64 {
        self.e_weights.iter().sum()
    }

    /// ∫ f dμ including the atoms.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let ac: f64 = self.e_nodes.iter().zip(&self.e_weights).map(|(&e, &w)| w * f(e)).sum();
        ac + self.atoms.iter().map(|a| a.weight * f(a.energy)).sum::<f64>()
    }

    pub fn without_atoms(&self) -> Self {
        MeasureQuadrature {
            atoms: Vec::new(),
            ..self.clone()
        }
    }
}

/// Composite Gauss–Legendre rule for `measure` on `[0, e_max]`.
///
/// The interval is cut at `e_max·4^{−j}` for `j = 1..=J` so that endpoint
/// behavior like `E^{±κ}` or `ln E` at the origin is resolved. The node
/// budget fixes the panel count `P = node_budget / 16` and `J = min(12, P − 1)`.
/// Up to half of the panels beyond `J + 1` go where the density itself is
/// under-resolved (the narrow peak near an atom-free angle), as extra
/// splits or extra grading levels; the rest subdivide the outer panels, balancing the width in `√E`
/// (the oscillation variable of the kernels).
pub fn discretize(measure: &SpectralMeasure, e_max: f64, node_budget: usize) -> Result<MeasureQuadrature> {
    if !(e_max >= 0.0 && e_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "E_max must be finite and non-negative, got {e_max}"
        )));
    }
    if node_budget < PANEL_ORDER {
        return Err(Error::InvalidInput(format!(
            "node budget must be at least {PANEL_ORDER}, got {node_budget}"
        )));
    }
    let atoms = measure.atoms.clone();
    if e_max == 0.0 {
        return Ok(MeasureQuadrature {
            e_nodes: Vec::new(),
            e_weights: Vec::new(),
            atoms,
        });
    }
    let rule = GaussLegendre::new(PANEL_ORDER);
    let mut e_nodes = Vec::with_capacity(node_budget);
    let mut e_weights = Vec::with_capacity(node_budget);
    let density = |e: f64| measure.density(e);
    for (lo, hi) in panels(e_max, node_budget / PANEL_ORDER, &rule, &density) {
        let (xs, ws) = rule.on_interval(lo, hi);
        for (x, w) in xs.into_iter().zip(ws) {
            e_nodes.push(x);
            e_weights.push(w * measure.density(x));
        }
    }
    Ok(MeasureQuadrature {
        e_nodes,
        e_weights,
        atoms,
    })
}

/// Relative size below which a panel's density integral counts as resolved.
const DENSITY_RESOLUTION: f64 = 1e-13;

/// Composite rule over `n` equal pieces of `[lo, hi]`.
fn composite(rule: &GaussLegendre, lo: f64, hi: f64, n: usize, f: &dyn Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / n as f64;
    (0..n)
        .map(|s| rule.integrate(lo + s as f64 * h, lo + (s + 1) as f64 * h, f))
        .sum()
}

/// Panel endpoints in increasing order.
fn panels(e_max: f64, count: usize, rule: &GaussLegendre, density: &dyn Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let levels = GRADING_LEVELS.min(count - 1);
    let mut cuts: Vec<f64> = (0..=levels).rev().map(|j| e_max * 0.25f64.powi(j as i32)).collect();
    cuts.insert(0, 0.0);
    let mut base: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let mut splits = vec![1usize; base.len()];
    let extra = count - base.len();

    // Refining panel i costs one panel: an extra equal split, or for the
    // innermost panel one more grading level, since equal splits do not
    // cure an endpoint singularity.
    let q = |lo: f64, hi: f64, n: usize| composite(rule, lo, hi, n, density);
    let error = |base: &[(f64, f64)], i: usize, n: usize| {
        let (lo, hi) = base[i];
        let refined = if i == 0 {
            q(lo, 0.25 * hi, 1) + q(0.25 * hi, hi, 1)
        } else {
            q(lo, hi, 2 * n)
        };
        (q(lo, hi, n) - refined).abs()
    };
    let total: f64 = base.iter().map(|&(lo, hi)| q(lo, hi, 1).abs()).sum();
    let mut errors: Vec<f64> = (0..base.len()).map(|i| error(&base, i, 1)).collect();
    for _ in 0..extra / 2 {
        let (worst, &e) = errors
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("at least one panel");
        if !(e > DENSITY_RESOLUTION * total) {
            break;
        }
        if worst == 0 {
            let h = base[0].1;
            base[0] = (0.25 * h, h);
            base.insert(0, (0.0, 0.25 * h));
            splits.insert(0, 1);
            errors.insert(0, 0.0);
            errors[0] = error(&base, 0, 1);
            errors[1] = error(&base, 1, 1);
        } else {
            splits[worst] += 1;
            errors[worst] = error(&base, worst, splits[worst]);
        }
    }

    let used: usize = splits.iter().sum();
    for _ in used..count {
        let widest = (0..base.len())
            .max_by(|&i, &k| {
                let wi = (base[i].1.sqrt() - base[i].0.sqrt()) / splits[i] as f64;
                let wk = (base[k].1.sqrt() - base[k].0.sqrt()) / splits[k] as f64;
                wi.total_cmp(&wk).then(k.cmp(&i))
            })
            .expect("at least one panel");
        splits[widest] += 1;
    }

    let mut out = Vec::with_capacity(count);
    for (&(lo, hi), &n) in base.iter().zip(&splits) {
        let h = (hi - lo) / n as f64;
        for s in 0..n {
            let a = lo + s as f64 * h;
            let b = if s + 1 == n { hi } else { lo + (s + 1) as f64 * h };
            out.push((a, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{spectral_measure, ExtensionParams};

    fn measure(k: f64, t: f64) -> SpectralMeasure {
        spectral_measure(ExtensionParams::new(k, t).unwrap())
    }

    #[test]
    fn panel_layout() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let flat = |_: f64| 1.0;
        let ps = panels(1.0, 1, &rule, &flat);
        assert_eq!(ps, vec![(0.0, 1.0)]);
        let ps = panels(1.0, 13, &rule, &flat);
        assert_eq!(ps.len(), 13);
        assert_eq!(ps[0].0, 0.0);
        assert_eq!(ps[12].1, 1.0);
        let ps = panels(100.0, 40, &rule, &flat);
        assert_eq!(ps.len(), 40);
        for w in ps.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }

    #[test]
    fn power_densities() {
        let q = discretize(&measure(1.0, 0.0), 2.0, 64).unwrap();
        assert!((q.continuum_mass() - 1.0).abs() < 1e-13);
        let q = discretize(&measure(2.5, 0.0), 1.0, 256).unwrap();
        assert!((q.continuum_mass() - 1.0 / 7.0).abs() < 1e-13);
        assert!(q.e_nodes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(q.len(), 256);
    }

    #[test]
    fn endpoint_powers() {
        // ½E^{±0.4} on [0,1] integrate to 1/2.8 and 1/1.2. The integrable
        // singularity draws extra grading levels but stays less sharp.
        let k = 0.4;
        let x = super::super::theta_kappa(k);
        let q = discretize(&measure(k, x), 1.0, 512).unwrap();
        assert!((q.continuum_mass() - 1.0 / 2.8).abs() < 1e-12);
        let q = discretize(&measure(k, -x), 1.0, 512).unwrap();
        assert!((q.continuum_mass() - 1.0 / 1.2).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let m = measure(0.3, 1.0);
        assert!(discretize(&m, 0.0, 64).unwrap().is_empty());
        assert!(discretize(&m, 1.0, 8).is_err());
        assert!(discretize(&m, -1.0, 64).is_err());
        let tiny = discretize(&m, 1e-30, 64).unwrap();
        assert!(tiny.continuum_mass() < 1e-29);
    }

    #[test]
    fn narrow_peak_near_atom_free_angle() {
        // κ = 0.9, ϑ = 2.01 has a peak of width ≈ 0.3 in ln E near E ≈ 0.6.
        let m = spectral_measure(ExtensionParams::new(0.9, 2.01).unwrap());
        let coarse = discretize(&m, 300.0, 512).unwrap().continuum_mass();
        let fine = discretize(&m, 300.0, 8192).unwrap().continuum_mass();
        assert!((coarse - fine).abs() < 1e-11 * fine, "{coarse} {fine}");
    }
}
