//! Smooth compactly supported fields on `{r > 0}` in cylindrical
//! coordinates `(r, angle, x₃)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transform1d::RadialProfile;

/// A field Φ(r cos a, r sin a, x₃) supported in `[r_a, r_b] × [z_a, z_b]`
/// with `r_a > 0`.
pub trait CylField: Send + Sync {
    fn value(&self, r: f64, angle: f64, x3: f64) -> Complex64;

    /// `(ℋ^φ Φ)(x)` in closed form, when available.
    fn hamiltonian(&self, _phi: f64, _r: f64, _angle: f64, _x3: f64) -> Option<Complex64> {
        None
    }

    fn radial_support(&self) -> (f64, f64);
    fn axial_support(&self) -> (f64, f64);
}

/// `Φ = r^{−1/2} ψ(r) χ(x₃) e^{imφ}`.
#[derive(Clone)]
pub struct SeparableField {
    pub psi: Arc<dyn RadialProfile>,
    pub chi: Arc<dyn RadialProfile>,
    pub m: i64,
}

impl SeparableField {
    pub fn new(psi: Arc<dyn RadialProfile>, chi: Arc<dyn RadialProfile>, m: i64) -> Result<Self> {
        if !(psi.support().0 > 0.0) {
            return Err(Error::InvalidInput(
                "radial profile must be supported away from the axis".into(),
            ));
        }
        Ok(SeparableField { psi, chi, m })
    }

    /// ∫|Φ|² d³x = 2π ‖ψ‖² ‖χ‖², given the two one-dimensional norms.
    pub fn norm_sqr_from(psi_norm_sqr: f64, chi_norm_sqr: f64) -> f64 {
        2.0 * std::f64::consts::PI * psi_norm_sqr * chi_norm_sqr
    }
}

impl CylField for SeparableField {
    fn value(&self, r: f64, angle: f64, x3: f64) -> Complex64 {
        let amp = self.psi.value(r) * self.chi.value(x3) / r.sqrt();
        Complex64::from_polar(amp, self.m as f64 * angle)
    }

    fn hamiltonian(&self, phi: f64, r: f64, angle: f64, x3: f64) -> Option<Complex64> {
        let kappa = self.m as f64 + phi;
        let (psi, chi) = (self.psi.value(r), self.chi.value(x3));
        let l_q = -self.psi.second_derivative(r) + (kappa * kappa - 0.25) / (r * r) * psi;
        let amp = (l_q * chi - psi * self.chi.second_derivative(x3)) / r.sqrt();
        Some(Complex64::from_polar(amp, self.m as f64 * angle))
    }

    fn radial_support(&self) -> (f64, f64) {
        self.psi.support()
    }

    fn axial_support(&self) -> (f64, f64) {
        self.chi.support()
    }
}

/// Off-axis blob `exp(−d²/(2s²))(1 − d²/R²)^5` for `d < R`, with `d` the
/// distance to a center at cylindrical position `(r₀, a₀, z₀)`, `R < r₀`.
/// It couples every angular channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlobField {
    pub r0: f64,
    pub a0: f64,
    pub z0: f64,
    pub radius: f64,
    pub sigma: f64,
}

impl BlobField {
    pub fn new(r0: f64, a0: f64, z0: f64, radius: f64, sigma: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < r0 && sigma > 0.0 && a0.is_finite() && z0.is_finite() && r0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "blob of radius {radius} at distance {r0} from the axis is not admissible"
            )));
        }
        Ok(BlobField {
            r0,
            a0,
            z0,
            radius,
            sigma,
        })
    }

    fn offset(&self, r: f64, angle: f64, x3: f64) -> [f64; 3] {
        let (s, c) = angle.sin_cos();
        let (s0, c0) = self.a0.sin_cos();
        [r * c - self.r0 * c0, r * s - self.r0 * s0, x3 - self.z0]
    }

    /// `g(u)`, `g'(u)`, `g''(u)` with `u = d²`.
    fn profile(&self, u: f64) -> (f64, f64, f64) {
        let r2 = self.radius * self.radius;
        if u >= r2 {
            return (0.0, 0.0, 0.0);
        }
        let s2 = self.sigma * self.sigma;
        let e = (-0.5 * u / s2).exp();
        let (e1, e2) = (-0.5 / s2 * e, 0.25 / (s2 * s2) * e);
        let q = 1.0 - u / r2;
        let h = q.powi(5);
        let h1 = -5.0 / r2 * q.powi(4);
        let h2 = 20.0 / (r2 * r2) * q.powi(3);
        (e * h, e1 * h + e * h1, e2 * h + 2.0 * e1 * h1 + e * h2)
    }
}

impl CylField for BlobField {
    fn value(&self, r: f64, angle: f64, x3: f64) -> Complex64 {
        let d = self.offset(r, angle, x3);
        Complex64::new(self.profile(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).0, 0.0)
    }

    fn hamiltonian(&self, phi: f64, r: f64, angle: f64, x3: f64) -> Option<Complex64> {
        let d = self.offset(r, angle, x3);
        let u = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let (g, g1, g2) = self.profile(u);
        let laplacian = 6.0 * g1 + 4.0 * u * g2;
        // ∂_angle of g(|x − x₀|²) = 2g'(u)·r r₀ sin(angle − a₀)
        let d_angle = 2.0 * g1 * r * self.r0 * (angle - self.a0).sin();
        let r2 = r * r;
        Some(Complex64::new(
            -laplacian + phi * phi / r2 * g,
            -2.0 * phi / r2 * d_angle,
        ))
    }

    fn radial_support(&self) -> (f64, f64) {
        (self.r0 - self.radius, self.r0 + self.radius)
    }

    fn axial_support(&self) -> (f64, f64) {
        (self.z0 - self.radius, self.z0 + self.radius)
    }
}

/// `Φ ∘ G_{αβ}^{−1}`: the field rotated by α about the axis and shifted by β
/// along it.
#[derive(Clone)]
pub struct TransformedField {
    pub inner: Arc<dyn CylField>,
    pub alpha: f64,
    pub beta: f64,
}

impl CylField for TransformedField {
    fn value(&self, r: f64, angle: f64, x3: f64) -> Complex64 {
        self.inner.value(r, angle - self.alpha, x3 - self.beta)
    }

    // ℋ^φ commutes with rotations about and translations along the axis.
    fn hamiltonian(&self, phi: f64, r: f64, angle: f64, x3: f64) -> Option<Complex64> {
        self.inner.hamiltonian(phi, r, angle - self.alpha, x3 - self.beta)
    }

    fn radial_support(&self) -> (f64, f64) {
        self.inner.radial_support()
    }

    fn axial_support(&self) -> (f64, f64) {
        let (a, b) = self.inner.axial_support();
        (a + self.beta, b + self.beta)
    }
}

/// A finite linear combination of fields.
#[derive(Clone)]
pub struct SumField {
    pub terms: Vec<(Complex64, Arc<dyn CylField>)>,
}

impl SumField {
    pub fn new(terms: Vec<(Complex64, Arc<dyn CylField>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("a sum field needs at least one term".into()));
        }
        Ok(SumField { terms })
    }
}

impl CylField for SumField {
    fn value(&self, r: f64, angle: f64, x3: f64) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.value(r, angle, x3)).sum()
    }

    fn hamiltonian(&self, phi: f64, r: f64, angle: f64, x3: f64) -> Option<Complex64> {
        self.terms
            .iter()
            .map(|(c, f)| f.hamiltonian(phi, r, angle, x3).map(|h| c * h))
            .sum()
    }

    fn radial_support(&self) -> (f64, f64) {
        hull(self.terms.iter().map(|(_, f)| f.radial_support()))
    }

    fn axial_support(&self) -> (f64, f64) {
        hull(self.terms.iter().map(|(_, f)| f.axial_support()))
    }
}

fn hull(it: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| {
        (a.min(c), b.max(d))
    })
}

/// `ℋ^φ Φ` as a field in its own right.
#[derive(Clone)]
pub struct HamiltonianField {
    inner: Arc<dyn CylField>,
    phi: f64,
}

impl HamiltonianField {
    pub fn new(inner: Arc<dyn CylField>, phi: f64) -> Result<Self> {
        let (a, b) = inner.radial_support();
        let (c, d) = inner.axial_support();
        if inner.hamiltonian(phi, 0.5 * (a + b), 0.0, 0.5 * (c + d)).is_none() {
            return Err(Error::InvalidInput("field has no closed-form Hamiltonian".into()));
        }
        Ok(HamiltonianField { inner, phi })
    }
}

impl CylField for HamiltonianField {
    fn value(&self, r: f64, angle: f64, x3: f64) -> Complex64 {
        self.inner
            .hamiltonian(self.phi, r, angle, x3)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    fn radial_support(&self) -> (f64, f64) {
        self.inner.radial_support()
    }

    fn axial_support(&self) -> (f64, f64) {
        self.inner.axial_support()
    }
}
