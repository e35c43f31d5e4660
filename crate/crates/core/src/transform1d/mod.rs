//! Discrete eigenfunction transforms U_κ (`|κ| ≥ 1`) and U_{κ,ϑ}
//! (`|κ| < 1`) for compactly supported radial functions.

mod plan;
mod profiles;
mod radial;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{ExtensionParams, MeasureQuadrature};
use crate::quadrature::GaussLegendre;
use crate::special_fns::{u_eigen, u_theta_eigen, EvalPoint, Order, ValueWithDerivative, SERIES_ZETA_BOUND};

pub use plan::{TransformCoefficients, TransformPlan, UnitarityDefects};
pub use profiles::{parse_family, CosineBump, GaussianBump, RadialProfile, BUMP_WIDTH_RATIO};
pub use radial::{RadialFunction, RadialGrid, MIN_RADIAL_NODES};

/// Weyl classification of an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    LimitPoint,
    LimitCircle,
}

/// Endpoint classification of `−∂²_r + (κ² − 1/4)/r²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemClass {
    pub endpoint_0: Endpoint,
    pub endpoint_inf: Endpoint,
}

/// Limit circle at 0 iff `|κ| < 1`; always limit point at ∞.
pub fn classify(kappa: f64) -> ProblemClass {
    ProblemClass {
        endpoint_0: if kappa.abs() < 1.0 {
            Endpoint::LimitCircle
        } else {
            Endpoint::LimitPoint
        },
        endpoint_inf: Endpoint::LimitPoint,
    }
}

/// Transform kernel: u^{|κ|}(E) for `|κ| ≥ 1`, u^κ_ϑ(E) otherwise.
///
/// ϑ enters through its canonical representative and parity, so shifting
/// ϑ by π flips the sign exactly.
pub fn kernel(params: ExtensionParams, energy: f64, r: f64) -> Result<ValueWithDerivative> {
    let point = EvalPoint::new(energy, r)?;
    if params.is_extension_family() {
        let (theta, odd) = params.theta.canonical();
        let v = u_theta_eigen(params.order(), theta, point)?;
        Ok(if odd { v.scale(-1.0) } else { v })
    } else {
        u_eigen(Order::new(params.kappa.abs())?, point)
    }
}

/// `√|E_b|·r` up to which the atom kernel comes from the series; beyond it
/// the decaying solution is matched at this point.
const ATOM_MATCH: f64 = 4.0;

/// `(e^x K_ν(x), e^x K_ν'(x))` from `K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt`.
fn scaled_macdonald(nu: f64, x: f64) -> (f64, f64) {
    // The integrand is below e^{−80} past t_max.
    let t_max = (1.0 + 80.0 / x).acosh() + 1.0;
    let rule = GaussLegendre::new(48);
    let panels = 4;
    let (mut k, mut dk) = (0.0, 0.0);
    for i in 0..panels {
        let a = t_max * i as f64 / panels as f64;
        let b = t_max * (i + 1) as f64 / panels as f64;
        k += rule.integrate(a, b, |t| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh());
        dk -= rule.integrate(a, b, |t| (-x * (t.cosh() - 1.0)).exp() * t.cosh() * (nu * t).cosh());
    }
    (k, dk)
}

/// Kernel at a bound-state energy `E_b` of `params`.
///
/// Near the origin this is [`kernel`]. Past `√|E_b|·r = 4` the series
/// combination of two growing solutions would cancel to a decaying one, so
/// the decaying solution `√r K_κ(√|E_b| r)` is used instead, scaled to agree
/// with the series at the matching point. This also removes the series
/// domain bound for atoms.
pub fn atom_kernel(params: ExtensionParams, energy: f64, r: f64) -> Result<ValueWithDerivative> {
    if !(energy < 0.0) {
        return Err(Error::InvalidInput(format!(
            "bound-state energy must be negative, got {energy}"
        )));
    }
    let k = (-energy).sqrt();
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if k * r <= ATOM_MATCH {
        return kernel(params, energy, r);
    }
    let r0 = ATOM_MATCH / k;
    let anchor = kernel(params, energy, r0)?.value;
    let (k0, _) = scaled_macdonald(params.kappa, ATOM_MATCH);
    let (kx, dkx) = scaled_macdonald(params.kappa, k * r);
    let scale = anchor / (r0.sqrt() * k0) * (ATOM_MATCH - k * r).exp();
    let sr = r.sqrt();
    Ok(ValueWithDerivative {
        value: scale * sr * kx,
        d_dr: scale * (kx / (2.0 * sr) + sr * k * dkx),
    })
}

/// Largest energy whose kernel stays within the series domain on `(0, r_max]`.
pub fn e_max_cap(r_max: f64) -> f64 {
    SERIES_ZETA_BOUND / (r_max * r_max)
}

/// Forward transform of `psi` on the nodes and atoms of `quad`.
pub fn forward(
    params: ExtensionParams,
    psi: &RadialFunction,
    quad: &MeasureQuadrature,
) -> Result<TransformCoefficients> {
    TransformPlan::new(params, quad.clone(), psi.grid.clone())?.forward(psi)
}

/// Synthesis `Σ μ_i kernel(E_i|r) c_i + Σ w_b kernel(E_b|r) c_b` on `grid`.
pub fn inverse(params: ExtensionParams, coeffs: &TransformCoefficients, grid: &RadialGrid) -> Result<RadialFunction> {
    TransformPlan::new(params, coeffs.quad.clone(), grid.clone())?.inverse(coeffs)
}

/// Samples of `−ψ'' + (κ² − 1/4)ψ/r²`, from the exact second derivative.
pub fn apply_l_q(kappa: f64, psi: &RadialFunction) -> Result<RadialFunction> {
    let d2 = psi.second_derivative.as_ref().ok_or(Error::MissingSecondDerivative)?;
    let q = kappa * kappa - 0.25;
    let values: Vec<Complex64> = psi
        .grid
        .r_nodes
        .iter()
        .zip(psi.values.iter().zip(d2))
        .map(|(r, (v, d))| -d + v * (q / (r * r)))
        .collect();
    RadialFunction::new(psi.grid.clone(), values)
}

/// `W_r(u^κ_ϑ(0), u^κ_ϑ(E))` at each probe radius; tends to 0 as `r → 0`.
pub fn boundary_defect(params: ExtensionParams, energy: f64, r_probe: &[f64]) -> Result<Vec<f64>> {
    if !params.is_extension_family() {
        return Err(Error::NotExtensionOrder(params.kappa));
    }
    r_probe
        .iter()
        .map(|&r| Ok(kernel(params, 0.0, r)?.wronskian(kernel(params, energy, r)?)))
        .collect()
}
