//! The entire functions 𝒳_κ and 𝒴 and the radial eigenfunction families
//! u^κ(E), w^κ(E) and u^κ_ϑ(E) of `−∂²_r + (κ² − 1/4)/r²`.
//!
//! Every function here is a pure function of its arguments. Radial
//! derivatives come from termwise differentiation of the series, never from
//! finite differences.

mod gamma;
mod series;

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};

pub use gamma::gamma_fn;
pub use series::SERIES_ZETA_BOUND;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this |κ| the logarithmic κ = 0 solution stands in for w^κ; the
/// quotient `[u^κ cos πκ − u^{−κ}] / sin πκ` is 0/0 there.
pub const SMALL_ORDER: f64 = 1e-6;

/// Bessel order κ.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Order(f64);

impl Order {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() {
            Ok(Order(kappa))
        } else {
            Err(Error::InvalidInput(format!("order must be finite, got {kappa}")))
        }
    }

    pub fn kappa(self) -> f64 {
        self.0
    }

    /// ϑ_κ = πκ/2.
    pub fn theta_kappa(self) -> f64 {
        0.5 * PI * self.0
    }

    /// True when `|κ| < 1`, where the radial operator needs a boundary
    /// condition at the origin.
    pub fn is_extension_family(self) -> bool {
        self.0.abs() < 1.0
    }

    fn require_extension(self) -> Result<()> {
        if self.is_extension_family() {
            Ok(())
        } else {
            Err(Error::NotExtensionOrder(self.0))
        }
    }
}

/// Spectral parameter `E` and radius `r > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub energy: f64,
    pub r: f64,
}

impl EvalPoint {
    pub fn new(energy: f64, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NonPositiveRadius(r));
        }
        if !energy.is_finite() {
            return Err(Error::InvalidInput(format!("energy must be finite, got {energy}")));
        }
        Ok(EvalPoint { energy, r })
    }

    /// ζ = r²E, the argument of 𝒳_κ and 𝒴.
    pub fn zeta(self) -> f64 {
        self.r * self.r * self.energy
    }
}

/// A function value together with its radial derivative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValueWithDerivative {
    pub value: f64,
    pub d_dr: f64,
}

impl ValueWithDerivative {
    pub fn scale(self, c: f64) -> Self {
        ValueWithDerivative {
            value: c * self.value,
            d_dr: c * self.d_dr,
        }
    }

    /// `a·self + b·other`.
    pub fn combine(self, a: f64, other: Self, b: f64) -> Self {
        ValueWithDerivative {
            value: a * self.value + b * other.value,
            d_dr: a * self.d_dr + b * other.d_dr,
        }
    }

    /// Wronskian `f g' − f' g`.
    pub fn wronskian(self, other: Self) -> f64 {
        self.value * other.d_dr - self.d_dr * other.value
    }
}

/// 𝒳_κ(ζ) = 2^{−κ} Σ_{n≥0} (−1)ⁿ ζⁿ / (Γ(κ+n+1) n! 2^{2n}).
pub fn chi_kappa(order: Order, zeta: f64) -> Result<f64> {
    let sums = series::chi_sums(order.kappa(), zeta)?;
    Ok(2f64.powf(-order.kappa()) * sums.s0.to_f64())
}

/// 𝒴(ζ) = Σ_{n≥1} (−1)ⁿ c_n ζⁿ / ((n!)² 2^{2n}), c_n the harmonic numbers.
pub fn script_y(zeta: f64) -> Result<f64> {
    Ok(series::log_sums(zeta)?.y0.to_f64())
}

/// u^κ(E|r) = r^{1/2+κ} 𝒳_κ(r²E).
pub fn u_eigen(order: Order, point: EvalPoint) -> Result<ValueWithDerivative> {
    let kappa = order.kappa();
    let sums = series::chi_sums(kappa, point.zeta())?;
    let scale = 2f64.powf(-kappa);
    let r = point.r;
    // d/dr Σ a_n r^{2n+κ+1/2} = r^{κ−1/2} Σ (2n+κ+1/2) a_n r^{2n}
    let deriv_sum = sums.s0.mul_f64(kappa + 0.5) + sums.s1.mul_f64(2.0);
    Ok(ValueWithDerivative {
        value: scale * r.powf(kappa + 0.5) * sums.s0.to_f64(),
        d_dr: scale * r.powf(kappa - 0.5) * deriv_sum.to_f64(),
    })
}

/// The κ = 0 logarithmic solution
/// w⁰(E|r) = (2/π)[(ln(r/2) + γ) u⁰(E|r) − √r 𝒴(r²E)].
fn w_log(point: EvalPoint) -> Result<(ValueWithDerivative, ValueWithDerivative)> {
    let s = series::log_sums(point.zeta())?;
    let r = point.r;
    let sqrt_r = r.sqrt();
    let log_term = (0.5 * r).ln() + EULER_GAMMA;
    let half = |x: Dd| x.mul_f64(0.5);
    let u0_deriv = half(s.x0) + s.x1.mul_f64(2.0);
    let y_deriv = half(s.y0) + s.y1.mul_f64(2.0);
    let u = ValueWithDerivative {
        value: sqrt_r * s.x0.to_f64(),
        d_dr: u0_deriv.to_f64() / sqrt_r,
    };
    let w_val = s.x0.mul_f64(log_term) - s.y0;
    let w_der = s.x0 + u0_deriv.mul_f64(log_term) - y_deriv;
    let w = ValueWithDerivative {
        value: FRAC_2_PI * sqrt_r * w_val.to_f64(),
        d_dr: FRAC_2_PI * w_der.to_f64() / sqrt_r,
    };
    Ok((u, w))
}

/// u^κ(E) and w^κ(E) for |κ| < 1, sharing the series evaluations.
fn extension_pair(order: Order, point: EvalPoint) -> Result<(ValueWithDerivative, ValueWithDerivative)> {
    order.require_extension()?;
    let kappa = order.kappa();
    if kappa.abs() < SMALL_ORDER {
        let (u0, w0) = w_log(point)?;
        // u^κ itself is well conditioned; only w switches branch.
        let u = if kappa == 0.0 { u0 } else { u_eigen(order, point)? };
        return Ok((u, w0));
    }
    let up = u_eigen(order, point)?;
    let um = u_eigen(Order(-kappa), point)?;
    let (s, c) = (PI * kappa).sin_cos();
    let w = up.combine(c / s, um, -1.0 / s);
    Ok((up, w))
}

/// w^κ(E) = u^κ_{π/2+ϑ_κ}(E), the second solution normalized so that
/// W(u^κ(0), w^κ(0)) = 2/π.
pub fn w_eigen(order: Order, point: EvalPoint) -> Result<ValueWithDerivative> {
    extension_pair(order, point).map(|(_, w)| w)
}

/// u^κ_ϑ(E) = u^κ(E) cos(ϑ − ϑ_κ) + w^κ(E) sin(ϑ − ϑ_κ).
pub fn u_theta_eigen(order: Order, theta: f64, point: EvalPoint) -> Result<ValueWithDerivative> {
    if !theta.is_finite() {
        return Err(Error::InvalidInput(format!("theta must be finite, got {theta}")));
    }
    let (u, w) = extension_pair(order, point)?;
    let (s, c) = (theta - order.theta_kappa()).sin_cos();
    Ok(u.combine(c, w, s))
}
