//! Independent reference values: exact rational series, half-order closed
//! forms and direct quadrature of sine transforms.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::special_fns::gamma_fn;
use crate::transform1d::RadialProfile;

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("{x} has no exact rational form")))
}

/// `|term| < 2^{−200}·|sum|`, far below f64 resolution.
fn negligible(term: &BigRational, sum: &BigRational) -> bool {
    let scale = BigRational::from_integer(BigInt::one() << 200u32);
    term.abs() * scale < sum.abs()
}

const MAX_TERMS: usize = 2000;

/// `Σ_n (−ζ/4)ⁿ / (n! (κ+1)_n)` summed exactly in rationals, with κ and ζ
/// taken as the exact values of their f64 representations. Requires
/// `κ > −1`.
pub fn pochhammer_series_exact(kappa: f64, zeta: f64) -> Result<f64> {
    if !(kappa > -1.0) {
        return Err(Error::InvalidInput(format!(
            "rational oracle needs kappa > -1, got {kappa}"
        )));
    }
    let k = rational(kappa)?;
    let x = -rational(zeta)? / BigRational::from_integer(BigInt::from(4));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for n in 1..MAX_TERMS {
        let nr = BigRational::from_integer(BigInt::from(n));
        term = term * &x / (&nr * (&k + &nr));
        sum += &term;
        // Terms decrease monotonically once n exceeds |ζ|/4 + 1.
        if term.is_zero() || (nr > x.abs() + BigRational::one() && negligible(&term, &sum)) {
            break;
        }
    }
    sum.to_f64()
        .ok_or_else(|| Error::InvalidInput("series value overflows f64".into()))
}

/// 𝒳_κ(ζ) = 2^{−κ}/Γ(κ+1) · Σ (−ζ/4)ⁿ/(n!(κ+1)_n), `κ > −1`.
pub fn chi_exact(kappa: f64, zeta: f64) -> Result<f64> {
    Ok(2f64.powf(-kappa) / gamma_fn(kappa + 1.0)? * pochhammer_series_exact(kappa, zeta)?)
}

/// 𝒴(ζ) = Σ_{n≥1} (−1)ⁿ c_n ζⁿ / ((n!)² 4ⁿ) summed exactly in rationals.
pub fn script_y_exact(zeta: f64) -> Result<f64> {
    let x = -rational(zeta)? / BigRational::from_integer(BigInt::from(4));
    let mut power = BigRational::one();
    let mut harmonic = BigRational::zero();
    let mut sum = BigRational::zero();
    for n in 1..MAX_TERMS {
        let nr = BigRational::from_integer(BigInt::from(n));
        power = power * &x / (&nr * &nr);
        harmonic += BigRational::one() / &nr;
        let term = &power * &harmonic;
        sum += &term;
        if term.is_zero() || (nr > x.abs() + BigRational::one() && negligible(&term, &sum)) {
            break;
        }
    }
    sum.to_f64()
        .ok_or_else(|| Error::InvalidInput("series value overflows f64".into()))
}

/// Closed forms 𝒳_{1/2}(ζ) = √(2/π) sin(√ζ)/√ζ and 𝒳_{−1/2}(ζ) = √(2/π) cos √ζ
/// for `ζ > 0`.
pub fn chi_half_order(kappa_sign: f64, zeta: f64) -> f64 {
    let s = zeta.sqrt();
    let c = (2.0 / PI).sqrt();
    if kappa_sign > 0.0 {
        c * s.sin() / s
    } else {
        c * s.cos()
    }
}

/// √(2/π) ∫ sin(r√E) ψ(r) dr / √E by an independent 400-point Gauss rule.
pub fn sine_transform(profile: &dyn RadialProfile, energy: f64) -> f64 {
    let (a, b) = profile.support();
    let k = energy.sqrt();
    let rule = GaussLegendre::new(400);
    (2.0 / PI).sqrt() * rule.integrate(a, b, |r| (k * r).sin() * profile.value(r)) / k
}
