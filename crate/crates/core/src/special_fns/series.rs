//! Power series for 𝒳_κ and 𝒴, summed in double-double arithmetic.
//!
//! For ζ > 0 the terms grow like e^{√ζ} before they decay, while the sum is
//! O(1); plain f64 accumulation would lose about √ζ / ln 10 digits. Carrying
//! every term in double-double keeps ~1e-11 relative accuracy at the domain
//! bound |ζ| = 2500.

use crate::dd::Dd;
use crate::error::{Error, Result};

use super::gamma::recip_gamma;

/// Largest |ζ| accepted by the series (r √|E| ≤ 50).
pub const SERIES_ZETA_BOUND: f64 = 2500.0;
const REL_STOP: f64 = 1e-17;
const MAX_TERMS: usize = 400;

pub(crate) fn check_domain(zeta: f64) -> Result<()> {
    if zeta.is_finite() && zeta.abs() <= SERIES_ZETA_BOUND {
        Ok(())
    } else {
        Err(Error::SeriesDomain {
            zeta,
            bound: SERIES_ZETA_BOUND,
        })
    }
}

#[inline]
fn negligible(term: f64, sum: f64) -> bool {
    term.abs() <= REL_STOP * sum.abs()
}

/// `s0 = Σ t_n` and `s1 = Σ n t_n` with `t_n = (−ζ/4)^n / (n! Γ(κ+n+1))`.
///
/// Then 𝒳_κ(ζ) = 2^{−κ} s0.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ChiSums {
    pub s0: Dd,
    pub s1: Dd,
}

pub(crate) fn chi_sums(kappa: f64, zeta: f64) -> Result<ChiSums> {
    check_domain(zeta)?;
    let q = -0.25 * zeta;
    // For κ a negative integer the leading terms vanish (1/Γ at a pole).
    let start = if kappa < 0.0 && kappa == kappa.floor() {
        (-kappa) as usize
    } else {
        0
    };
    let mut t = Dd::from_f64(recip_gamma(kappa + start as f64 + 1.0));
    for n in 1..=start {
        t = t.mul_f64(q).div_f64(n as f64);
    }
    let mut s0 = t;
    let mut s1 = t.mul_f64(start as f64);
    let mut prev = t.hi.abs();
    for n in (start + 1)..MAX_TERMS {
        let nf = n as f64;
        let denom = Dd::sum_f64(nf, kappa).mul_f64(nf);
        t = t.mul_f64(q).div(denom);
        s0 = s0 + t;
        let nt = t.mul_f64(nf);
        s1 = s1 + nt;
        let mag = t.hi.abs();
        if mag == 0.0 || (mag < prev && negligible(mag, s0.hi) && negligible(nt.hi, s1.hi)) {
            break;
        }
        prev = mag;
    }
    Ok(ChiSums { s0, s1 })
}

/// Sums needed by the κ = 0 logarithmic solution: the κ = 0 𝒳 sums plus
/// `y0 = 𝒴(ζ)` and `y1 = Σ n c_n (−ζ/4)^n/(n!)²`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LogSums {
    pub x0: Dd,
    pub x1: Dd,
    pub y0: Dd,
    pub y1: Dd,
}

pub(crate) fn log_sums(zeta: f64) -> Result<LogSums> {
    check_domain(zeta)?;
    let q = -0.25 * zeta;
    let mut t = Dd::ONE;
    let mut harmonic = Dd::ZERO;
    let mut x0 = Dd::ONE;
    let mut x1 = Dd::ZERO;
    let mut y0 = Dd::ZERO;
    let mut y1 = Dd::ZERO;
    let mut prev = f64::INFINITY;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        t = t.mul_f64(q).div_f64(nf * nf);
        harmonic = harmonic + Dd::ONE.div_f64(nf);
        let ct = t * harmonic;
        x0 = x0 + t;
        x1 = x1 + t.mul_f64(nf);
        y0 = y0 + ct;
        y1 = y1 + ct.mul_f64(nf);
        let mag = ct.hi.abs();
        if t.hi == 0.0
            || (mag < prev
                && negligible(t.hi, x0.hi)
                && negligible(t.hi * nf, x1.hi)
                && negligible(mag, y0.hi)
                && negligible(mag * nf, y1.hi))
        {
            break;
        }
        prev = mag;
    }
    Ok(LogSums { x0, x1, y0, y1 })
}
