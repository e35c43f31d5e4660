use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
// Published coefficients, kept digit for digit.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Euler's gamma function (Lanczos, g = 7, with reflection below 1/2).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("gamma of non-finite {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::GammaPole(x));
    }
    Ok(gamma_unchecked(x))
}

/// `1/Γ(x)`, zero at the poles.
pub(crate) fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

fn gamma_unchecked(x: f64) -> f64 {
    if x == x.floor() && (1.0..=171.0).contains(&x) {
        // exact (or correctly rounded) factorial
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let series = LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEF[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64));
    SQRT_2PI * t.powf(x + 0.5) * (-t).exp() * series
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent route: shift up with the recurrence, then Stirling's
    /// series with enough Bernoulli terms for full double precision.
    fn stirling_oracle(x: f64) -> f64 {
        let mut shift = 1.0;
        let mut y = x;
        while y < 30.0 {
            shift *= y;
            y += 1.0;
        }
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let corr =
            inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        let ln = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + corr;
        ln.exp() / shift
    }

    #[test]
    fn classical_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(10.0).unwrap() - 362_880.0).abs() / 362_880.0 < 1e-14);
    }

    #[test]
    fn factorials_and_half_integers() {
        let mut fact = 1.0f64;
        for n in 1..=40u32 {
            let g = gamma_fn(n as f64 + 1.0).unwrap();
            fact *= n as f64;
            assert!((g - fact).abs() / fact < 1e-13, "Γ({})", n + 1);
        }
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let mut val = PI.sqrt();
        for n in 1..=40 {
            val *= n as f64 - 0.5;
            let g = gamma_fn(n as f64 + 0.5).unwrap();
            assert!((g - val).abs() / val < 1e-13, "Γ({}.5)", n);
        }
    }

    #[test]
    fn matches_stirling_on_grid() {
        for i in 1..=5000 {
            let x = i as f64 * 0.01;
            let g = gamma_fn(x).unwrap();
            let o = stirling_oracle(x);
            assert!((g - o).abs() / o.abs() < 1e-13, "x={x}: {g} vs {o}");
        }
    }

    #[test]
    fn poles_are_domain_errors() {
        assert_eq!(gamma_fn(0.0), Err(Error::GammaPole(0.0)));
        assert_eq!(gamma_fn(-3.0), Err(Error::GammaPole(-3.0)));
        assert!(gamma_fn(-2.5).is_ok());
        assert_eq!(recip_gamma(-2.0), 0.0);
    }
}
