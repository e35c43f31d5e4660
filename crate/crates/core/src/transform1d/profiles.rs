//! Smooth compactly supported test profiles with closed-form second
//! derivatives.

use crate::error::{Error, Result};

/// A real radial profile supported on `[a, b]` with `0 < a < b`.
pub trait RadialProfile: Send + Sync {
    fn support(&self) -> (f64, f64);
    fn value(&self, r: f64) -> f64;
    fn second_derivative(&self, r: f64) -> f64;
}

/// `(1 − x²)^n` with its first two derivatives in `x`.
fn taper(x: f64, n: i32) -> (f64, f64, f64) {
    let q = 1.0 - x * x;
    let nf = f64::from(n);
    let h = q.powi(n);
    let h1 = -2.0 * nf * x * q.powi(n - 1);
    let h2 = -2.0 * nf * q.powi(n - 1) + 4.0 * nf * (nf - 1.0) * x * x * q.powi(n - 2);
    (h, h1, h2)
}

/// Ratio of Gaussian width to support half-width used by [`GaussianBump::on`].
pub const BUMP_WIDTH_RATIO: f64 = 0.312;

/// Tapered Gaussian `exp(−(r−c)²/(2σ²))·(1 − x²)^5`, `x = (r−c)/w`, on
/// `[c−w, c+w]`.
///
/// The taper makes value and first derivative vanish at both ends, so
/// integration by parts against any kernel leaves no boundary terms, while
/// the Gaussian keeps the spectrum concentrated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBump {
    pub center: f64,
    pub half_width: f64,
    pub sigma: f64,
}

const TAPER_POWER: i32 = 5;

impl GaussianBump {
    /// The bump on `[a, b]` with σ = 0.312·(b − a)/2.
    pub fn on(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidInput(format!("bump support [{a}, {b}] is empty")));
        }
        let half_width = 0.5 * (b - a);
        Ok(GaussianBump {
            center: 0.5 * (a + b),
            half_width,
            sigma: BUMP_WIDTH_RATIO * half_width,
        })
    }

    /// Value, first and second derivative.
    pub fn jet(&self, r: f64) -> (f64, f64, f64) {
        let s = r - self.center;
        let x = s / self.half_width;
        if x.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let s2 = self.sigma * self.sigma;
        let g = (-0.5 * s * s / s2).exp();
        let g1 = -s / s2 * g;
        let g2 = (s * s / s2 - 1.0) / s2 * g;
        let (h, hx, hxx) = taper(x, TAPER_POWER);
        let w = self.half_width;
        let (h1, h2) = (hx / w, hxx / (w * w));
        (g * h, g1 * h + g * h1, g2 * h + 2.0 * g1 * h1 + g * h2)
    }
}

impl RadialProfile for GaussianBump {
    fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    fn value(&self, r: f64) -> f64 {
        self.jet(r).0
    }

    fn second_derivative(&self, r: f64) -> f64 {
        self.jet(r).2
    }
}

/// The Gaussian bump on `[a, b]` modulated by `cos(ωr)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineBump {
    pub a: f64,
    pub b: f64,
    pub omega: f64,
}

impl CosineBump {
    pub fn new(a: f64, b: f64, omega: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a && omega.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid cosine bump on [{a}, {b}] with frequency {omega}"
            )));
        }
        Ok(CosineBump { a, b, omega })
    }

    pub fn jet(&self, r: f64) -> (f64, f64, f64) {
        let envelope = GaussianBump::on(self.a, self.b).expect("support validated on construction");
        let (h, h1, h2) = envelope.jet(r);
        let (s, c) = (self.omega * r).sin_cos();
        let om = self.omega;
        (h * c, h1 * c - om * h * s, h2 * c - 2.0 * om * h1 * s - om * om * h * c)
    }
}

impl RadialProfile for CosineBump {
    fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn value(&self, r: f64) -> f64 {
        self.jet(r).0
    }

    fn second_derivative(&self, r: f64) -> f64 {
        self.jet(r).2
    }
}

/// Parses a named test family: `gauss:a:b` or `cosine:a:b:omega`.
pub fn parse_family(spec: &str) -> Result<Box<dyn RadialProfile>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("bad number {s:?} in family {spec:?}")))
    };
    let profile: Box<dyn RadialProfile> = match parts.as_slice() {
        ["gauss", a, b] => Box::new(GaussianBump::on(num(a)?, num(b)?)?),
        ["cosine", a, b, om] => Box::new(CosineBump::new(num(a)?, num(b)?, num(om)?)?),
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown test family {spec:?}; expected gauss:a:b or cosine:a:b:omega"
            )))
        }
    };
    let (a, _) = profile.support();
    if a <= 0.0 {
        return Err(Error::InvalidInput(format!("support of {spec:?} must lie in (0, inf)")));
    }
    Ok(profile)
}
