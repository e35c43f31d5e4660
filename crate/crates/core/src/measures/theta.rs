use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An extension angle ϑ, kept as a user representative plus an exact number
/// of half turns.
///
/// Physical quantities depend on ϑ only modulo π (up to a sign of the
/// eigenfunctions), so everything downstream works with the canonical
/// representative in `[0, π)` and a parity bit. Shifting by whole half
/// turns through [`Theta::shifted`] is exact: the canonical representative
/// does not move by a single bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta {
    base: f64,
    half_turns: i64,
}

impl Theta {
    pub fn new(value: f64) -> Self {
        Theta {
            base: value,
            half_turns: 0,
        }
    }

    /// ϑ + nπ.
    pub fn shifted(self, n: i64) -> Self {
        Theta {
            base: self.base,
            half_turns: self.half_turns + n,
        }
    }

    /// The representative as given by the user (base + nπ).
    pub fn value(self) -> f64 {
        (self.half_turns as f64).mul_add(PI, self.base)
    }

    pub fn is_finite(self) -> bool {
        self.base.is_finite()
    }

    /// `(ϑ₀, odd)` with ϑ = ϑ₀ + kπ, ϑ₀ ∈ [0, π) and `odd = k mod 2 == 1`.
    pub fn canonical(self) -> (f64, bool) {
        let mut k = (self.base / PI).floor();
        let mut reduced = (-k).mul_add(PI, self.base);
        if reduced < 0.0 {
            reduced += PI;
            k -= 1.0;
        } else if reduced >= PI {
            reduced -= PI;
            k += 1.0;
        }
        let total = (k as i64).wrapping_add(self.half_turns);
        (reduced, total.rem_euclid(2) == 1)
    }

    pub fn reduced(self) -> f64 {
        self.canonical().0
    }

    /// `(−1)^k` for ϑ = ϑ₀ + kπ.
    pub fn sign(self) -> f64 {
        if self.canonical().1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Same physical extension (difference in πℤ).
    pub fn equivalent(self, other: Theta) -> bool {
        self.reduced() == other.reduced()
    }
}

impl From<f64> for Theta {
    fn from(v: f64) -> Self {
        Theta::new(v)
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(Theta::new)
    }
}
