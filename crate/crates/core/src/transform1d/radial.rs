use std::io::Write;

use num_complex::Complex64;

use super::profiles::RadialProfile;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Smallest number of radial nodes accepted.
pub const MIN_RADIAL_NODES: usize = 8;

/// Quadrature nodes and weights on a compact `[a, b] ⊂ (0, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    pub r_nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if r_nodes.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} radial nodes but {} weights",
                r_nodes.len(),
                weights.len()
            )));
        }
        if r_nodes.len() < MIN_RADIAL_NODES {
            return Err(Error::InvalidInput(format!(
                "at least {MIN_RADIAL_NODES} radial nodes are required, got {}",
                r_nodes.len()
            )));
        }
        if !(r_nodes[0] > 0.0) || r_nodes.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonPositiveRadius(r_nodes[0]));
        }
        if r_nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("radial nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput("radial weights must be positive".into()));
        }
        Ok(RadialGrid { r_nodes, weights })
    }

    /// `n`-point Gauss–Legendre rule on `[a, b]`.
    pub fn gauss_legendre(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "radial interval [{a}, {b}] must lie in (0, inf)"
            )));
        }
        let (r, w) = GaussLegendre::new(n).on_interval(a, b);
        Self::new(r, w)
    }

    /// Trapezoid weights for arbitrary increasing nodes.
    pub fn trapezoid(r_nodes: Vec<f64>) -> Result<Self> {
        let n = r_nodes.len();
        if n < 2 {
            return Self::new(r_nodes, Vec::new());
        }
        let weights = (0..n)
            .map(|i| {
                let lo = r_nodes[i.saturating_sub(1)];
                let hi = r_nodes[(i + 1).min(n - 1)];
                0.5 * (hi - lo)
            })
            .collect();
        Self::new(r_nodes, weights)
    }

    pub fn len(&self) -> usize {
        self.r_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_nodes.is_empty()
    }
}

/// A sampled complex function on a radial quadrature grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialFunction {
    pub grid: RadialGrid,
    pub values: Vec<Complex64>,
    /// Exact second-derivative samples, when the function is known in closed
    /// form.
    pub second_derivative: Option<Vec<Complex64>>,
}

impl RadialFunction {
    pub fn new(grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for {} radial nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(RadialFunction {
            grid,
            values,
            second_derivative: None,
        })
    }

    pub fn with_second_derivative(mut self, d2: Vec<Complex64>) -> Result<Self> {
        if d2.len() != self.values.len() {
            return Err(Error::InvalidInput("second derivative length mismatch".into()));
        }
        self.second_derivative = Some(d2);
        Ok(self)
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        let n = grid.len();
        RadialFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            second_derivative: Some(vec![Complex64::new(0.0, 0.0); n]),
        }
    }

    /// Samples a profile, including its second derivative, on `grid`.
    pub fn sample(profile: &dyn RadialProfile, grid: RadialGrid) -> Self {
        let values = grid
            .r_nodes
            .iter()
            .map(|&r| Complex64::new(profile.value(r), 0.0))
            .collect();
        let d2 = grid
            .r_nodes
            .iter()
            .map(|&r| Complex64::new(profile.second_derivative(r), 0.0))
            .collect();
        RadialFunction {
            grid,
            values,
            second_derivative: Some(d2),
        }
    }

    /// Samples a profile with an `n`-point Gauss rule on its support.
    pub fn from_profile(profile: &dyn RadialProfile, n: usize) -> Result<Self> {
        let (a, b) = profile.support();
        Ok(Self::sample(profile, RadialGrid::gauss_legendre(a, b, n)?))
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.grid.r_nodes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ∫|ψ|² dr by the embedded rule.
    pub fn norm_sqr(&self) -> f64 {
        self.grid
            .weights
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum()
    }

    /// ∫|ψ − φ|² dr; both functions must share the grid.
    pub fn distance_sqr(&self, other: &RadialFunction) -> Result<f64> {
        if self.grid.r_nodes != other.grid.r_nodes {
            return Err(Error::InvalidInput("radial functions live on different grids".into()));
        }
        Ok(self
            .grid
            .weights
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * (a - b).norm_sqr())
            .sum())
    }

    /// Writes `r,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,re,im")?;
        for (r, v) in self.grid.r_nodes.iter().zip(&self.values) {
            writeln!(out, "{:e},{:e},{:e}", r, v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads `r,re,im[,weight]` rows. Without a weight column the trapezoid
    /// rule on the given nodes is used. Lines starting with `#` are skipped.
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut rows = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = rows.next().ok_or(Error::Csv {
            line: 0,
            message: "empty input".into(),
        })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let weighted = match cols.as_slice() {
            ["r", "re", "im"] => false,
            ["r", "re", "im", "weight"] => true,
            _ => {
                return Err(Error::Csv {
                    line: hline,
                    message: format!("expected header r,re,im[,weight], got {header:?}"),
                })
            }
        };
        let width = if weighted { 4 } else { 3 };
        let (mut r, mut w, mut v) = (Vec::new(), Vec::new(), Vec::new());
        for (line, row) in rows {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != width {
                return Err(Error::Csv {
                    line,
                    message: format!("expected {width} fields, got {}", fields.len()),
                });
            }
            let mut nums = [0.0; 4];
            for (slot, f) in nums.iter_mut().zip(&fields) {
                *slot = f
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Csv {
                        line,
                        message: format!("not a finite number: {f:?}"),
                    })?;
            }
            r.push(nums[0]);
            v.push(Complex64::new(nums[1], nums[2]));
            w.push(nums[3]);
        }
        let grid = if weighted {
            RadialGrid::new(r, w)
        } else {
            RadialGrid::trapezoid(r)
        };
        let grid = grid.map_err(|e| Error::Csv {
            line: hline,
            message: e.to_string(),
        })?;
        RadialFunction::new(grid, v)
    }
}
