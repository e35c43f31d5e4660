use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::radial::{RadialFunction, RadialGrid};
use super::{atom_kernel, kernel};
use crate::error::{Error, Result};
use crate::measures::{ExtensionParams, MeasureQuadrature};
use crate::special_fns::ValueWithDerivative;

/// Transform coefficients: one value per continuum node of `quad` and one
/// per atom.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformCoefficients {
    pub quad: MeasureQuadrature,
    pub continuum_values: Vec<Complex64>,
    pub atom_values: Vec<Complex64>,
}

impl TransformCoefficients {
    pub fn zeros(quad: MeasureQuadrature) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        TransformCoefficients {
            continuum_values: vec![zero; quad.len()],
            atom_values: vec![zero; quad.atoms.len()],
            quad,
        }
    }

    /// Σ weight·|c|² over continuum nodes and atoms.
    pub fn norm_sqr(&self) -> f64 {
        let ac: f64 = self
            .quad
            .e_weights
            .iter()
            .zip(&self.continuum_values)
            .map(|(w, c)| w * c.norm_sqr())
            .sum();
        let pp: f64 = self
            .quad
            .atoms
            .iter()
            .zip(&self.atom_values)
            .map(|(a, c)| a.weight * c.norm_sqr())
            .sum();
        ac + pp
    }

    /// Contribution of the atoms to [`Self::norm_sqr`].
    pub fn atom_norm_sqr(&self) -> f64 {
        self.quad
            .atoms
            .iter()
            .zip(&self.atom_values)
            .map(|(a, c)| a.weight * c.norm_sqr())
            .sum()
    }

    /// Squared measure-norm distance; both sets must share the quadrature.
    pub fn distance_sqr(&self, other: &Self) -> Result<f64> {
        if self.quad != other.quad {
            return Err(Error::InvalidInput("coefficients use different quadratures".into()));
        }
        let ac: f64 = self
            .quad
            .e_weights
            .iter()
            .zip(self.continuum_values.iter().zip(&other.continuum_values))
            .map(|(w, (a, b))| w * (a - b).norm_sqr())
            .sum();
        let pp: f64 = self
            .quad
            .atoms
            .iter()
            .zip(self.atom_values.iter().zip(&other.atom_values))
            .map(|(at, (a, b))| at.weight * (a - b).norm_sqr())
            .sum();
        Ok(ac + pp)
    }

    /// Multiplies every entry by `shift + E` (`E` the node or atom energy).
    pub fn multiply_by_energy(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for (c, e) in out.continuum_values.iter_mut().zip(&self.quad.e_nodes) {
            *c *= shift + e;
        }
        for (c, a) in out.atom_values.iter_mut().zip(&self.quad.atoms) {
            *c *= shift + a.energy;
        }
        out
    }

    /// Writes `# atom E weight re im` lines followed by `E,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (a, c) in self.quad.atoms.iter().zip(&self.atom_values) {
            writeln!(out, "# atom {:e} {:e} {:e} {:e}", a.energy, a.weight, c.re, c.im)?;
        }
        writeln!(out, "E,re,im")?;
        for (e, c) in self.quad.e_nodes.iter().zip(&self.continuum_values) {
            writeln!(out, "{:e},{:e},{:e}", e, c.re, c.im)?;
        }
        Ok(())
    }
}

/// Relative Parseval and roundtrip defects of one transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitarityDefects {
    /// `|‖ψ‖² − ‖Uψ‖²| / ‖ψ‖²`.
    pub parseval: f64,
    /// `‖U*Uψ − ψ‖ / ‖ψ‖`.
    pub roundtrip: f64,
}

impl UnitarityDefects {
    pub fn max(&self) -> f64 {
        self.parseval.max(self.roundtrip)
    }
}

/// The discrete transform for one extension, quadrature and radial grid:
/// the kernel matrix `K[i][j] = kernel(E_i | r_j)` plus one row per atom.
///
/// Forward and inverse are exact adjoints of each other with respect to
/// the discrete inner products. Every output entry is summed in a fixed
/// order, so results do not depend on the thread count.
#[derive(Clone, Debug)]
pub struct TransformPlan {
    params: ExtensionParams,
    quad: MeasureQuadrature,
    grid: RadialGrid,
    kernel: Vec<f64>,
    atom_kernel: Vec<f64>,
}

impl TransformPlan {
    pub fn new(params: ExtensionParams, quad: MeasureQuadrature, grid: RadialGrid) -> Result<Self> {
        let rows = |energies: &[f64], f: fn(ExtensionParams, f64, f64) -> Result<ValueWithDerivative>| {
            let rows: Vec<Vec<f64>> = energies
                .par_iter()
                .map(|&e| grid.r_nodes.iter().map(|&r| f(params, e, r).map(|k| k.value)).collect())
                .collect::<Result<_>>()?;
            Ok::<_, Error>(rows.concat())
        };
        let kernel = rows(&quad.e_nodes, kernel)?;
        let atom_energies: Vec<f64> = quad.atoms.iter().map(|a| a.energy).collect();
        let atom_kernel = rows(&atom_energies, atom_kernel)?;
        Ok(TransformPlan {
            params,
            quad,
            grid,
            kernel,
            atom_kernel,
        })
    }

    pub fn params(&self) -> ExtensionParams {
        self.params
    }

    pub fn quadrature(&self) -> &MeasureQuadrature {
        &self.quad
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `c(E) = Σ_j w_j kernel(E|r_j) ψ(r_j)` at every node and atom.
    pub fn forward(&self, psi: &RadialFunction) -> Result<TransformCoefficients> {
        if psi.grid.r_nodes != self.grid.r_nodes {
            return Err(Error::InvalidInput(
                "function is not sampled on the plan's radial grid".into(),
            ));
        }
        let weighted: Vec<Complex64> = psi.values.iter().zip(&self.grid.weights).map(|(v, w)| v * w).collect();
        let n = self.grid.len();
        let apply = |matrix: &[f64]| -> Vec<Complex64> {
            matrix
                .par_chunks(n.max(1))
                .map(|row| {
                    row.iter()
                        .zip(&weighted)
                        .fold(Complex64::new(0.0, 0.0), |acc, (k, v)| acc + v * k)
                })
                .collect()
        };
        Ok(TransformCoefficients {
            quad: self.quad.clone(),
            continuum_values: apply(&self.kernel),
            atom_values: apply(&self.atom_kernel),
        })
    }

    /// `ψ(r) = Σ_i μ_i kernel(E_i|r) c_i + Σ_atoms w_b kernel(E_b|r) c_b`.
    pub fn inverse(&self, coeffs: &TransformCoefficients) -> Result<RadialFunction> {
        if coeffs.quad.e_nodes != self.quad.e_nodes || coeffs.atom_values.len() != self.quad.atoms.len() {
            return Err(Error::InvalidInput(
                "coefficients do not match the plan's quadrature".into(),
            ));
        }
        let ac: Vec<Complex64> = coeffs
            .continuum_values
            .iter()
            .zip(&coeffs.quad.e_weights)
            .map(|(c, w)| c * w)
            .collect();
        let pp: Vec<Complex64> = coeffs
            .atom_values
            .iter()
            .zip(&coeffs.quad.atoms)
            .map(|(c, a)| c * a.weight)
            .collect();
        let n = self.grid.len();
        let values = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, c) in ac.iter().enumerate() {
                    acc += c * self.kernel[i * n + j];
                }
                for (i, c) in pp.iter().enumerate() {
                    acc += c * self.atom_kernel[i * n + j];
                }
                acc
            })
            .collect();
        RadialFunction::new(self.grid.clone(), values)
    }

    /// Parseval and roundtrip defects for `psi`.
    pub fn unitarity(&self, psi: &RadialFunction) -> Result<UnitarityDefects> {
        let norm = psi.norm_sqr();
        if norm == 0.0 {
            return Err(Error::InvalidInput("unitarity defects need a nonzero function".into()));
        }
        let c = self.forward(psi)?;
        let back = self.inverse(&c)?;
        Ok(UnitarityDefects {
            parseval: (norm - c.norm_sqr()).abs() / norm,
            roundtrip: (back.distance_sqr(psi)? / norm).sqrt(),
        })
    }
}
