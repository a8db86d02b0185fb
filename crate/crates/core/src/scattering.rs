//! Vertex scattering at the centre of a star graph with semi-infinite leads.
//!
//! A wave `e^{-i kappa_i x}` arrives on bond `i` and leaves on every bond
//! `j` as `sigma_ij e^{i kappa_j x}`, with `kappa_j = sqrt(k^2 - V_j(0))`.
//! Only the potential values at the vertex enter the matching conditions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::StarGraph;

/// One row `sigma_{i, .}` of the vertex scattering matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringRow {
    /// 1-based index of the bond carrying the incoming wave.
    pub incoming_bond: usize,
    pub k: f64,
    pub amplitudes: Vec<Complex64>,
    /// Local wavenumbers `kappa_j` at the vertex.
    pub local_wavenumbers: Vec<f64>,
    /// Whether any bond carries a non-zero potential.
    pub driven: bool,
}

impl ScatteringRow {
    pub fn reflection(&self) -> Complex64 {
        self.amplitudes[self.incoming_bond - 1]
    }

    /// `sum_j |sigma_ij|^2`; equals one for undriven leads.
    pub fn flux_sum(&self) -> f64 {
        self.amplitudes.iter().map(|s| s.norm_sqr()).sum()
    }

    /// `sum_j (kappa_j / kappa_i) |sigma_ij|^2`, the probability current
    /// balance when the vertex potentials differ.
    pub fn weighted_flux_sum(&self) -> f64 {
        let ki = self.local_wavenumbers[self.incoming_bond - 1];
        self.amplitudes
            .iter()
            .zip(&self.local_wavenumbers)
            .map(|(s, kj)| kj / ki * s.norm_sqr())
            .sum()
    }

    /// Largest componentwise distance to another row.
    pub fn max_deviation(&self, other: &ScatteringRow) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `|sigma_ii|^2`.
pub fn reflection_probability(row: &ScatteringRow) -> f64 {
    row.reflection().norm_sqr()
}

fn local_wavenumbers(g: &StarGraph, k: f64) -> Result<Vec<f64>> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scattering needs a positive wavenumber, got {k}"
        )));
    }
    let k2 = k * k;
    g.vertex_potentials()
        .into_iter()
        .enumerate()
        .map(|(j, v0)| {
            if k2 > v0 {
                Ok((k2 - v0).sqrt())
            } else {
                Err(Error::Evanescent { bond: j + 1, k, v0 })
            }
        })
        .collect()
}

fn is_driven(g: &StarGraph) -> bool {
    !g.is_undriven()
}

/// Closed-form scattering row.
///
/// `sigma_ii = (1 - S) / (1 + S)` with
/// `S = sum_{j != i} (alpha_i^2 / alpha_j^2) (kappa_j / kappa_i)`, and
/// `sigma_ij = (alpha_i / alpha_j) (1 + sigma_ii)` from weighted continuity.
pub fn scattering_row_closed_form(g: &StarGraph, bond: usize, k: f64) -> Result<ScatteringRow> {
    let i = g.bond_index(bond)?;
    let kappa = local_wavenumbers(g, k)?;
    let a = g.alphas();
    let ai2 = a[i] * a[i];

    let mut s = 0.0;
    for j in (0..g.n_bonds()).filter(|&j| j != i) {
        let ratio = ai2 / (a[j] * a[j]);
        s += if kappa[j] == kappa[i] {
            ratio
        } else {
            ratio * (kappa[j] / kappa[i])
        };
    }
    let reflection = (1.0 - s) / (1.0 + s);
    let amplitudes = (0..g.n_bonds())
        .map(|j| {
            let v = if j == i {
                reflection
            } else {
                a[i] / a[j] * (1.0 + reflection)
            };
            Complex64::new(v, 0.0)
        })
        .collect();

    Ok(ScatteringRow {
        incoming_bond: bond,
        k,
        amplitudes,
        local_wavenumbers: kappa,
        driven: is_driven(g),
    })
}

/// Scattering row from a direct solve of the vertex conditions.
///
/// Unknowns are `sigma_ij`, `j = 1..N`. Rows `1..N-1` impose
/// `alpha_i psi_i(0) = alpha_j psi_j(0)` for `j != i`; the last row imposes
/// `sum_j psi_j'(0) / alpha_j = 0`.
pub fn scattering_row_oracle(g: &StarGraph, bond: usize, k: f64) -> Result<ScatteringRow> {
    let i = g.bond_index(bond)?;
    let kappa = local_wavenumbers(g, k)?;
    let a = g.alphas();
    let n = g.n_bonds();
    let iu = Complex64::i();

    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    let mut rhs = DVector::<Complex64>::zeros(n);

    // incoming part of psi_i(0) is 1
    for (row, j) in (0..n).filter(|&j| j != i).enumerate() {
        mat[(row, i)] = Complex64::from(a[i]);
        mat[(row, j)] = Complex64::from(-a[j]);
        rhs[row] = Complex64::from(-a[i]);
    }
    // d/dx of e^{-i kappa x} and e^{i kappa x} at the vertex
    for j in 0..n {
        mat[(n - 1, j)] = iu * kappa[j] / a[j];
    }
    rhs[n - 1] = iu * kappa[i] / a[i];

    let lu = mat.clone().lu();
    let sol = lu.solve(&rhs).ok_or_else(|| {
        Error::SingularSystem(format!(
            "vertex conditions are singular for bond {bond} at k = {k}"
        ))
    })?;
    let resid = (&mat * &sol - &rhs).norm();
    if !resid.is_finite() || resid > 1e-8 * (rhs.norm() + mat.norm() * sol.norm()) {
        return Err(Error::SingularSystem(format!(
            "vertex conditions are ill-conditioned for bond {bond} at k = {k}"
        )));
    }

    Ok(ScatteringRow {
        incoming_bond: bond,
        k,
        amplitudes: sol.iter().copied().collect(),
        local_wavenumbers: kappa,
        driven: is_driven(g),
    })
}
