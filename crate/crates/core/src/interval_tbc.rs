//! Stationary transparent boundary conditions on a finite interval.
//!
//! The outward normal derivative is `-d/dx` at the left endpoint and `+d/dx`
//! at the right one. The second-order condition reads
//! `d_n phi = i sqrt(E - V) phi`; the fourth-order one adds
//! `(1/4) (d_n V / (E - V)) phi`.
//!
//! The worked problem is a particle in the harmonic well
//! `H = -(1/2) d^2/dx^2 + omega^2 x^2 / 2`, whose general solution is
//!
//! ```text
//! phi(x) = exp(-omega x^2 / 2) [ A M(1/4 - E/2w; 1/2; w x^2)
//!                              + B sqrt(w) x M(3/4 - E/2w; 3/2; w x^2) ]
//! ```
//!
//! Imposing the boundary condition at both endpoints gives a 2x2 system
//! `h(E) (A, B)^T = 0` whose determinant vanishes at the eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::quadrature::simpson;
use crate::roots::{brent, secant_real};
use crate::specfun::{kummer_m, sqrt_e_minus_v, KummerParams};
use crate::spectral::{SpectralResult, SpectralRoot};

/// `|E - V|` at or below which the fourth-order condition is undefined.
pub const BRANCH_GUARD: f64 = 1e-12;
/// Scaled determinant below which a candidate energy is accepted.
pub const ROOT_ACCEPT: f64 = 1e-10;

/// `d_n phi - i sqrt(E - V0) phi`.
pub fn tbc_residual_order2(e: f64, v0: f64, phi: Complex64, dphi_normal: Complex64) -> Complex64 {
    dphi_normal - Complex64::i() * sqrt_e_minus_v(e, v0) * phi
}

/// `d_n phi - i sqrt(E - V0) phi - (1/4) (d_n V / (E - V0)) phi`.
pub fn tbc_residual_order4(
    e: f64,
    v0: f64,
    dv_normal: f64,
    phi: Complex64,
    dphi_normal: Complex64,
) -> Result<Complex64> {
    let gap = e - v0;
    if gap.abs() <= BRANCH_GUARD {
        return Err(Error::BranchPoint { gap: gap.abs() });
    }
    Ok(tbc_residual_order2(e, v0, phi, dphi_normal) - 0.25 * dv_normal / gap * phi)
}

/// Harmonic oscillator confined to `[x_left, x_right]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorProblem {
    pub omega: f64,
    pub x_left: f64,
    pub x_right: f64,
}

impl OscillatorProblem {
    pub fn new(omega: f64, x_left: f64, x_right: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !(x_left.is_finite() && x_right.is_finite() && x_left < x_right) {
            return Err(Error::InvalidParameter(format!(
                "interval must satisfy x_left < x_right, got [{x_left}, {x_right}]"
            )));
        }
        Ok(Self {
            omega,
            x_left,
            x_right,
        })
    }

    /// `V(x) = omega^2 x^2 / 2`.
    pub fn potential(&self, x: f64) -> f64 {
        0.5 * self.omega * self.omega * x * x
    }

    /// Exact whole-line levels `omega (n + 1/2)`, `n = 0, 1, ...`.
    pub fn free_level(&self, n: usize) -> f64 {
        self.omega * (n as f64 + 0.5)
    }
}

/// The 2x2 matrix `h(E)`; row 1 belongs to `x_left`, row 2 to `x_right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularMatrix {
    pub entries: [[Complex64; 2]; 2],
    pub energy: f64,
}

impl SecularMatrix {
    pub fn det(&self) -> Complex64 {
        let h = &self.entries;
        h[0][0] * h[1][1] - h[0][1] * h[1][0]
    }

    /// `max(|h11 h22|, |h12 h21|)`, the size of the two determinant terms.
    pub fn scale(&self) -> f64 {
        let h = &self.entries;
        (h[0][0] * h[1][1]).norm().max((h[0][1] * h[1][0]).norm())
    }

    /// `|det| / scale`, or zero for the zero matrix.
    pub fn scaled_residual(&self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            0.0
        } else {
            self.det().norm() / s
        }
    }

    /// Singular values (largest first) and the right singular vector of the
    /// smallest one, from the closed-form eigen-decomposition of `h^H h`.
    pub fn smallest_singular_direction(&self) -> (f64, f64, [Complex64; 2]) {
        let h = &self.entries;
        let g11 = h[0][0].norm_sqr() + h[1][0].norm_sqr();
        let g22 = h[0][1].norm_sqr() + h[1][1].norm_sqr();
        let g12 = h[0][0].conj() * h[0][1] + h[1][0].conj() * h[1][1];
        let tr = g11 + g22;
        let disc = ((g11 - g22).powi(2) + 4.0 * g12.norm_sqr()).sqrt();
        let lmax = 0.5 * (tr + disc);
        let lmin = if lmax > 0.0 {
            self.det().norm_sqr() / lmax
        } else {
            0.0
        };
        let v1 = [g12, Complex64::from(lmin - g11)];
        let v2 = [Complex64::from(lmin - g22), g12.conj()];
        let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
        let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
        let v = if n1 == 0.0 && n2 == 0.0 {
            [Complex64::from(1.0), Complex64::from(0.0)]
        } else if n1 >= n2 {
            [v1[0] / n1, v1[1] / n1]
        } else {
            [v2[0] / n2, v2[1] / n2]
        };
        (lmax.sqrt(), lmin.sqrt(), v)
    }
}

fn m(a: f64, b: f64, z: f64) -> Result<f64> {
    kummer_m(KummerParams::new(a, b, z)?)
}

/// One row of `h(E)` for the endpoint `x`.
fn endpoint_row(p: &OscillatorProblem, e: f64, x: f64) -> Result<[Complex64; 2]> {
    let w = p.omega;
    let z = w * x * x;
    let a_even = 0.25 - e / (2.0 * w);
    let a_odd = 0.75 - e / (2.0 * w);
    let i_sqrt = Complex64::i() * sqrt_e_minus_v(e, p.potential(x));

    let even = -(w * x + i_sqrt) * m(a_even, 0.5, z)? + (0.5 - e / w) * m(a_even + 1.0, 1.5, z)?;
    let odd = -(w * x * x - 1.0 + x * i_sqrt) * m(a_odd, 1.5, z)?
        + x * x * (0.5 - e / (3.0 * w)) * m(a_odd + 1.0, 2.5, z)?;
    Ok([even, odd])
}

/// Evaluates `h(E)`.
pub fn secular_matrix(p: &OscillatorProblem, e: f64) -> Result<SecularMatrix> {
    if !e.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "energy must be finite, got {e}"
        )));
    }
    Ok(SecularMatrix {
        entries: [
            endpoint_row(p, e, p.x_left)?,
            endpoint_row(p, e, p.x_right)?,
        ],
        energy: e,
    })
}

/// `det h(E) = h11 h22 - h12 h21`.
pub fn secular_det(p: &OscillatorProblem, e: f64) -> Result<Complex64> {
    Ok(secular_matrix(p, e)?.det())
}

/// All real roots of `det h(E)` in `(0, e_max)`.
///
/// The energy axis is sampled on `n_grid` uniform cells. Sign changes of the
/// real part (where the determinant is real) are refined by Brent's method;
/// local minima of `|det| / scale` are refined by a real-restricted secant.
/// A candidate is kept when its scaled residual is below [`ROOT_ACCEPT`], or
/// when the determinant is real and changes sign within a few ulps of it.
/// The reported residual is always the scaled residual.
pub fn find_eigenvalues_interval(
    p: &OscillatorProblem,
    e_max: f64,
    n_grid: usize,
) -> Result<SpectralResult> {
    if !(e_max.is_finite() && e_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "e_max must be positive, got {e_max}"
        )));
    }
    if n_grid < 100 {
        return Err(Error::InvalidParameter(format!(
            "n_grid must be at least 100, got {n_grid}"
        )));
    }
    let grid: Vec<f64> = (0..=n_grid)
        .map(|k| e_max * k as f64 / n_grid as f64)
        .collect();
    let mats = grid
        .iter()
        .map(|&e| secular_matrix(p, e))
        .collect::<Result<Vec<_>>>()?;
    let dets: Vec<Complex64> = mats.iter().map(SecularMatrix::det).collect();
    let scaled: Vec<f64> = mats.iter().map(SecularMatrix::scaled_residual).collect();

    let is_real = |d: Complex64| d.im.abs() <= 1e-12 * d.norm();
    let re_det = |e: f64| secular_det(p, e).map(|d| d.re);
    let mut result = SpectralResult::default();
    let mut accept = |e: f64, bracket: (f64, f64)| -> Result<()> {
        if !(e > 0.0 && e < e_max) {
            return Ok(());
        }
        let residual = secular_matrix(p, e)?.scaled_residual();
        if residual < ROOT_ACCEPT || sign_change_at_ulp_scale(p, e)? {
            result.roots.push(SpectralRoot {
                value: e,
                residual,
                bracket,
                multiplicity: 1,
                degenerate: false,
            });
        }
        Ok(())
    };

    for k in 0..n_grid {
        let (d0, d1) = (dets[k], dets[k + 1]);
        if is_real(d0) && is_real(d1) && d0.re != 0.0 && d0.re.signum() != d1.re.signum() {
            let e = brent(re_det, grid[k], grid[k + 1], 1e-15, 200)?;
            accept(e, (grid[k], grid[k + 1]))?;
        }
    }
    for k in 1..n_grid {
        if scaled[k] < scaled[k - 1] && scaled[k] <= scaled[k + 1] {
            let det = |e: f64| secular_det(p, e);
            match secant_real(det, grid[k], grid[k + 1], 1e-15, 100) {
                Ok(e) if e >= grid[k - 1] && e <= grid[k + 1] => {
                    accept(e, (grid[k - 1], grid[k + 1]))?
                }
                Ok(_) | Err(Error::NonConvergence(_)) => {}
                Err(other) => return Err(other),
            }
        }
    }
    result.sort_and_dedup(1e-9);
    Ok(result)
}

/// Whether the real determinant changes sign within a few ulps of `e`.
///
/// Near the low levels `det h` is so steep that even the closest float to
/// the root leaves `|det| / scale` around 1e-6; such a root is accepted when
/// it is pinned down to machine precision instead.
fn sign_change_at_ulp_scale(p: &OscillatorProblem, e: f64) -> Result<bool> {
    let d = 4.0 * f64::EPSILON * e.abs().max(f64::MIN_POSITIVE);
    let lo = secular_det(p, e - d)?;
    let hi = secular_det(p, e + d)?;
    let real = |z: Complex64| z.im.abs() <= 1e-12 * z.norm();
    Ok(real(lo) && real(hi) && lo.re * hi.re <= 0.0)
}

/// Sampled eigenfunction of the confined oscillator.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalEigenfunction {
    pub energy: f64,
    /// Coefficients of the even and odd Kummer branches after normalization.
    pub a: Complex64,
    pub b: Complex64,
    pub x: Vec<f64>,
    pub phi: Vec<Complex64>,
    /// Singular values of `h(E)`, largest first.
    pub singular_values: (f64, f64),
}

impl IntervalEigenfunction {
    pub fn max_abs(&self) -> f64 {
        self.phi.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `int |phi|^2 dx` by composite Simpson over the samples.
    pub fn quadrature_norm(&self) -> f64 {
        let h = self.x[1] - self.x[0];
        let dens: Vec<f64> = self.phi.iter().map(|v| v.norm_sqr()).collect();
        simpson(&dens, h)
    }
}

/// Value and first derivative of `phi` for given branch coefficients.
pub fn oscillator_solution(
    p: &OscillatorProblem,
    e: f64,
    a: Complex64,
    b: Complex64,
    x: f64,
) -> Result<(Complex64, Complex64)> {
    let w = p.omega;
    let z = w * x * x;
    let a_even = 0.25 - e / (2.0 * w);
    let a_odd = 0.75 - e / (2.0 * w);
    let gauss = (-0.5 * z).exp();
    let sw = w.sqrt();

    let m_even = m(a_even, 0.5, z)?;
    let m_odd = m(a_odd, 1.5, z)?;
    let even = gauss * m_even;
    let odd = gauss * sw * x * m_odd;
    // d/dx M(a; b; w x^2) = 2 w x (a / b) M(a + 1; b + 1; w x^2)
    let d_even = gauss * x * (-w * m_even + 4.0 * w * a_even * m(a_even + 1.0, 1.5, z)?);
    let d_odd =
        gauss * sw * ((1.0 - z) * m_odd + 4.0 * w * a_odd / 3.0 * x * x * m(a_odd + 1.0, 2.5, z)?);
    Ok((a * even + b * odd, a * d_even + b * d_odd))
}

/// Eigenfunction at a root of `det h`, normalized to unit `L^2` norm on the
/// interval and sampled at `n_samples` uniform points.
pub fn eigenfunction_interval(
    p: &OscillatorProblem,
    e: f64,
    n_samples: usize,
) -> Result<IntervalEigenfunction> {
    if n_samples < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 samples, got {n_samples}"
        )));
    }
    let h = secular_matrix(p, e)?;
    let (smax, smin, v) = h.smallest_singular_direction();
    if smax - smin <= 1e-6 * smax || smax == 0.0 {
        return Err(Error::DegenerateNullspace(smax, smin));
    }
    let step = (p.x_right - p.x_left) / (n_samples - 1) as f64;
    let x: Vec<f64> = (0..n_samples)
        .map(|i| {
            if i + 1 == n_samples {
                p.x_right
            } else {
                p.x_left + i as f64 * step
            }
        })
        .collect();
    let raw = x
        .iter()
        .map(|&xi| oscillator_solution(p, e, v[0], v[1], xi).map(|(phi, _)| phi))
        .collect::<Result<Vec<_>>>()?;
    let dens: Vec<f64> = raw.iter().map(|c| c.norm_sqr()).collect();
    let norm = simpson(&dens, step).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::NonConvergence(format!(
            "eigenfunction at E = {e} has norm {norm}"
        )));
    }
    // rotate so the peak sample is real and positive
    let peak = raw
        .iter()
        .copied()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).expect("finite samples"))
        .expect("non-empty grid");
    let factor = peak.conj() / (peak.norm() * norm);
    Ok(IntervalEigenfunction {
        energy: e,
        a: v[0] * factor,
        b: v[1] * factor,
        phi: raw.iter().map(|c| c * factor).collect(),
        x,
        singular_values: (smax, smin),
    })
}

/// Order of the boundary condition recovered on the selected bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbcOrder {
    Second,
    Fourth,
}

/// Outcome of [`vertex_transparency_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexTransparency {
    /// `sum_{j != i} alpha_i^2 / alpha_j^2 - 1`.
    pub residual: f64,
    /// Highest-order condition the reduction supports.
    pub order: TbcOrder,
}

/// How far the Kirchhoff rule, with the other bonds closed by their own
/// transparent conditions, is from the single-bond condition on bond `i`.
///
/// Requires equal vertex potentials on all bonds. With opposite vertex slopes
/// (`V_j'(0) = -V_i'(0)`) the fourth-order condition carries over; otherwise
/// only the second-order one does.
pub fn vertex_transparency_residual(
    g: &StarGraph,
    e: f64,
    bond: usize,
) -> Result<VertexTransparency> {
    let i = g.bond_index(bond)?;
    let pots = g.potentials();
    let vi = pots[i].value(0.0);
    let dvi = pots[i].derivative(0.0);
    let tol = 1e-12 * vi.abs().max(1.0);
    if let Some(j) = pots.iter().position(|p| (p.value(0.0) - vi).abs() > tol) {
        return Err(Error::AssumptionViolated(format!(
            "V_{}(0) = {} differs from V_{bond}(0) = {vi}",
            j + 1,
            pots[j].value(0.0)
        )));
    }
    let slopes_opposite = pots
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .all(|(_, p)| (p.derivative(0.0) + dvi).abs() <= 1e-12 * dvi.abs().max(1.0));
    let order = if slopes_opposite && (e - vi).abs() > BRANCH_GUARD {
        TbcOrder::Fourth
    } else {
        TbcOrder::Second
    };

    let a = g.alphas();
    let ai2 = a[i] * a[i];
    let mut sum = 0.0;
    for (j, &aj) in a.iter().enumerate() {
        if j != i {
            sum += ai2 / (aj * aj);
        }
    }
    Ok(VertexTransparency {
        residual: sum - 1.0,
        order,
    })
}
