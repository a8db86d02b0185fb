//! Spectrum of a finite star graph with weighted vertex conditions at the
//! centre and Dirichlet conditions at the outer ends.
//!
//! On bond `j` an eigenfunction with wavenumber `k` is
//! `psi_j(x) = C sin(k (L_j - x)) / (alpha_j sin(k L_j))`, and the Kirchhoff
//! rule turns into the secular equation `sum_j 1 / (alpha_j^2 tan(k L_j)) = 0`.
//! Root bracketing uses the pole-free product form
//! `F(k) = sum_j alpha_j^-2 cos(k L_j) prod_{l != j} sin(k L_l)`.

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::quadrature::{adaptive_simpson, simpson};
use crate::roots::brent;
use crate::spectral::{SpectralResult, SpectralRoot};

/// Wavenumbers at or below this are not reported (`k = 0` is trivial).
pub const K_MIN_CUTOFF: f64 = 1e-8;
/// `|sin(k L_j)|` below which the secular function has a pole.
pub const POLE_GUARD: f64 = 1e-12;
/// `|sin(k L_j)|` below which a root is treated as degenerate.
pub const DEGENERACY_GUARD: f64 = 1e-10;
/// Acceptance threshold on `|F(k)| / |F'(k)|`.
pub const ROOT_ACCEPT: f64 = 1e-10;

fn finite_undriven_lengths(g: &StarGraph) -> Result<Vec<f64>> {
    let lengths = g.finite_lengths().ok_or_else(|| {
        Error::Unsupported("spectrum needs every bond to have a finite length".into())
    })?;
    if !g.is_undriven() {
        return Err(Error::Unsupported(
            "spectra are only computed for bonds without potential".into(),
        ));
    }
    Ok(lengths)
}

/// `sum_j 1 / (alpha_j^2 tan(k L_j))`.
pub fn secular_function(g: &StarGraph, k: f64) -> Result<f64> {
    let lengths = finite_undriven_lengths(g)?;
    let mut sum = 0.0;
    for (j, (&l, &a)) in lengths.iter().zip(g.alphas()).enumerate() {
        let (s, c) = (k * l).sin_cos();
        if s.abs() < POLE_GUARD {
            return Err(Error::Pole { k, bond: j + 1 });
        }
        sum += c / (a * a * s);
    }
    Ok(sum)
}

/// Pole-free secular function `F(k)`.
pub fn secular_entire(g: &StarGraph, k: f64) -> Result<f64> {
    let lengths = finite_undriven_lengths(g)?;
    Ok(entire(&lengths, g.alphas(), k))
}

fn entire(lengths: &[f64], alphas: &[f64], k: f64) -> f64 {
    let sc: Vec<(f64, f64)> = lengths.iter().map(|l| (k * l).sin_cos()).collect();
    let mut total = 0.0;
    for (j, &a) in alphas.iter().enumerate() {
        let mut term = sc[j].1 / (a * a);
        for (l, &(s, _)) in sc.iter().enumerate() {
            if l != j {
                term *= s;
            }
        }
        total += term;
    }
    total
}

fn entire_derivative(lengths: &[f64], alphas: &[f64], k: f64) -> f64 {
    let sc: Vec<(f64, f64)> = lengths.iter().map(|l| (k * l).sin_cos()).collect();
    let n = lengths.len();
    let mut total = 0.0;
    for j in 0..n {
        let w = 1.0 / (alphas[j] * alphas[j]);
        // derivative of cos(k L_j)
        let mut t = -lengths[j] * sc[j].0;
        for (l, &(s, _)) in sc.iter().enumerate() {
            if l != j {
                t *= s;
            }
        }
        total += w * t;
        // derivative of each sine factor
        for m in (0..n).filter(|&m| m != j) {
            let mut t = sc[j].1 * lengths[m] * sc[m].1;
            for (l, &(s, _)) in sc.iter().enumerate() {
                if l != j && l != m {
                    t *= s;
                }
            }
            total += w * t;
        }
    }
    total
}

/// Eigenvalues `k_n` in `(K_MIN_CUTOFF, k_max]`.
///
/// Sign changes of `F` on `n_grid` uniform cells are refined by Brent's
/// method to `|dk| < 1e-12` and cross-checked against the secular function.
/// Wavenumbers where two or more bonds have `sin(k L_j) = 0` are exact
/// eigenvalues of multiplicity (count - 1); they are reported with the
/// `degenerate` flag, since the closed-form eigenfunction does not apply.
pub fn find_k_eigenvalues(g: &StarGraph, k_max: f64, n_grid: usize) -> Result<SpectralResult> {
    let lengths = finite_undriven_lengths(g)?;
    let alphas = g.alphas();
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "k_max must be positive, got {k_max}"
        )));
    }
    if n_grid < 10 {
        return Err(Error::InvalidParameter(format!(
            "n_grid must be at least 10, got {n_grid}"
        )));
    }
    let mut result = SpectralResult::default();
    if k_max <= K_MIN_CUTOFF {
        return Ok(result);
    }

    let step = (k_max - K_MIN_CUTOFF) / n_grid as f64;
    let grid: Vec<f64> = (0..=n_grid)
        .map(|i| {
            if i == n_grid {
                k_max
            } else {
                K_MIN_CUTOFF + i as f64 * step
            }
        })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&k| entire(&lengths, alphas, k)).collect();

    let bound: f64 =
        alphas.iter().map(|a| 1.0 / (a * a)).sum::<f64>() * lengths.iter().sum::<f64>();
    let mut candidates = Vec::new();
    for i in 0..n_grid {
        if vals[i] == 0.0 && i > 0 {
            candidates.push((grid[i], (grid[i - 1], grid[i + 1])));
        } else if vals[i] * vals[i + 1] < 0.0 {
            let k = brent(
                |k| Ok(entire(&lengths, alphas, k)),
                grid[i],
                grid[i + 1],
                1e-13,
                200,
            )?;
            candidates.push((k, (grid[i], grid[i + 1])));
        }
    }

    for (k, bracket) in candidates {
        let vanishing = lengths
            .iter()
            .filter(|&&l| (k * l).sin().abs() < DEGENERACY_GUARD)
            .count();
        if vanishing > 0 {
            // odd-order zero at a common sine zero; recorded below
            continue;
        }
        let f = secular_function(g, k)?;
        let terms: f64 = lengths
            .iter()
            .zip(alphas)
            .map(|(&l, &a)| 1.0 / (a * a * (k * l).sin().abs()))
            .sum();
        if f.abs() > 1e-8 * terms {
            return Err(Error::NonConvergence(format!(
                "bracketed root k = {k} leaves secular function {f:e} (scale {terms:e})"
            )));
        }
        let residual = entire(&lengths, alphas, k).abs()
            / entire_derivative(&lengths, alphas, k)
                .abs()
                .max(f64::MIN_POSITIVE);
        if residual >= ROOT_ACCEPT {
            return Err(Error::NonConvergence(format!(
                "root k = {k} has residual {residual:e}"
            )));
        }
        result.roots.push(SpectralRoot {
            value: k,
            residual,
            bracket,
            multiplicity: 1,
            degenerate: false,
        });
    }

    for (j, &lj) in lengths.iter().enumerate() {
        let mut m = 1usize;
        loop {
            let k = m as f64 * std::f64::consts::PI / lj;
            if k > k_max {
                break;
            }
            m += 1;
            if k <= K_MIN_CUTOFF {
                continue;
            }
            let zeros: Vec<usize> = lengths
                .iter()
                .enumerate()
                .filter(|&(_, &l)| (k * l).sin().abs() < DEGENERACY_GUARD)
                .map(|(l, _)| l)
                .collect();
            // report each coincidence once, from its lowest-numbered bond
            if zeros.len() >= 2 && zeros[0] == j {
                result.roots.push(SpectralRoot {
                    value: k,
                    residual: entire(&lengths, alphas, k).abs() / bound,
                    bracket: (k, k),
                    multiplicity: zeros.len() - 1,
                    degenerate: true,
                });
            }
        }
    }

    result.sort_and_dedup(1e-10);
    Ok(result)
}

/// Ways of computing the normalization constant `C_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationReport {
    /// From adaptive quadrature of `sum_j int |psi_j|^2`.
    pub quadrature: f64,
    /// `sqrt(2) (sum_j (L_j - sin(2 k L_j)/(2k)) / (alpha_j^2 sin^2(k L_j)))^{-1/2}`.
    pub closed_form: f64,
    /// The same expression with `L_j + sin(2 k L_j)` in the numerator, as it
    /// is sometimes printed. Diagnostic only: it matches the other two only
    /// where `sum_j cot(k L_j) / alpha_j^2 = 0`.
    pub printed_formula: f64,
}

impl NormalizationReport {
    pub fn closed_form_deviation(&self) -> f64 {
        (self.quadrature - self.closed_form).abs()
    }

    pub fn printed_formula_deviation(&self) -> f64 {
        (self.quadrature - self.printed_formula).abs()
    }
}

fn check_nondegenerate(lengths: &[f64], k: f64) -> Result<()> {
    for (j, &l) in lengths.iter().enumerate() {
        if (k * l).sin().abs() <= DEGENERACY_GUARD {
            return Err(Error::DegenerateRoot {
                value: k,
                reason: format!("sin(k L_{}) vanishes", j + 1),
            });
        }
    }
    Ok(())
}

/// All three normalization constants at `k`.
pub fn normalization_report(g: &StarGraph, k: f64) -> Result<NormalizationReport> {
    let lengths = finite_undriven_lengths(g)?;
    check_nondegenerate(&lengths, k)?;
    let mut integral = 0.0;
    let mut closed = 0.0;
    let mut printed = 0.0;
    for (&l, &a) in lengths.iter().zip(g.alphas()) {
        let s = (k * l).sin();
        let w = 1.0 / (a * a * s * s);
        integral += w * adaptive_simpson(|x| (k * (l - x)).sin().powi(2), 0.0, l, 1e-14 * l)?;
        closed += w * (l - (2.0 * k * l).sin() / (2.0 * k));
        printed += w * (l + (2.0 * k * l).sin());
    }
    Ok(NormalizationReport {
        quadrature: integral.sqrt().recip(),
        closed_form: std::f64::consts::SQRT_2 / closed.sqrt(),
        printed_formula: if printed > 0.0 {
            std::f64::consts::SQRT_2 / printed.sqrt()
        } else {
            f64::NAN
        },
    })
}

/// `C_n` making the eigenfunction at `k` have unit total norm. The quadrature
/// value is returned after it has been checked against the closed form.
pub fn normalization_constant(g: &StarGraph, k: f64) -> Result<f64> {
    let r = normalization_report(g, k)?;
    if r.closed_form_deviation() > 1e-9 * r.closed_form {
        return Err(Error::NonConvergence(format!(
            "quadrature C = {} disagrees with closed form {}",
            r.quadrature, r.closed_form
        )));
    }
    Ok(r.quadrature)
}

/// Samples of one bond's eigenfunction on a uniform grid over `[0, L_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BondSamples {
    pub length: f64,
    pub alpha: f64,
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    /// `psi_j'(0)`.
    pub vertex_slope: f64,
}

/// Normalized eigenfunction of the star graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionSample {
    pub k: f64,
    pub normalization: f64,
    pub bonds: Vec<BondSamples>,
}

impl EigenfunctionSample {
    /// Largest `|psi_j(L_j)|`.
    pub fn dirichlet_residual(&self) -> f64 {
        self.bonds
            .iter()
            .map(|b| b.psi.last().copied().unwrap_or(0.0).abs())
            .fold(0.0, f64::max)
    }

    /// Spread of `alpha_j psi_j(0)` across bonds.
    pub fn continuity_spread(&self) -> f64 {
        let vals: Vec<f64> = self.bonds.iter().map(|b| b.alpha * b.psi[0]).collect();
        let max = vals.iter().copied().fold(f64::MIN, f64::max);
        let min = vals.iter().copied().fold(f64::MAX, f64::min);
        max - min
    }

    /// `|sum_j psi_j'(0)/alpha_j| / sum_j |psi_j'(0)/alpha_j|`.
    pub fn kirchhoff_residual(&self) -> f64 {
        let (sum, abs) = self.bonds.iter().fold((0.0, 0.0), |(s, a), b| {
            let t = b.vertex_slope / b.alpha;
            (s + t, a + t.abs())
        });
        if abs == 0.0 {
            0.0
        } else {
            sum.abs() / abs
        }
    }

    /// `sum_j int_0^{L_j} psi_j^2 dx` by composite Simpson over the samples.
    pub fn quadrature_norm(&self) -> f64 {
        self.bonds
            .iter()
            .map(|b| {
                let h = b.length / (b.x.len() - 1) as f64;
                let dens: Vec<f64> = b.psi.iter().map(|v| v * v).collect();
                simpson(&dens, h)
            })
            .sum()
    }
}

/// Samples the normalized eigenfunction at the eigenvalue `k` on every bond.
pub fn eigenfunction_star(
    g: &StarGraph,
    k: f64,
    samples_per_bond: usize,
) -> Result<EigenfunctionSample> {
    let lengths = finite_undriven_lengths(g)?;
    if samples_per_bond < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 samples per bond, got {samples_per_bond}"
        )));
    }
    check_nondegenerate(&lengths, k)?;
    let c = normalization_constant(g, k)?;

    let mut bonds = Vec::with_capacity(lengths.len());
    for (&l, &a) in lengths.iter().zip(g.alphas()) {
        let (s, co) = (k * l).sin_cos();
        let amp = c / (a * s);
        let h = l / (samples_per_bond - 1) as f64;
        let x: Vec<f64> = (0..samples_per_bond)
            .map(|i| {
                if i + 1 == samples_per_bond {
                    l
                } else {
                    i as f64 * h
                }
            })
            .collect();
        let psi = x.iter().map(|&xi| amp * (k * (l - xi)).sin()).collect();
        bonds.push(BondSamples {
            length: l,
            alpha: a,
            x,
            psi,
            vertex_slope: -amp * k * co,
        });
    }
    let sample = EigenfunctionSample {
        k,
        normalization: c,
        bonds,
    };
    if sample.kirchhoff_residual() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} is not an eigenvalue (Kirchhoff residual {:e})",
            sample.kirchhoff_residual()
        )));
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PotentialSpec;
    use std::f64::consts::PI;

    fn three_bond() -> StarGraph {
        StarGraph::undriven(&[5.1, 4.3, 3.5], &[2.4, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn secular_function_vanishes_at_first_level() {
        let f = secular_function(&three_bond(), 0.34519971576497).unwrap();
        assert!(f.abs() < 1e-9, "{f}");
    }

    #[test]
    fn secular_function_nonzero_between_levels() {
        let g = three_bond();
        let f = secular_function(&g, 0.5).unwrap();
        // each term by hand
        let direct: f64 = [(5.1, 2.4), (4.3, 3.0), (3.5, 4.0)]
            .iter()
            .map(|&(l, a): &(f64, f64)| 1.0 / (a * a * (0.5 * l).tan()))
            .sum();
        assert!((f - direct).abs() < 1e-14);
        assert!(f < -0.1);
    }

    #[test]
    fn secular_function_pole() {
        let g = three_bond();
        assert!(matches!(
            secular_function(&g, PI / 4.3),
            Err(Error::Pole { bond: 2, .. })
        ));
    }

    #[test]
    fn equal_bonds_analytic_zeros() {
        let g = StarGraph::undriven(&[2.0; 3], &[1.5; 3]).unwrap();
        for m in 1..4 {
            let k = (m as f64 - 0.5) * PI / 2.0;
            assert!(secular_function(&g, k).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn entire_form_has_no_root_at_single_sine_zero() {
        let g = three_bond();
        let k = PI / 5.1;
        let f = secular_entire(&g, k).unwrap();
        let expect = (k * 5.1).cos() / (2.4 * 2.4) * (k * 4.3).sin() * (k * 3.5).sin();
        assert!((f - expect).abs() < 1e-15);
        assert!(f.abs() > 1e-2);
        assert_eq!(secular_entire(&g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let g = three_bond();
        let l = g.finite_lengths().unwrap();
        for k in [0.2, 0.9, 3.3] {
            let h = 1e-6;
            let fd = (entire(&l, g.alphas(), k + h) - entire(&l, g.alphas(), k - h)) / (2.0 * h);
            assert!((entire_derivative(&l, g.alphas(), k) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn equal_unit_bonds_with_degenerate_family() {
        let g = StarGraph::undriven(&[1.0; 3], &[1.0; 3]).unwrap();
        let res = find_k_eigenvalues(&g, 5.0, 500).unwrap();
        let ev = res.eigenvalues();
        assert_eq!(ev.len(), 3, "{ev:?}");
        assert!((ev[0] - PI / 2.0).abs() < 1e-12);
        assert!((ev[1] - PI).abs() < 1e-12);
        assert!((ev[2] - 1.5 * PI).abs() < 1e-12);
        assert!(!res.roots[0].degenerate && res.roots[1].degenerate);
        assert_eq!(res.roots[1].multiplicity, 2);
        assert_eq!(res.count_with_multiplicity(), 4);
        assert!(eigenfunction_star(&g, PI, 11).is_err());
    }

    #[test]
    fn four_equal_bonds_odd_order_degeneracy_is_not_double_counted() {
        let g = StarGraph::undriven(&[1.0; 4], &[1.0; 4]).unwrap();
        let res = find_k_eigenvalues(&g, 5.0, 500).unwrap();
        let ev = res.eigenvalues();
        assert_eq!(ev.len(), 3, "{ev:?}");
        assert!(res.roots[1].degenerate);
        assert_eq!(res.roots[1].multiplicity, 3);
    }

    #[test]
    fn below_first_level_is_empty() {
        assert!(find_k_eigenvalues(&three_bond(), 0.3, 100)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rejects_driven_or_unbounded() {
        let g = StarGraph::leads(&[1.0, 1.0], &[PotentialSpec::Zero; 2]).unwrap();
        assert!(matches!(
            find_k_eigenvalues(&g, 1.0, 100),
            Err(Error::Unsupported(_))
        ));
        let g = crate::graph::build_star(
            vec![crate::BondLength::Finite(1.0); 2],
            vec![1.0, 1.0],
            vec![PotentialSpec::Zero, PotentialSpec::Constant { value: 1.0 }],
        )
        .unwrap();
        assert!(matches!(
            secular_function(&g, 1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn normalization_equal_bonds_quarter_wave() {
        let l = 1.7;
        let g = StarGraph::undriven(&[l; 3], &[1.0; 3]).unwrap();
        let k = PI / (2.0 * l);
        let c = normalization_constant(&g, k).unwrap();
        let expect = 2f64.sqrt() / (3.0 * l).sqrt();
        assert!((c - expect).abs() < 1e-12);
        assert!(c > 0.0);
    }

    #[test]
    fn normalization_quadrature_matches_closed_form() {
        let r = normalization_report(&three_bond(), 0.34519971576497).unwrap();
        assert!(r.closed_form_deviation() < 1e-9);
        // the sin(2kL) terms sum to 2 f(k), so both forms agree on roots only
        assert!(r.printed_formula_deviation() < 1e-12);
        let off = normalization_report(&three_bond(), 0.5).unwrap();
        assert!(off.closed_form_deviation() < 1e-9);
        assert!(off.printed_formula_deviation() > 1e-3);
    }

    #[test]
    fn eigenfunction_refuses_non_eigenvalue() {
        assert!(matches!(
            eigenfunction_star(&three_bond(), 0.5, 101),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            eigenfunction_star(&three_bond(), PI / 5.1, 101),
            Err(Error::DegenerateRoot { .. })
        ));
    }
}
