//! Result types shared by the interval and star-graph eigenvalue solvers.

use serde::Serialize;

/// One eigenvalue with its root-finding diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralRoot {
    pub value: f64,
    /// Residual of the secular equation, scaled as documented by the solver.
    pub residual: f64,
    /// Interval that isolated the root.
    pub bracket: (f64, f64),
    /// Dimension of the eigenspace when the root is degenerate, else 1.
    pub multiplicity: usize,
    /// Set when the closed-form eigenfunction does not apply.
    pub degenerate: bool,
}

/// Ascending list of eigenvalues.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SpectralResult {
    pub roots: Vec<SpectralRoot>,
}

impl SpectralResult {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    /// Eigenvalues whose closed-form eigenfunction exists.
    pub fn simple_eigenvalues(&self) -> Vec<f64> {
        self.roots
            .iter()
            .filter(|r| !r.degenerate)
            .map(|r| r.value)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn count_with_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub(crate) fn sort_and_dedup(&mut self, tol: f64) {
        self.roots
            .sort_by(|a, b| a.value.partial_cmp(&b.value).expect("finite roots"));
        self.roots.dedup_by(|later, earlier| {
            if (later.value - earlier.value).abs() <= tol * earlier.value.abs().max(1.0) {
                // keep the degenerate record if either one is
                if later.degenerate && !earlier.degenerate {
                    std::mem::swap(later, earlier);
                }
                true
            } else {
                false
            }
        });
    }
}
