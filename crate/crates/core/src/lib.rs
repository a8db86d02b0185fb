//! Spectral and scattering computations for driven quantum star graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Kummer's confluent hypergeometric function `M(a; b; z)` and
//!   the principal-branch square root `sqrt(E - V)` used by every other module.
//! - [`graph`]: the [`StarGraph`] data model, bond potentials and the vertex
//!   transparency sum rules.
//! - [`scattering`]: rows of the vertex scattering matrix, in closed form and
//!   through an independent linear solve of the matching conditions.
//! - [`interval_tbc`]: stationary transparent boundary conditions on an
//!   interval and the confined harmonic oscillator secular problem.
//! - [`star_spectrum`]: eigenvalues and normalized eigenfunctions of a finite
//!   star graph with Dirichlet outer vertices.

pub mod error;
pub mod graph;
pub mod interval_tbc;
pub mod quadrature;
pub mod roots;
pub mod scattering;
pub mod specfun;
pub mod spectral;
pub mod star_spectrum;

pub use error::{Error, Result};
pub use graph::{BondLength, GraphFile, PotentialSpec, StarGraph};
pub use interval_tbc::{OscillatorProblem, SecularMatrix};
pub use scattering::ScatteringRow;
pub use spectral::{SpectralResult, SpectralRoot};
pub use star_spectrum::EigenfunctionSample;

pub use num_complex::Complex64;
