//! Special functions shared by the interval and graph solvers.

mod kummer;

pub use kummer::{kummer_m, kummer_m_derivative, kummer_m_detailed, KummerEval, KummerParams};

use num_complex::Complex64;

/// Principal square root of the real number `e - v`.
///
/// Positive real above the turning point, `i * sqrt(v - e)` below it, and
/// exactly zero at `e == v`. Real and imaginary parts are never negative.
pub fn sqrt_e_minus_v(e: f64, v: f64) -> Complex64 {
    let d = e - v;
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}
