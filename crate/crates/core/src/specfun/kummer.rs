use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Hard cap on the number of series terms.
const MAX_TERMS: usize = 500;
/// Largest `|z|` accepted; no large-argument expansion is implemented.
const MAX_ABS_Z: f64 = 100.0;
/// Relative accuracy the summation has to certify.
const TARGET_REL: f64 = 1e-12;
/// Estimated error at which the f64 pass hands over to double-double.
const F64_ACCEPT_REL: f64 = 1e-13;
/// `|M| / sum |t_n|` below which the value counts as a zero of `M`. There
/// only the absolute bound `TARGET_REL * U_F64 * sum |t_n|` is required.
const NEAR_ZERO: f64 = 1e-20;

const U_F64: f64 = f64::EPSILON / 2.0;
// unit roundoff of a double-double limb pair, 2^-104
const U_DD: f64 = 4.930380657631324e-32;

/// Arguments of Kummer's function `M(a; b; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerParams {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl KummerParams {
    pub fn new(a: f64, b: f64, z: f64) -> Result<Self> {
        let p = Self { a, b, z };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.z.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Kummer arguments must be finite (a={}, b={}, z={})",
                self.a, self.b, self.z
            )));
        }
        if self.b <= 0.0 && self.b.fract() == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Kummer b = {} is a non-positive integer",
                self.b
            )));
        }
        if self.z.abs() > MAX_ABS_Z {
            return Err(Error::InvalidParameter(format!(
                "Kummer |z| = {} exceeds {MAX_ABS_Z}",
                self.z.abs()
            )));
        }
        Ok(())
    }
}

/// Value of `M(a; b; z)` together with summation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerEval {
    pub value: f64,
    /// Estimated relative error of `value`.
    pub rel_error: f64,
    /// Estimated absolute error of `value`.
    pub abs_error: f64,
    /// `sum |t_n|`.
    pub term_scale: f64,
    /// `sum |t_n| / |sum t_n|`, the cancellation factor of the series.
    pub condition: f64,
    pub terms: usize,
    /// Whether the double-double pass was needed.
    pub extended: bool,
}

/// Kummer's confluent hypergeometric function of the first kind,
/// `M(a; b; z) = sum_n (a)_n z^n / ((b)_n n!)`.
pub fn kummer_m(p: KummerParams) -> Result<f64> {
    kummer_m_detailed(p).map(|e| e.value)
}

/// `dM/dz = (a / b) M(a + 1; b + 1; z)`.
pub fn kummer_m_derivative(p: KummerParams) -> Result<f64> {
    p.validate()?;
    if p.a == 0.0 {
        return Ok(0.0);
    }
    let shifted = KummerParams::new(p.a + 1.0, p.b + 1.0, p.z)?;
    Ok(p.a / p.b * kummer_m(shifted)?)
}

/// Like [`kummer_m`] but also reports the error estimate and which
/// arithmetic produced the value.
pub fn kummer_m_detailed(p: KummerParams) -> Result<KummerEval> {
    p.validate()?;
    if p.a == 0.0 || p.z == 0.0 {
        return Ok(KummerEval {
            value: 1.0,
            rel_error: 0.0,
            abs_error: 0.0,
            term_scale: 1.0,
            condition: 1.0,
            terms: 1,
            extended: false,
        });
    }
    let fast = sum_f64(p)?;
    if fast.rel_error <= F64_ACCEPT_REL {
        return Ok(fast);
    }
    let slow = sum_double_double(p)?;
    let near_zero = slow.value.abs() <= NEAR_ZERO * slow.term_scale
        && slow.abs_error <= TARGET_REL * U_F64 * slow.term_scale;
    if slow.rel_error <= TARGET_REL || near_zero {
        Ok(slow)
    } else {
        Err(Error::NonConvergence(format!(
            "M({}; {}; {}): cancellation leaves relative error {:e}",
            p.a, p.b, p.z, slow.rel_error
        )))
    }
}

/// Ratio `t_{n+1} / t_n` and whether the series has become a polynomial.
#[inline]
fn ratio(p: &KummerParams, n: usize) -> f64 {
    let n = n as f64;
    (p.a + n) * p.z / ((p.b + n) * (n + 1.0))
}

/// Stop once the next term is negligible and the ratios are contracting,
/// so the tail is bounded by twice the last term.
#[inline]
fn converged(next_abs: f64, sum_abs: f64, r: f64) -> bool {
    r.abs() < 0.5 && next_abs <= 1e-20 * sum_abs
}

fn sum_f64(p: KummerParams) -> Result<KummerEval> {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    let mut abs_sum = 1.0_f64;
    // accumulated bound on propagated term roundoff, sum (3n + 2) |t_n|
    let mut weighted = 2.0_f64;

    for n in 0..MAX_TERMS {
        let r = ratio(&p, n);
        term *= r;
        if term == 0.0 {
            return Ok(finish(sum + comp, abs_sum, weighted, U_F64, n + 1, false));
        }
        let t = sum + term;
        // Neumaier compensation
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        abs_sum += term.abs();
        weighted += (3.0 * (n as f64 + 1.0) + 2.0) * term.abs();
        if !sum.is_finite() {
            return Err(Error::NonConvergence(format!(
                "M({}; {}; {}) overflows",
                p.a, p.b, p.z
            )));
        }
        let next_r = ratio(&p, n + 1);
        if converged((term * next_r).abs(), (sum + comp).abs(), next_r) {
            return Ok(finish(sum + comp, abs_sum, weighted, U_F64, n + 2, false));
        }
    }
    Err(Error::NonConvergence(format!(
        "M({}; {}; {}) not converged after {MAX_TERMS} terms",
        p.a, p.b, p.z
    )))
}

fn sum_double_double(p: KummerParams) -> Result<KummerEval> {
    let a = TwoFloat::from(p.a);
    let b = TwoFloat::from(p.b);
    let z = TwoFloat::from(p.z);
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    let mut abs_sum = 1.0_f64;
    let mut weighted = 2.0_f64;

    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term = dd_div(term * (a + nf) * z, (b + nf) * (nf + 1.0));
        let t_hi = term.hi();
        if t_hi == 0.0 {
            return Ok(finish(f64::from(sum), abs_sum, weighted, U_DD, n + 1, true));
        }
        sum += term;
        abs_sum += t_hi.abs();
        weighted += (3.0 * (nf + 1.0) + 2.0) * t_hi.abs();
        if !sum.hi().is_finite() {
            return Err(Error::NonConvergence(format!(
                "M({}; {}; {}) overflows",
                p.a, p.b, p.z
            )));
        }
        let next_r = ratio(&p, n + 1);
        if r_small_dd(t_hi, next_r, sum.hi()) {
            return Ok(finish(f64::from(sum), abs_sum, weighted, U_DD, n + 2, true));
        }
    }
    Err(Error::NonConvergence(format!(
        "M({}; {}; {}) not converged after {MAX_TERMS} terms",
        p.a, p.b, p.z
    )))
}

/// `num / den` with one correction step. `TwoFloat`'s own division drops
/// the low word of the quotient.
#[inline]
fn dd_div(num: TwoFloat, den: TwoFloat) -> TwoFloat {
    let q0 = num.hi() / den.hi();
    let rem = num - den * q0;
    let q1 = rem.hi() / den.hi();
    let rem = rem - den * q1;
    TwoFloat::new_add(q0, q1) + rem.hi() / den.hi()
}

#[inline]
fn r_small_dd(t: f64, next_r: f64, sum: f64) -> bool {
    next_r.abs() < 0.5 && (t * next_r).abs() <= 1e-34 * sum.abs()
}

fn finish(
    value: f64,
    abs_sum: f64,
    weighted: f64,
    unit: f64,
    terms: usize,
    extended: bool,
) -> KummerEval {
    let mag = value.abs();
    // final rounding to f64 costs one more f64 unit
    let abs_error = unit * weighted + if extended { U_F64 * mag } else { 0.0 };
    let (condition, rel_error) = if mag > 0.0 {
        (abs_sum / mag, abs_error / mag)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    KummerEval {
        value,
        rel_error,
        abs_error,
        term_scale: abs_sum,
        condition,
        terms,
        extended,
    }
}
