//! Composite and adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Composite Simpson rule over equally spaced samples with spacing `h`.
///
/// An even number of intervals uses the 1/3 rule throughout; an odd number
/// closes with a 3/8 panel over the last three intervals.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        4 => 3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]),
        _ => {
            let intervals = n - 1;
            let even_end = if intervals.is_multiple_of(2) {
                n - 1
            } else {
                n - 4
            };
            let mut s = values[0] + values[even_end];
            for (i, v) in values.iter().enumerate().take(even_end).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = h / 3.0 * s;
            if even_end != n - 1 {
                let t = &values[even_end..];
                total += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
            }
            total
        }
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`, with Richardson correction on accepted panels.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    const MAX_DEPTH: u32 = 50;

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        Some(
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
        )
    }

    // start from a fixed partition so oscillatory integrands are resolved
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for p in 0..PANELS {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == PANELS { b } else { lo + h };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += recurse(
            &f,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            tol / PANELS as f64,
            MAX_DEPTH,
        )
        .ok_or_else(|| {
            Error::NonConvergence(format!(
                "adaptive quadrature on [{lo}, {hi}] hit depth limit"
            ))
        })?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_is_exact_for_cubics_both_parities() {
        let f = |x: f64| 2.0 * x * x * x - x + 3.0;
        // integral over [0, 2] = 8 - 2 + 6
        for n in [5usize, 6, 11, 12, 4, 3] {
            let h = 2.0 / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
            assert!((simpson(&v, h) - 12.0).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn adaptive_sine_squared() {
        let k = 1.3;
        let l = 5.1;
        let got = adaptive_simpson(|x| (k * (l - x)).sin().powi(2), 0.0, l, 1e-13).unwrap();
        let exact = l / 2.0 - (2.0 * k * l).sin() / (4.0 * k);
        assert!((got - exact).abs() < 1e-12);
        let g = adaptive_simpson(|x| x.sin(), 0.0, PI, 1e-13).unwrap();
        assert!((g - 2.0).abs() < 1e-12);
    }
}
