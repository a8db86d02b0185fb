#![allow(clippy::excessive_precision)]

use qgraph::specfun::{kummer_m, kummer_m_derivative, kummer_m_detailed, KummerParams};

fn m(a: f64, b: f64, z: f64) -> f64 {
    kummer_m(KummerParams::new(a, b, z).unwrap()).unwrap()
}

// 30-digit reference values
const REFERENCE: &[(f64, f64, f64, f64)] = &[
    (-9.7, 0.5, 25.0, -311599.56709230552666),
    (0.25, 0.5, 25.0, 15866120887.702453021),
    (-2.3, 1.5, 12.5, -33.111170275752183857),
    (1.75, 2.5, 36.0, 417621530070097.19874),
    (-0.4999, 0.5, 30.0, -187919571688.73932496),
    (3.1, 1.5, -7.0, 0.003377430171427726758),
    (0.5, 2.5, 100.0, 2.0367181750820707188e+39),
    (-5.5, 1.5, 0.3, 0.16851732810862853545),
];

#[test]
fn matches_high_precision_reference() {
    for &(a, b, z, want) in REFERENCE {
        let got = m(a, b, z);
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "M({a};{b};{z}) = {got}, want {want}"
        );
    }
}

#[test]
fn error_estimate_is_honest() {
    for &(a, b, z, want) in REFERENCE {
        let ev = kummer_m_detailed(KummerParams::new(a, b, z).unwrap()).unwrap();
        let actual = ((ev.value - want) / want).abs();
        assert!(ev.rel_error <= 1e-12);
        assert!(
            actual <= 10.0 * ev.rel_error.max(f64::EPSILON),
            "{a} {b} {z}: {actual:e} > {:e}",
            ev.rel_error
        );
    }
}

#[test]
fn equal_parameters_give_exponential() {
    for a in [0.5, 1.0, 1.5] {
        for i in 0..=60 {
            let z = 0.5 * i as f64;
            let got = m(a, a, z);
            assert!((got / z.exp() - 1.0).abs() < 1e-12, "a = {a}, z = {z}");
        }
    }
}

#[test]
fn derivative_matches_central_difference() {
    let h = 1e-6;
    for ia in 0..=24 {
        let a = -10.0 + 0.5 * ia as f64;
        for b in [0.5, 1.5, 2.5] {
            for iz in 0..=25 {
                let z = iz as f64;
                let p = KummerParams::new(a, b, z).unwrap();
                let d = kummer_m_derivative(p).unwrap();
                let fd = if z == 0.0 {
                    (-3.0 * m(a, b, 0.0) + 4.0 * m(a, b, h) - m(a, b, 2.0 * h)) / (2.0 * h)
                } else {
                    (m(a, b, z + h) - m(a, b, z - h)) / (2.0 * h)
                };
                let scale = d.abs().max(m(a, b, z).abs());
                assert!(
                    (d - fd).abs() <= 1e-6 * scale,
                    "a={a} b={b} z={z}: {d} vs {fd}"
                );
            }
        }
    }
}

#[test]
fn contiguous_relation() {
    // (b - a) M(a-1) + (2a - b + z) M(a) - a M(a+1) = 0
    for &(a, b, z) in &[(0.3, 0.5, 4.0), (-3.2, 1.5, 10.0), (2.25, 2.5, 20.0)] {
        let t = [
            (b - a) * m(a - 1.0, b, z),
            (2.0 * a - b + z) * m(a, b, z),
            -a * m(a + 1.0, b, z),
        ];
        let size: f64 = t.iter().map(|v| v.abs()).sum();
        assert!(t.iter().sum::<f64>().abs() < 1e-11 * size);
    }
}
