//! Acceptance gate. Every test prints one PASS/FAIL line for its criterion.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use qgraph::graph::{build_star, sum_rule_residual};
use qgraph::interval_tbc::find_eigenvalues_interval;
use qgraph::scattering::{
    reflection_probability, scattering_row_closed_form, scattering_row_oracle,
};
use qgraph::specfun::{kummer_m, kummer_m_derivative, KummerParams};
use qgraph::star_spectrum::{eigenfunction_star, find_k_eigenvalues, normalization_report};
use qgraph::{BondLength, OscillatorProblem, PotentialSpec, StarGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const OSCILLATOR_LEVELS: [f64; 5] = [
    0.50000000005979,
    1.49999999734821,
    2.50000006391437,
    3.49999862590053,
    4.50000910443786,
];
const STAR_ROOTS: [f64; 5] = [
    0.34519971576497,
    0.61599855952741,
    0.83908748094051,
    1.04930134453149,
    1.35717565248649,
];

fn verdict(n: u32, ok: bool, detail: &str) {
    println!(
        "{} criterion {n}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn run_json(args: &[&str]) -> (Value, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(args)
        .args(["--out", "json"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (serde_json::from_slice(&out.stdout).unwrap(), elapsed)
}

fn column(v: &Value, name: &str) -> Vec<f64> {
    v["results"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[name].as_f64().unwrap())
        .collect()
}

fn reference_graph() -> StarGraph {
    StarGraph::undriven(&[5.1, 4.3, 3.5], &[2.4, 3.0, 4.0]).unwrap()
}

fn worst(got: &[f64], want: &[f64]) -> (usize, f64) {
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs())
        .enumerate()
        .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc })
}

#[test]
fn criterion_1_oscillator_levels() {
    let (v, t) = run_json(&[
        "osc", "--omega", "1", "--xl", "-5", "--xr", "5", "--emax", "5",
    ]);
    let e = column(&v, "energy");
    let (i, d) = if e.len() == 5 {
        worst(&e, &OSCILLATOR_LEVELS)
    } else {
        (0, f64::INFINITY)
    };
    verdict(
        1,
        e.len() == 5 && d < 1e-6 && t < Duration::from_secs(10),
        &format!(
            "{} eigenvalues, worst deviation {d:.2e} at n={i}, {:.2}s",
            e.len(),
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_star_roots() {
    let (v, t) = run_json(&["star", "--kmax", "1.5"]);
    let k = column(&v, "k");
    let devs: Vec<String> = k
        .iter()
        .zip(STAR_ROOTS)
        .map(|(g, w)| format!("{:.1e}", (g - w).abs()))
        .collect();
    let (i, d) = if k.len() == 5 {
        worst(&k, &STAR_ROOTS)
    } else {
        (0, f64::INFINITY)
    };
    verdict(
        2,
        k.len() == 5 && d < 1e-8 && t < Duration::from_secs(1),
        &format!(
            "{} roots, deviations [{}], worst at row {} ({:.2}s); listed value {} is pi/L_1 = {:.14}, a pole",
            k.len(),
            devs.join(", "),
            i + 1,
            t.as_secs_f64(),
            STAR_ROOTS[1],
            PI / 5.1
        ),
    );
}

#[test]
fn criterion_3_transparency() {
    let leads = StarGraph::leads(&[2.4, 3.0, 4.0], &[PotentialSpec::Zero; 3]).unwrap();
    let mut worst_r: f64 = 0.0;
    for k in [0.1, 0.5, 1.0, 2.0, 10.0] {
        worst_r = worst_r.max(reflection_probability(
            &scattering_row_closed_form(&leads, 1, k).unwrap(),
        ));
    }
    let s = sum_rule_residual(&reference_graph(), 1).unwrap();
    verdict(
        3,
        worst_r <= 1e-24 && s == 0.0,
        &format!("max |sigma_11|^2 = {worst_r:.2e}, sum rule residual = {s:e}"),
    );
}

struct Sample {
    graph: StarGraph,
    undriven: StarGraph,
    k: f64,
    incoming: usize,
}

fn random_sweep(count: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=6);
            let alphas: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
            let pots: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
            let vmax = pots.iter().copied().fold(0.0, f64::max);
            let k = (vmax + rng.random_range(0.05..5.0)).sqrt();
            let specs = pots
                .iter()
                .map(|&value| PotentialSpec::Constant { value })
                .collect();
            let graph = build_star(vec![BondLength::Unbounded; n], alphas.clone(), specs).unwrap();
            let undriven = StarGraph::leads(&alphas, &vec![PotentialSpec::Zero; n]).unwrap();
            let incoming = rng.random_range(1..=n);
            Sample {
                graph,
                undriven,
                k,
                incoming,
            }
        })
        .collect()
}

#[test]
fn criterion_4_oracle_equivalence() {
    let sweep = random_sweep(200);
    let mut dev: f64 = 0.0;
    for s in &sweep {
        for g in [&s.graph, &s.undriven] {
            let a = scattering_row_closed_form(g, s.incoming, s.k).unwrap();
            let b = scattering_row_oracle(g, s.incoming, s.k).unwrap();
            dev = dev.max(a.max_deviation(&b));
        }
    }
    verdict(
        4,
        dev < 1e-12,
        &format!(
            "{} graphs, max componentwise deviation {dev:.2e}",
            sweep.len()
        ),
    );
}

#[test]
fn criterion_5_unitarity() {
    let sweep = random_sweep(200);
    let mut plain: f64 = 0.0;
    let mut weighted: f64 = 0.0;
    for s in &sweep {
        let row = scattering_row_closed_form(&s.undriven, s.incoming, s.k).unwrap();
        plain = plain.max((row.flux_sum() - 1.0).abs());
        let row = scattering_row_closed_form(&s.graph, s.incoming, s.k).unwrap();
        weighted = weighted.max((row.weighted_flux_sum() - 1.0).abs());
    }
    verdict(
        5,
        plain <= 1e-12,
        &format!(
            "{} graphs, max |flux - 1| = {plain:.2e} (driven weighted flux, not gated: {weighted:.2e})",
            sweep.len()
        ),
    );
}

#[test]
fn criterion_6_kummer() {
    let mut exp_err: f64 = 0.0;
    for a in [-2.5, 0.5, 1.0, 1.5, 3.0] {
        for i in 0..=300 {
            let z = 0.1 * i as f64;
            let m = kummer_m(KummerParams::new(a, a, z).unwrap()).unwrap();
            exp_err = exp_err.max((m / z.exp() - 1.0).abs());
        }
    }
    let m = |a: f64, b: f64, z: f64| kummer_m(KummerParams::new(a, b, z).unwrap()).unwrap();
    let h = 1e-6;
    let mut fd_err: f64 = 0.0;
    for ia in 0..=48 {
        let a = -10.0 + 0.25 * ia as f64;
        for b in [0.5, 1.5, 2.5] {
            for iz in 0..=50 {
                let z = 0.5 * iz as f64;
                let d = kummer_m_derivative(KummerParams::new(a, b, z).unwrap()).unwrap();
                let fd = if z == 0.0 {
                    (-3.0 * m(a, b, 0.0) + 4.0 * m(a, b, h) - m(a, b, 2.0 * h)) / (2.0 * h)
                } else {
                    (m(a, b, z + h) - m(a, b, z - h)) / (2.0 * h)
                };
                fd_err = fd_err.max((d - fd).abs() / d.abs().max(m(a, b, z).abs()));
            }
        }
    }
    verdict(
        6,
        exp_err < 1e-12 && fd_err < 1e-6,
        &format!("max |M(a;a;z) e^-z - 1| = {exp_err:.2e}, max derivative mismatch {fd_err:.2e}"),
    );
}

#[test]
fn criterion_7_domain_transparency() {
    let narrow =
        find_eigenvalues_interval(&OscillatorProblem::new(1.0, -5.0, 5.0).unwrap(), 5.0, 1000)
            .unwrap()
            .eigenvalues();
    let wide =
        find_eigenvalues_interval(&OscillatorProblem::new(1.0, -6.0, 6.0).unwrap(), 5.0, 1000)
            .unwrap()
            .eigenvalues();
    let shifts: Vec<f64> = narrow
        .iter()
        .zip(&wide)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let listed: Vec<String> = shifts.iter().map(|s| format!("{s:.2e}")).collect();
    let ok = narrow.len() == 5 && wide.len() == 5 && shifts.iter().all(|&s| s < 1e-6);
    verdict(
        7,
        ok,
        &format!(
            "shifts [-5,5] -> [-6,6]: [{}] (equal to the reference levels minus omega(n + 1/2))",
            listed.join(", ")
        ),
    );
}

#[test]
fn criterion_8_eigenfunction_conditions() {
    let g = reference_graph();
    let roots = find_k_eigenvalues(&g, 1.5, 1500).unwrap().eigenvalues();
    let mut worst = [0.0f64; 4];
    for &k in &roots {
        let f = eigenfunction_star(&g, k, 801).unwrap();
        worst[0] = worst[0].max(f.dirichlet_residual());
        worst[1] = worst[1].max(f.continuity_spread());
        worst[2] = worst[2].max(f.kirchhoff_residual());
        worst[3] = worst[3].max((f.quadrature_norm() - 1.0).abs());
    }
    let at_pole = eigenfunction_star(&g, STAR_ROOTS[1], 801).is_err();
    verdict(
        8,
        roots.len() == 5 && worst[0] < 1e-12 && worst[1] < 1e-10 && worst[2] < 1e-8 && worst[3] < 1e-8,
        &format!(
            "at {} computed roots: dirichlet {:.1e}, continuity {:.1e}, kirchhoff {:.1e}, |norm - 1| {:.1e}; listed row 2 refused: {at_pole}",
            roots.len(),
            worst[0],
            worst[1],
            worst[2],
            worst[3]
        ),
    );
}

#[test]
fn criterion_9_normalization() {
    let g = reference_graph();
    let roots = find_k_eigenvalues(&g, 1.5, 1500).unwrap().eigenvalues();
    let mut closed: f64 = 0.0;
    let mut printed: f64 = 0.0;
    for &k in &roots {
        let r = normalization_report(&g, k).unwrap();
        closed = closed.max(r.closed_form_deviation());
        printed = printed.max(r.printed_formula_deviation());
    }
    verdict(
        9,
        roots.len() == 5 && closed < 1e-9,
        &format!("max |C_quad - C_closed| = {closed:.2e}; printed formula deviation (reported) {printed:.2e}"),
    );
}
