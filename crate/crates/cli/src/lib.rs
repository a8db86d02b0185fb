//! Command-line front end: argument model, the four commands and their
//! CSV/JSON/SVG output.

pub mod report;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgraph::graph::{driven_sum_rule_residual, generalized_sum_rule_residual, sum_rule_residual};
use qgraph::interval_tbc::{
    eigenfunction_interval, find_eigenvalues_interval, secular_matrix,
    vertex_transparency_residual, ROOT_ACCEPT,
};
use qgraph::scattering::{
    reflection_probability, scattering_row_closed_form, scattering_row_oracle,
};
use qgraph::star_spectrum::{
    eigenfunction_star, find_k_eigenvalues, normalization_report, secular_function,
};
use qgraph::{OscillatorProblem, StarGraph};

use report::{Cell, Report, Table};
use svg::{Panel, Series};

/// Verdict threshold for the sum rules.
pub const TRANSPARENCY_THRESHOLD: f64 = 1e-12;
/// `|f(k)|` beyond which the secular plot is clipped.
pub const SECULAR_CLIP: f64 = 10.0;

const DEFAULT_LENGTHS: [f64; 3] = [5.1, 4.3, 3.5];
const DEFAULT_ALPHAS: [f64; 3] = [2.4, 3.0, 4.0];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qgraph::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    /// 2 for numerical failures, 1 for everything the user can fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "qgraph",
    version,
    about = "Spectra and vertex scattering of quantum star graphs"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Format of the results written to stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub out: OutputFormat,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eigenvalues of the harmonic oscillator confined by transparent boundary conditions.
    Osc(OscArgs),
    /// Eigenvalues and eigenfunctions of a finite star graph.
    Star(StarArgs),
    /// One row of the vertex scattering matrix.
    Scatter(ScatterArgs),
    /// Vertex transparency sum rules.
    Sumrule(SumruleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OscArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega: f64,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub xl: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub xr: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub emax: f64,
    /// Energy scan cells.
    #[arg(long, default_value_t = 1000)]
    pub egrid: usize,
    /// Eigenfunction samples over the interval.
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    /// SVG of log10 |det h(E)|.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// SVG of the eigenfunctions.
    #[arg(long)]
    pub eigplot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StarArgs {
    /// Graph file (JSON); defaults to L = (5.1, 4.3, 3.5), alpha = (2.4, 3, 4).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub kmax: f64,
    /// Wavenumber scan cells.
    #[arg(long, default_value_t = 1500)]
    pub kgrid: usize,
    /// Eigenfunction samples per bond.
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// SVG of the secular function.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// SVG of the first five eigenfunctions on every bond.
    #[arg(long)]
    pub eigplot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScatterArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// 1-based incoming bond.
    #[arg(long, default_value_t = 1)]
    pub incoming: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub k: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SumruleArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub incoming: usize,
    /// Wavenumber for the potential-dependent rule.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Number of incoming bonds for the generalized rule.
    #[arg(long)]
    pub m: Option<usize>,
}

/// Text for stdout plus files to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
}

impl RunOutput {
    pub fn write_files(&self) -> Result<(), CliError> {
        for (path, body) in &self.files {
            std::fs::write(path, body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
        }
        Ok(())
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let (report, files) = match &cfg.command {
        Command::Osc(a) => osc(a)?,
        Command::Star(a) => star(a)?,
        Command::Scatter(a) => (scatter(a)?, Vec::new()),
        Command::Sumrule(a) => (sumrule(a)?, Vec::new()),
    };
    let stdout = match cfg.out {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    Ok(RunOutput { stdout, files })
}

fn load_graph(path: Option<&Path>, report: &mut Report) -> Result<StarGraph, CliError> {
    let g = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            report.input("graph_file", p.display().to_string());
            StarGraph::from_json(&text)?
        }
        None => StarGraph::undriven(&DEFAULT_LENGTHS, &DEFAULT_ALPHAS)?,
    };
    let file = serde_json::to_value(g.to_graph_file()).expect("graph files serialize");
    report.input("graph", file);
    Ok(g)
}

fn osc(a: &OscArgs) -> Result<(Report, Vec<(PathBuf, String)>), CliError> {
    let p = OscillatorProblem::new(a.omega, a.xl, a.xr)?;
    let mut r = Report::new("osc");
    r.input("omega", a.omega);
    r.input("x_left", a.xl);
    r.input("x_right", a.xr);
    r.input("e_max", a.emax);
    r.input("e_grid", a.egrid);

    let res = find_eigenvalues_interval(&p, a.emax, a.egrid)?;
    r.table = Table::new(&[
        ("n", "dimensionless"),
        ("energy", "energy"),
        ("scaled_residual", "dimensionless"),
        ("shift_from_free_level", "energy"),
        ("bracket_low", "energy"),
        ("bracket_high", "energy"),
    ]);
    for (n, root) in res.roots.iter().enumerate() {
        r.table.push(vec![
            n.into(),
            root.value.into(),
            root.residual.into(),
            (root.value - p.free_level(n)).into(),
            root.bracket.0.into(),
            root.bracket.1.into(),
        ]);
    }
    r.scalar("eigenvalue_count", res.len(), "dimensionless");
    r.diagnostic("acceptance_threshold", ROOT_ACCEPT);
    r.diagnostic(
        "accepted_at_ulp_scale",
        res.roots
            .iter()
            .filter(|x| x.residual >= ROOT_ACCEPT)
            .count(),
    );

    let mut files = Vec::new();
    if let Some(path) = &a.plot {
        let n = a.egrid.max(2);
        let mut pts = Vec::with_capacity(n);
        for i in 1..=n {
            let e = a.emax * i as f64 / n as f64;
            let d = secular_matrix(&p, e)?.det().norm();
            pts.push((e, (d > 0.0).then(|| d.log10())));
        }
        let floor = pts.iter().filter_map(|q| q.1).fold(f64::INFINITY, f64::min);
        let panel = Panel {
            title: "Determinant of the boundary-condition matrix".into(),
            x_label: "E (energy)".into(),
            y_label: "log10 |det h(E)|".into(),
            series: vec![
                Series::broken("log10 |det h|", pts),
                Series::markers(
                    "eigenvalues",
                    res.eigenvalues().iter().map(|&e| (e, floor)).collect(),
                ),
            ],
            y_range: None,
        };
        files.push((
            path.clone(),
            svg::render(
                &[panel],
                &["log scale; zeros of det h are marked on the lower edge".into()],
            ),
        ));
    }
    if let Some(path) = &a.eigplot {
        let mut series = Vec::new();
        for (n, e) in res.eigenvalues().into_iter().take(5).enumerate() {
            let f = eigenfunction_interval(&p, e, a.samples)?;
            let pts = f.x.iter().zip(&f.phi).map(|(&x, v)| (x, v.re)).collect();
            series.push(Series::line(format!("n = {n}"), pts));
        }
        let panel = Panel {
            title: "Eigenfunctions of the confined oscillator".into(),
            x_label: "x (length)".into(),
            y_label: "Re phi(x)".into(),
            series,
            y_range: None,
        };
        files.push((
            path.clone(),
            svg::render(
                &[panel],
                &["normalized to unit L2 norm; phase chosen so the peak is real".into()],
            ),
        ));
    }
    Ok((r, files))
}

fn star(a: &StarArgs) -> Result<(Report, Vec<(PathBuf, String)>), CliError> {
    let mut r = Report::new("star");
    let g = load_graph(a.graph.as_deref(), &mut r)?;
    r.input("k_max", a.kmax);
    r.input("k_grid", a.kgrid);
    r.input("samples_per_bond", a.samples);

    let res = find_k_eigenvalues(&g, a.kmax, a.kgrid)?;
    r.table = Table::new(&[
        ("n", "dimensionless"),
        ("k", "1/length"),
        ("residual", "1/length"),
        ("multiplicity", "dimensionless"),
        ("degenerate", "dimensionless"),
        ("normalization", "1/sqrt(length)"),
        ("normalization_closed_form", "1/sqrt(length)"),
        ("normalization_printed_formula", "1/sqrt(length)"),
        ("dirichlet_residual", "1/sqrt(length)"),
        ("continuity_spread", "1/sqrt(length)"),
        ("kirchhoff_residual", "dimensionless"),
        ("quadrature_norm", "dimensionless"),
    ]);
    let mut eigenfunctions = Vec::new();
    for (n, root) in res.roots.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            (n + 1).into(),
            root.value.into(),
            root.residual.into(),
            root.multiplicity.into(),
            root.degenerate.into(),
        ];
        if root.degenerate {
            row.extend(std::iter::repeat_n(Cell::Empty, 7));
        } else {
            let c = normalization_report(&g, root.value)?;
            let f = eigenfunction_star(&g, root.value, a.samples)?;
            row.extend([
                c.quadrature.into(),
                c.closed_form.into(),
                c.printed_formula.into(),
                f.dirichlet_residual().into(),
                f.continuity_spread().into(),
                f.kirchhoff_residual().into(),
                f.quadrature_norm().into(),
            ]);
            eigenfunctions.push(f);
        }
        r.table.push(row);
    }
    r.scalar("root_count", res.len(), "dimensionless");
    r.scalar(
        "count_with_multiplicity",
        res.count_with_multiplicity(),
        "dimensionless",
    );
    r.diagnostic(
        "degenerate_roots",
        res.roots.iter().filter(|x| x.degenerate).count(),
    );
    r.diagnostic("root_acceptance", qgraph::star_spectrum::ROOT_ACCEPT);

    let mut files = Vec::new();
    if let Some(path) = &a.plot {
        let note = format!(
            "secular function sum_j cot(k L_j) / alpha_j^2 clipped to |f| <= {SECULAR_CLIP}; curve broken at poles"
        );
        r.diagnostic("plot_clip", note.clone());
        let n = 4000;
        let pts = (1..=n).map(|i| {
            let k = a.kmax * i as f64 / n as f64;
            let v = secular_function(&g, k)
                .ok()
                .filter(|v| v.abs() <= SECULAR_CLIP);
            (k, v)
        });
        let panel = Panel {
            title: "Secular function of the star graph".into(),
            x_label: "k (1/length)".into(),
            y_label: "f(k)".into(),
            series: vec![
                Series::broken("f(k)", pts),
                Series::markers(
                    "roots",
                    res.eigenvalues().iter().map(|&k| (k, 0.0)).collect(),
                ),
            ],
            y_range: Some((-SECULAR_CLIP, SECULAR_CLIP)),
        };
        files.push((path.clone(), svg::render(&[panel], &[note])));
    }
    if let Some(path) = &a.eigplot {
        let shown: Vec<_> = eigenfunctions.iter().take(5).collect();
        let panels: Vec<Panel> = (0..g.n_bonds())
            .map(|j| Panel {
                title: format!("Bond {}", j + 1),
                x_label: "x from the vertex (length)".into(),
                y_label: "psi".into(),
                series: shown
                    .iter()
                    .enumerate()
                    .map(|(n, f)| {
                        let b = &f.bonds[j];
                        Series::line(
                            format!("n = {}", n + 1),
                            b.x.iter().copied().zip(b.psi.iter().copied()).collect(),
                        )
                    })
                    .collect(),
                y_range: None,
            })
            .collect();
        files.push((
            path.clone(),
            svg::render(
                &panels,
                &["first five non-degenerate eigenfunctions".into()],
            ),
        ));
    }
    Ok((r, files))
}

fn scatter(a: &ScatterArgs) -> Result<Report, CliError> {
    let mut r = Report::new("scatter");
    let g = load_graph(a.graph.as_deref(), &mut r)?;
    r.input("incoming_bond", a.incoming);
    r.input("k", a.k);

    let closed = scattering_row_closed_form(&g, a.incoming, a.k)?;
    let oracle = scattering_row_oracle(&g, a.incoming, a.k)?;
    r.table = Table::new(&[
        ("bond", "dimensionless"),
        ("sigma_re", "dimensionless"),
        ("sigma_im", "dimensionless"),
        ("oracle_re", "dimensionless"),
        ("oracle_im", "dimensionless"),
        ("deviation", "dimensionless"),
        ("kappa", "1/length"),
    ]);
    for (j, (s, o)) in closed.amplitudes.iter().zip(&oracle.amplitudes).enumerate() {
        r.table.push(vec![
            (j + 1).into(),
            s.re.into(),
            s.im.into(),
            o.re.into(),
            o.im.into(),
            (s - o).norm().into(),
            closed.local_wavenumbers[j].into(),
        ]);
    }
    r.scalar(
        "reflection_probability",
        reflection_probability(&closed),
        "dimensionless",
    );
    r.scalar("flux_sum", closed.flux_sum(), "dimensionless");
    r.scalar(
        "weighted_flux_sum",
        closed.weighted_flux_sum(),
        "dimensionless",
    );
    r.scalar(
        "max_deviation",
        closed.max_deviation(&oracle),
        "dimensionless",
    );
    r.diagnostic("driven", closed.driven);
    Ok(r)
}

fn sumrule(a: &SumruleArgs) -> Result<Report, CliError> {
    let mut r = Report::new("sumrule");
    let g = load_graph(a.graph.as_deref(), &mut r)?;
    r.input("incoming_bond", a.incoming);
    if let Some(k) = a.k {
        r.input("k", k);
    }
    if let Some(m) = a.m {
        r.input("m", m);
    }

    let plain = sum_rule_residual(&g, a.incoming)?;
    r.scalar("sum_rule_residual", plain, "dimensionless");
    let mut decisive = plain.abs();
    if let Some(k) = a.k {
        let d = driven_sum_rule_residual(&g, k, a.incoming)?;
        r.scalar("driven_sum_rule_residual_re", d.re, "1/length");
        r.scalar("driven_sum_rule_residual_im", d.im, "1/length");
        decisive = d.norm();
        match vertex_transparency_residual(&g, k * k, a.incoming) {
            Ok(vt) => {
                r.scalar("vertex_transparency_residual", vt.residual, "dimensionless");
                r.diagnostic(
                    "vertex_condition_order",
                    format!("{:?}", vt.order).to_lowercase(),
                );
            }
            Err(qgraph::Error::AssumptionViolated(msg)) => {
                r.diagnostic("vertex_transparency", format!("not applicable: {msg}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(m) = a.m {
        let gen = generalized_sum_rule_residual(g.alphas(), m)?;
        r.scalar("generalized_sum_rule_residual", gen, "dimensionless");
    }
    let verdict = if decisive <= TRANSPARENCY_THRESHOLD {
        format!("transparent (bond {})", a.incoming)
    } else {
        format!("not transparent (bond {})", a.incoming)
    };
    r.scalar("verdict", Cell::Text(verdict), "dimensionless");
    r.diagnostic("threshold", TRANSPARENCY_THRESHOLD);
    Ok(r)
}
