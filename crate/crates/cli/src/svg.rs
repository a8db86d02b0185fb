//! Minimal self-contained SVG line plots.

use std::fmt::Write;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// A curve made of one or more unconnected polylines.
#[derive(Debug, Clone, Default)]
pub struct Series {
    pub label: String,
    pub segments: Vec<Vec<(f64, f64)>>,
    /// Draw isolated markers instead of lines.
    pub markers: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            segments: vec![points],
            markers: false,
        }
    }

    /// Splits the points into segments wherever a value is `None`.
    pub fn broken(
        label: impl Into<String>,
        points: impl IntoIterator<Item = (f64, Option<f64>)>,
    ) -> Self {
        let mut segments = Vec::new();
        let mut current = Vec::new();
        for (x, y) in points {
            match y {
                Some(y) => current.push((x, y)),
                None if !current.is_empty() => segments.push(std::mem::take(&mut current)),
                None => {}
            }
        }
        if !current.is_empty() {
            segments.push(current);
        }
        Self {
            label: label.into(),
            segments,
            markers: false,
        }
    }

    pub fn markers(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            segments: vec![points],
            markers: true,
        }
    }

    fn points(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.segments.iter().flatten()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Fixed y range; otherwise taken from the data.
    pub y_range: Option<(f64, f64)>,
}

/// Up to about ten "nice" tick positions covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return vec![lo];
    }
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn data_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(v), h.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn render_panel(out: &mut String, p: &Panel, top: f64, height: f64) {
    let (left, right) = (70.0, WIDTH - 150.0);
    let (ptop, pbottom) = (top + 28.0, top + height - 40.0);
    let (x0, x1) = data_range(p.series.iter().flat_map(|s| s.points().map(|q| q.0)));
    let (y0, y1) = p
        .y_range
        .unwrap_or_else(|| data_range(p.series.iter().flat_map(|s| s.points().map(|q| q.1))));
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| pbottom - (y - y0) / (y1 - y0) * (pbottom - ptop);

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        (left + right) / 2.0,
        top + 18.0,
        escape(&p.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{left:.1}" y="{ptop:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
        right - left,
        pbottom - ptop
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{pbottom:.1}" x2="{x:.2}" y2="{:.1}" stroke="#444"/><text x="{x:.2}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"##,
            pbottom + 4.0,
            pbottom + 15.0,
            tick_label(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.2}" x2="{left:.1}" y2="{y:.2}" stroke="#444"/><text x="{:.1}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"##,
            left - 4.0,
            left - 6.0,
            y + 3.0,
            tick_label(t)
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(
            out,
            r##"<line x1="{left:.1}" y1="{y:.2}" x2="{right:.1}" y2="{y:.2}" stroke="#bbb" stroke-dasharray="4 3"/>"##
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        (left + right) / 2.0,
        pbottom + 32.0,
        escape(&p.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (ptop + pbottom) / 2.0,
        (ptop + pbottom) / 2.0,
        escape(&p.y_label)
    );

    for (i, s) in p.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.markers {
            for &(x, y) in s.points() {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(x),
                    sy(y.clamp(y0, y1))
                );
            }
        } else {
            for seg in &s.segments {
                let pts: Vec<String> = seg
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
            }
        }
        let ly = ptop + 12.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="12" height="3" fill="{color}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            right + 12.0,
            ly - 4.0,
            right + 30.0,
            ly,
            escape(&s.label)
        );
    }
}

/// Renders the panels stacked vertically in one 800x500 figure.
pub fn render(panels: &[Panel], notes: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif">"#
    );
    if !notes.is_empty() {
        let _ = writeln!(out, "<metadata>{}</metadata>", escape(&notes.join("; ")));
    }
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let h = HEIGHT / panels.len().max(1) as f64;
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, i as f64 * h, h);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_and_inside() {
        let t = ticks(0.0, 1.5);
        assert_eq!(t.first(), Some(&0.0));
        assert!(t.iter().all(|v| (0.0..=1.5).contains(v)));
        assert_eq!(t, vec![0.0, 0.5, 1.0, 1.5]);
        assert_eq!(ticks(3.0, 3.0), vec![3.0]);
    }

    #[test]
    fn broken_series_splits_on_gaps() {
        let s = Series::broken(
            "f",
            [
                (0.0, Some(1.0)),
                (1.0, None),
                (2.0, Some(2.0)),
                (3.0, Some(0.0)),
            ],
        );
        assert_eq!(s.segments.len(), 2);
        assert_eq!(s.segments[1].len(), 2);
    }

    #[test]
    fn render_has_fixed_view_box_and_metadata() {
        let panel = Panel {
            title: "t".into(),
            series: vec![Series::line("a<b", vec![(0.0, 0.0), (1.0, 1.0)])],
            ..Panel::default()
        };
        let svg = render(&[panel], &["clipped at |f| <= 10".into()]);
        assert!(svg.contains(r#"viewBox="0 0 800 500""#));
        assert!(svg.contains("<metadata>clipped at |f| &lt;= 10</metadata>"));
        assert!(svg.contains("a&lt;b"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
