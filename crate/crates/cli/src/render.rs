//! Text table and SVG output.

use std::f64::consts::TAU;
use std::fmt::Write;

use mvqn_core::bargmann::{table_rows, TableRow};
use mvqn_core::{ComplexAmplitude, SpinLabel};

use crate::error::Result;

fn state_label(n1: u32, n2: u32) -> String {
    if n1 < 10 && n2 < 10 {
        format!("f_{n1}{n2}")
    } else {
        format!("f_{{{n1},{n2}}}")
    }
}

pub fn format_row(row: &TableRow) -> String {
    format!(
        "({})_z ({})_w = {} | {} = {} | {}",
        row.root_z,
        row.root_w,
        row.product,
        state_label(row.n1, row.n2),
        row.monomial_description,
        row.spin
    )
}

/// One block per `two_j`, headed by `# j=…`, blocks separated by a blank line.
pub fn render_table(two_js: &[u32]) -> Result<String> {
    let mut out = String::new();
    for (i, &tj) in two_js.iter().enumerate() {
        let rows = table_rows(tj)?;
        if i > 0 {
            out.push('\n');
        }
        let header = SpinLabel::new(tj as i64, tj as i64)?.to_string();
        let j = header.split(',').next().unwrap_or_default();
        let _ = writeln!(out, "# {j}");
        for row in &rows {
            out.push_str(&format_row(row));
            out.push('\n');
        }
    }
    Ok(out)
}

const SIZE: f64 = 480.0;
const CENTER: f64 = SIZE / 2.0;
const RADIUS: f64 = 160.0;

/// One point on the plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotPoint {
    pub z: ComplexAmplitude,
    pub correct: bool,
}

fn screen(z: ComplexAmplitude, scale: f64) -> (f64, f64) {
    (
        CENTER + RADIUS * scale * z.re,
        CENTER - RADIUS * scale * z.im,
    )
}

/// Unit circle, the `k` sector boundaries, the roots, sample weighted sums
/// (green when classified correctly, red otherwise) and an optional
/// trajectory of one weighted sum across epochs.
///
/// Points are drawn at `z / max(1, max |z|)` so everything stays on canvas.
pub fn render_svg(k: u32, points: &[PlotPoint], trajectory: &[ComplexAmplitude]) -> String {
    let extent = points
        .iter()
        .map(|p| p.z.norm())
        .chain(trajectory.iter().map(|z| z.norm()))
        .fold(1.0, f64::max);
    let scale = 1.0 / extent;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<circle class="unit" cx="{CENTER}" cy="{CENTER}" r="{:.3}" fill="none" stroke="black"/>"#,
        RADIUS * scale
    );
    for j in 0..k {
        let angle = TAU * j as f64 / k as f64;
        let (x, y) = screen(ComplexAmplitude::from_polar(1.2 / scale, angle), scale);
        let _ = writeln!(
            s,
            r#"<line class="boundary" x1="{CENTER}" y1="{CENTER}" x2="{x:.3}" y2="{y:.3}" stroke="gray" stroke-dasharray="4 3"/>"#
        );
    }
    for j in 0..k {
        let angle = TAU * (j as f64 + 0.5) / k as f64;
        let (x, y) = screen(ComplexAmplitude::from_polar(1.08 / scale, angle), scale);
        let _ = writeln!(
            s,
            r#"<text class="root" x="{x:.3}" y="{y:.3}" font-size="12" text-anchor="middle">ε_{k}^{j}</text>"#
        );
    }
    for p in points {
        let (x, y) = screen(p.z, scale);
        let (class, color) = if p.correct {
            ("correct", "green")
        } else {
            ("wrong", "red")
        };
        let _ = writeln!(
            s,
            r#"<circle class="sample {class}" cx="{x:.3}" cy="{y:.3}" r="4" fill="{color}"/>"#
        );
    }
    if !trajectory.is_empty() {
        let pts: Vec<String> = trajectory
            .iter()
            .map(|&z| {
                let (x, y) = screen(z, scale);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="trajectory" points="{}" fill="none" stroke="blue"/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lines() {
        let text = render_table(&[1, 4]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# j=1/2");
        assert_eq!(
            lines[1],
            "(ε_2^1)_z (ε_2^0)_w = ε_2^1 | f_10 = z | j=1/2, m=1/2"
        );
        assert_eq!(
            lines[2],
            "(ε_2^0)_z (ε_2^1)_w = ε_2^1 | f_01 = w | j=1/2, m=-1/2"
        );
        assert_eq!(lines[3], "");
        assert_eq!(lines[4], "# j=2");
        assert_eq!(
            lines[9],
            "(ε_5^0)_z (ε_5^4)_w = ε_5^4 | f_04 = w^4 / sqrt(24) | j=2, m=-2"
        );
        assert!(render_table(&[0]).is_err());
    }

    #[test]
    fn wide_labels() {
        let text = render_table(&[12]).unwrap();
        assert!(text.contains("f_{12,0} = z^12 / sqrt(479001600)"));
    }

    #[test]
    fn svg_counts() {
        let pts = [PlotPoint {
            z: ComplexAmplitude::new(3.0, 1.0),
            correct: true,
        }];
        let svg = render_svg(6, &pts, &[ComplexAmplitude::new(0.0, 0.5)]);
        assert_eq!(svg.matches("class=\"boundary\"").count(), 6);
        assert_eq!(svg.matches("class=\"sample correct\"").count(), 1);
        assert!(svg.contains("<polyline"));
    }
}
