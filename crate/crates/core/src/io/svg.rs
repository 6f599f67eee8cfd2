//! Standalone SVG ternary plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{average_contribution, rescaled_basis, ternary_columns, ternary_rows, TernaryPoint};
use crate::models::BudgetFactorization;

#[derive(Clone, Debug)]
pub struct TernaryPlot {
    pub title: String,
    /// Labels of the corners (1,0,0), (0,1,0), (0,0,1).
    pub vertex_labels: [String; 3],
    pub points: Vec<TernaryPoint>,
    /// Drawn as squares on top of the ordinary markers.
    pub highlights: Vec<TernaryPoint>,
}

impl TernaryPlot {
    pub fn new(title: impl Into<String>, vertex_labels: [String; 3]) -> Self {
        Self {
            title: title.into(),
            vertex_labels,
            points: Vec::new(),
            highlights: Vec::new(),
        }
    }
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Screen position of a planar ternary coordinate.
pub fn screen(planar: [f64; 2]) -> (f64, f64) {
    let side = SIZE - 2.0 * MARGIN;
    let height = side * 3f64.sqrt() / 2.0;
    let top = (SIZE - height) / 2.0;
    (MARGIN + planar[0] * side, top + height - planar[1] * side)
}

/// Renders the plot. Output depends only on the input, so equal plots give
/// byte-identical documents.
pub fn render_ternary_svg(plot: &TernaryPlot) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&plot.title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let corners = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]].map(screen);
    let _ = writeln!(
        s,
        r#"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        corners[0].0, corners[0].1, corners[1].0, corners[1].1, corners[2].0, corners[2].1
    );
    let offsets = [(-10.0, 20.0, "end"), (10.0, 20.0, "start"), (0.0, -12.0, "middle")];
    for (c, ((x, y), (dx, dy, anchor))) in corners.iter().zip(offsets).enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="{anchor}" font-family="sans-serif" font-size="14" font-weight="bold">{}</text>"#,
            x + dx,
            y + dy,
            escape(&plot.vertex_labels[c])
        );
    }
    for p in &plot.points {
        let (x, y) = screen(p.planar);
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="#1f4e9c"><title>{}</title></circle>"##,
            escape(&p.label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="9">{}</text>"#,
            x + 4.0,
            y - 4.0,
            escape(&p.label)
        );
    }
    for p in &plot.highlights {
        let (x, y) = screen(p.planar);
        let _ = writeln!(
            s,
            r##"<rect x="{:.3}" y="{:.3}" width="8" height="8" fill="#c0392b"><title>{}</title></rect>"##,
            x - 4.0,
            y - 4.0,
            escape(&p.label)
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" fill="#c0392b">{}</text>"##,
            x + 6.0,
            y - 6.0,
            escape(&p.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_ternary_svg(plot: &TernaryPlot, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_ternary_svg(plot))?;
    Ok(())
}

/// Row coefficients (with the average contribution `z` highlighted as
/// "average") and rescaled basis columns of a K = 3 budget pair.
pub fn budget_plots(
    b: &BudgetFactorization,
    row_labels: &[String],
    col_labels: &[String],
) -> Result<(TernaryPlot, TernaryPlot)> {
    if b.k() != 3 {
        return Err(Error::UnsupportedK { k: b.k() });
    }
    let vertices = ["component 1".to_string(), "component 2".to_string(), "component 3".to_string()];
    let z = average_contribution(b.w());
    let mut rows = TernaryPlot::new("Row coefficients", vertices.clone());
    rows.points = ternary_rows(b.w(), row_labels)?;
    rows.highlights.push(TernaryPoint::new("average", [z[0], z[1], z[2]])?);
    let mut cols = TernaryPlot::new("Rescaled basis columns", vertices);
    cols.points = ternary_columns(&rescaled_basis(b.g(), &z)?, col_labels)?;
    Ok((rows, cols))
}
