//! Self-contained SVG rendering of persistence diagrams and barcodes.

use std::fmt::Write as _;

use tda_core::persistence::PersistenceDiagramSet;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 60.0;
const DIM_COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

fn color(dim: usize) -> &'static str {
    DIM_COLORS[dim % DIM_COLORS.len()]
}

/// Extent of the plot: a little past the largest finite value, or a unit
/// box for an empty diagram.
fn extent(d: &PersistenceDiagramSet) -> f64 {
    let mut max = d.max_value();
    for k in 0..=d.max_dim() {
        for bar in d.bars(k) {
            max = max.max(bar.birth);
            if bar.death.is_finite() {
                max = max.max(bar.death);
            }
        }
    }
    if max <= 0.0 {
        1.0
    } else {
        max * 1.05
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn axis_ticks(out: &mut String, max: f64, horizontal: bool) {
    let span = WIDTH - 2.0 * MARGIN;
    for step in 0..=5 {
        let value = max * step as f64 / 5.0;
        let pos = MARGIN + span * step as f64 / 5.0;
        if horizontal {
            let _ = writeln!(
                out,
                r#"<line x1="{pos:.1}" y1="{y}" x2="{pos:.1}" y2="{y2}" stroke="black"/><text x="{pos:.1}" y="{ty}" font-size="12" text-anchor="middle">{value:.2}</text>"#,
                y = HEIGHT - MARGIN,
                y2 = HEIGHT - MARGIN + 6.0,
                ty = HEIGHT - MARGIN + 20.0
            );
        } else {
            let ypos = HEIGHT - MARGIN - span * step as f64 / 5.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x}" y1="{ypos:.1}" x2="{x2}" y2="{ypos:.1}" stroke="black"/><text x="{tx}" y="{typ:.1}" font-size="12" text-anchor="end">{value:.2}</text>"#,
                x = MARGIN - 6.0,
                x2 = MARGIN,
                tx = MARGIN - 10.0,
                typ = ypos + 4.0
            );
        }
    }
}

fn frame(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black" stroke-width="1.5"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{b}" x2="{m}" y2="{t}" stroke="black" stroke-width="1.5"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        t = MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{cx}" y="{y}" font-size="14" text-anchor="middle">{x_label}</text>"#,
        cx = WIDTH / 2.0,
        y = HEIGHT - 18.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{cy}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {cy})">{y_label}</text>"#,
        cy = HEIGHT / 2.0
    );
}

fn legend(out: &mut String, dims: &[usize]) {
    for (slot, &dim) in dims.iter().enumerate() {
        let x = WIDTH - MARGIN - 90.0;
        let y = MARGIN + 18.0 * slot as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="{x}" cy="{y}" r="4" fill="{}"/><text x="{tx}" y="{ty}" font-size="12">dim {dim}</text>"#,
            color(dim),
            tx = x + 10.0,
            ty = y + 4.0
        );
    }
}

/// Persistence diagram: (birth, death) points above the diagonal;
/// essential classes are drawn as open triangles pinned to the top edge.
pub fn plot_diagram(d: &PersistenceDiagramSet) -> String {
    let max = extent(d);
    let span = WIDTH - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + span * v / max;
    let sy = |v: f64| HEIGHT - MARGIN - span * v / max;
    let mut out = String::new();
    header(&mut out);
    frame(&mut out, "birth", "death");
    axis_ticks(&mut out, max, true);
    axis_ticks(&mut out, max, false);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="gray" stroke-dasharray="6,4"/>"#,
        x0 = sx(0.0),
        y0 = sy(0.0),
        x1 = sx(max),
        y1 = sy(max)
    );
    let mut dims_present = Vec::new();
    for k in 0..=d.max_dim() {
        if !d.bars(k).is_empty() {
            dims_present.push(k);
        }
        for bar in d.bars(k) {
            if bar.death.is_finite() {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{c}" fill-opacity="0.75"/>"#,
                    x = sx(bar.birth),
                    y = sy(bar.death),
                    c = color(k)
                );
            } else {
                let x = sx(bar.birth);
                let y = sy(max);
                let _ = writeln!(
                    out,
                    r#"<path d="M {x0:.2} {y0:.2} L {x1:.2} {y1:.2} L {x2:.2} {y2:.2} Z" fill="none" stroke="{c}" stroke-width="1.5"/>"#,
                    x0 = x - 4.0,
                    y0 = y + 4.0,
                    x1 = x + 4.0,
                    y1 = y + 4.0,
                    x2 = x,
                    y2 = y - 4.0,
                    c = color(k)
                );
            }
        }
    }
    legend(&mut out, &dims_present);
    out.push_str("</svg>\n");
    out
}

/// Persistence barcode: horizontal segments grouped by dimension and
/// ordered by birth; essential bars run to the right edge with an arrow
/// head.
pub fn plot_barcode(d: &PersistenceDiagramSet) -> String {
    let max = extent(d);
    let span = WIDTH - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + span * v / max;
    let total_bars: usize = (0..=d.max_dim()).map(|k| d.bars(k).len()).sum();
    let lane_height = (HEIGHT - 2.0 * MARGIN) / (total_bars.max(1) as f64 + 1.0);
    let mut out = String::new();
    header(&mut out);
    frame(&mut out, "filtration value", "bars");
    axis_ticks(&mut out, max, true);
    let mut lane = 0usize;
    let mut dims_present = Vec::new();
    for k in 0..=d.max_dim() {
        let mut bars: Vec<_> = d.bars(k).to_vec();
        if !bars.is_empty() {
            dims_present.push(k);
        }
        bars.sort_by(|a, b| (a.birth, a.death).partial_cmp(&(b.birth, b.death)).unwrap());
        for bar in bars {
            lane += 1;
            let y = HEIGHT - MARGIN - lane_height * lane as f64;
            let x0 = sx(bar.birth);
            let x1 = if bar.death.is_finite() { sx(bar.death) } else { sx(max) };
            let _ = writeln!(
                out,
                r#"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="{c}" stroke-width="3"/>"#,
                c = color(k)
            );
            if !bar.death.is_finite() {
                let _ = writeln!(
                    out,
                    r#"<path d="M {x1:.2} {y0:.2} L {xt:.2} {y:.2} L {x1:.2} {y1:.2}" fill="none" stroke="{c}" stroke-width="1.5"/>"#,
                    y0 = y - 4.0,
                    xt = x1 + 7.0,
                    y1 = y + 4.0,
                    c = color(k)
                );
            }
        }
    }
    legend(&mut out, &dims_present);
    out.push_str("</svg>\n");
    out
}
