//! Minimal static rendering of a stability diagram in the (k, T) plane.

use std::fmt::Write;

use gost_mi::critical::{CurvePoint, StabilityDiagram};
use gost_mi::mi_index::Classification;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
pub const MARGIN: f64 = 56.0;
const TICKS: usize = 5;

fn fill(label: Classification) -> &'static str {
    match label {
        Classification::Stable => "#9ecae1",
        Classification::Unstable => "#fc9272",
        Classification::Degenerate => "#bdbdbd",
    }
}

struct Plane {
    k_max: f64,
    t_max: f64,
}

impl Plane {
    fn x(&self, k: f64) -> f64 {
        MARGIN + k / self.k_max * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, t: f64) -> f64 {
        HEIGHT - MARGIN - t / self.t_max * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Splits the per-row zeros into branches: the `i`-th zero of consecutive
/// rows forms branch `i`. A branch ends where a row has fewer zeros.
pub fn branches(points: &[CurvePoint]) -> Vec<Vec<CurvePoint>> {
    let mut rows: Vec<Vec<CurvePoint>> = Vec::new();
    for p in points {
        match rows.last_mut() {
            Some(row) if row[0].t == p.t => row.push(*p),
            _ => rows.push(vec![*p]),
        }
    }
    let mut done = Vec::new();
    let mut open: Vec<Vec<CurvePoint>> = Vec::new();
    for row in rows {
        for (i, p) in row.iter().enumerate() {
            if i < open.len() {
                open[i].push(*p);
            } else {
                open.push(vec![*p]);
            }
        }
        for branch in open.drain(row.len()..) {
            done.push(branch);
        }
    }
    done.extend(open);
    done
}

fn polyline(out: &mut String, plane: &Plane, class: &str, stroke: &str, points: &[CurvePoint]) {
    let coords: Vec<String> = points
        .iter()
        .map(|p| format!("{:.3},{:.3}", plane.x(p.k), plane.y(p.t)))
        .collect();
    writeln!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{stroke}" stroke-width="2" points="{}"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

pub fn render(d: &StabilityDiagram) -> String {
    let plane = Plane {
        k_max: d.k_max,
        t_max: d.t_max,
    };
    let cw = (WIDTH - 2.0 * MARGIN) / d.nk as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / d.nt as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<title>{} stability diagram, alpha = {}</title>"#,
        d.family, d.alpha
    )
    .unwrap();
    writeln!(out, r#"<g class="cells" shape-rendering="crispEdges">"#).unwrap();
    for c in &d.cells {
        writeln!(
            out,
            r#"<rect class="cell {}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
            c.label.label(),
            plane.x(c.k) - 0.5 * cw,
            plane.y(c.t) - 0.5 * ch,
            cw,
            ch,
            fill(c.label)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();

    for b in branches(&d.phase_curve).iter().filter(|b| b.len() > 1) {
        polyline(&mut out, &plane, "phase", "#08519c", b);
    }
    for b in branches(&d.group_curve).iter().filter(|b| b.len() > 1) {
        polyline(&mut out, &plane, "group", "#a50f15", b);
    }
    for p in &d.intersections {
        writeln!(
            out,
            r#"<circle class="intersection" cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#,
            plane.x(p.k),
            plane.y(p.t)
        )
        .unwrap();
    }

    let (x0, y0) = (plane.x(0.0), plane.y(0.0));
    let (x1, y1) = (plane.x(d.k_max), plane.y(d.t_max));
    writeln!(
        out,
        r#"<g class="axes" stroke="black" font-size="12" font-family="sans-serif">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y0:.3}"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{y1:.3}"/>"#
    )
    .unwrap();
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (x, y) = (plane.x(f * d.k_max), plane.y(f * d.t_max));
        writeln!(
            out,
            r#"<text stroke="none" x="{x:.3}" y="{:.3}" text-anchor="middle">{:.3}</text>"#,
            y0 + 18.0,
            f * d.k_max
        )
        .unwrap();
        writeln!(
            out,
            r#"<text stroke="none" x="{:.3}" y="{y:.3}" text-anchor="end">{:.3}</text>"#,
            x0 - 6.0,
            f * d.t_max
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text stroke="none" x="{:.3}" y="{:.3}" text-anchor="middle">k</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text stroke="none" x="16" y="{:.3}" text-anchor="middle">T</text>"#,
        0.5 * (y0 + y1)
    )
    .unwrap();
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}
