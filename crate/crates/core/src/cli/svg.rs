//! Per-particle trajectory panels as a plain SVG document.

use std::fmt::Write as _;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

const PANEL: f64 = 180.0;
const PAD: f64 = 14.0;
const LABEL: f64 = 14.0;

fn style(species: usize) -> &'static str {
    match species {
        0 => r##"stroke="#1f1f1f" stroke-width="1.2""##,
        1 => r##"stroke="#8c8c8c" stroke-width="2.4""##,
        2 => r##"stroke="#1f1f1f" stroke-width="1.2" stroke-dasharray="5,3""##,
        _ => r##"stroke="#1f1f1f" stroke-width="1.2" stroke-dasharray="1,2""##,
    }
}

/// One panel per particle, each scaled to that particle's own path. The first
/// species is drawn dark, the second in a thicker gray, further species dashed.
/// A path that does not move is drawn as a point marker.
pub fn plot_svg(traj: &Trajectory) -> Result<String> {
    let Some(first) = traj.states.first() else {
        return Err(Error::Validation("cannot plot an empty trajectory".into()));
    };
    let layout: Vec<(usize, usize)> = first
        .species
        .iter()
        .enumerate()
        .flat_map(|(s, sp)| (0..sp.positions.len()).map(move |p| (s, p)))
        .collect();
    let count = layout.len().max(1);
    let cols = (count as f64).sqrt().ceil() as usize;
    let rows = count.div_ceil(cols);
    let cell = PANEL + 2.0 * PAD;
    let width = cols as f64 * cell;
    let height = rows as f64 * (cell + LABEL);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (idx, &(s, p)) in layout.iter().enumerate() {
        let path: Vec<(f64, f64)> = traj
            .states
            .iter()
            .map(|st| st.positions()[idx])
            .map(|z| (z.re, z.im))
            .collect();
        let (x0, y0) = ((idx % cols) as f64 * cell, (idx / cols) as f64 * (cell + LABEL));
        let _ = writeln!(
            out,
            r##"<g transform="translate({x0:.1},{y0:.1})"><rect x="{PAD:.1}" y="{LABEL:.1}" width="{PANEL:.1}" height="{PANEL:.1}" fill="none" stroke="#d0d0d0"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{PAD:.1}" y="{:.1}" font-family="monospace" font-size="11">s{s} p{p}</text>"#,
            LABEL - 3.0
        );
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &path {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        let extent = (xmax - xmin).max(ymax - ymin);
        let (cx, cy) = ((xmin + xmax) / 2.0, (ymin + ymax) / 2.0);
        let centre = (PAD + PANEL / 2.0, LABEL + PANEL / 2.0);
        if !(extent > 1e-12 * (1.0 + cx.abs().max(cy.abs()))) || !extent.is_finite() {
            let _ = writeln!(
                out,
                r##"<circle cx="{:.3}" cy="{:.3}" r="3" fill="#1f1f1f" {}/>"##,
                centre.0,
                centre.1,
                style(s)
            );
        } else {
            let k = 0.9 * PANEL / extent;
            let pts: Vec<String> = path
                .iter()
                .map(|&(x, y)| format!("{:.3},{:.3}", centre.0 + k * (x - cx), centre.1 - k * (y - cy)))
                .collect();
            let _ = writeln!(out, r#"<polyline fill="none" {} points="{}"/>"#, style(s), pts.join(" "));
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
