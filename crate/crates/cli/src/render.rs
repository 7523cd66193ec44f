//! SVG output. Coordinates are rounded for display only.

use std::fmt::Write;

use strrep::geometry::{polyline_contacts, Point};
use strrep::representation::Representation;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One path per curve and a dot at every contact between two curves, scaled
/// uniformly into a fixed square canvas with y pointing up.
pub fn svg(r: &Representation) -> anyhow::Result<String> {
    let pts: Vec<(f64, f64)> = r.iter().flat_map(|(_, c)| c.vertices().iter().map(Point::to_f64)).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 1.0f64, 1.0f64);
    if let Some(&(x, y)) = pts.first() {
        (x0, y0, x1, y1) = (x, y, x, y);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    let map = |p: (f64, f64)| (MARGIN + (p.0 - x0) * scale, CANVAS - MARGIN - (p.1 - y0) * scale);

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#, CANVAS)?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    for (i, (id, c)) in r.iter().enumerate() {
        let mut d = String::new();
        for (j, v) in c.vertices().iter().enumerate() {
            let (x, y) = map(v.to_f64());
            write!(d, "{}{},{}", if j == 0 { "M" } else { " L" }, num(x), num(y))?;
        }
        writeln!(
            out,
            r#"<path id="{}" d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            escape(id),
            COLORS[i % COLORS.len()]
        )?;
    }
    let curves: Vec<_> = r.iter().collect();
    for (a, (_, ca)) in curves.iter().enumerate() {
        for (_, cb) in &curves[a + 1..] {
            for contact in polyline_contacts(ca, cb).contacts {
                let (x, y) = map(contact.point.to_f64());
                writeln!(out, r#"<circle cx="{}" cy="{}" r="2.5" fill="black"/>"#, num(x), num(y))?;
            }
        }
    }
    writeln!(out, "</svg>")?;
    Ok(out)
}
