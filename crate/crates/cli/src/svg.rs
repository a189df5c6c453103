//! SVG rendering of circle images and the boundary trace.
//!
//! Curves are emitted as one `<path>` polyline each, sampled at a fixed
//! density, with the viewBox fitted to the data. Output is deterministic
//! for fixed inputs: coordinates use fixed-point formatting and curve order
//! is interior circles, exterior circles, then the two trace polylines.

use std::fmt::Write as _;

use anyhow::Result;
use schlicht_core::extensions::{boundary_trace, PlaneExtension};
use schlicht_core::Complex64;

use crate::spec::RunConfig;

const TRACE_EPS: f64 = 5e-3;

struct Curve {
    points: Vec<Complex64>,
    closed: bool,
    class: &'static str,
}

fn circle_image(
    ext: &PlaneExtension,
    radius: f64,
    samples: usize,
) -> Result<Vec<Complex64>, schlicht_core::Error> {
    let mut pts = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = std::f64::consts::TAU * k as f64 / samples as f64;
        let z = Complex64::new(radius * theta.cos(), radius * theta.sin());
        pts.push(ext.evaluate(z)?);
    }
    Ok(pts)
}

/// Renders concentric-circle images (interior and exterior) plus the
/// boundary trace polylines.
pub fn render(
    ext: &PlaneExtension,
    config: &RunConfig,
    circles: usize,
    samples: usize,
) -> Result<String> {
    let mut curves = Vec::new();
    for i in 1..=circles {
        let r = i as f64 / (circles + 1) as f64;
        let pts = circle_image(ext, r, samples)
            .map_err(|e| anyhow::anyhow!("interior circle r={r}: {e}"))?;
        curves.push(Curve { points: pts, closed: true, class: "interior" });
    }
    for i in 1..=circles {
        let r = (circles + 1) as f64 / i as f64;
        if r > 4.0 || r > ext.r_max() {
            continue;
        }
        let pts = circle_image(ext, r, samples)
            .map_err(|e| anyhow::anyhow!("exterior circle r={r}: {e}"))?;
        curves.push(Curve { points: pts, closed: true, class: "exterior" });
    }
    let trace = boundary_trace(ext, samples.max(16), TRACE_EPS)
        .map_err(|e| anyhow::anyhow!("boundary trace: {e}"))?;
    curves.push(Curve { points: trace.inner, closed: true, class: "trace" });
    curves.push(Curve { points: trace.outer, closed: true, class: "trace" });

    // viewBox fitted to the data with a 5% margin; y is flipped so the
    // picture keeps mathematical orientation
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for curve in &curves {
        for p in &curve.points {
            min_x = min_x.min(p.re);
            max_x = max_x.max(p.re);
            min_y = min_y.min(-p.im);
            max_y = max_y.max(-p.im);
        }
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let margin = 0.05 * span;
    let (x0, y0) = (min_x - margin, min_y - margin);
    let (w, h) = (max_x - min_x + 2.0 * margin, max_y - min_y + 2.0 * margin);
    let stroke = 0.002 * span;

    let config_json = serde_json::to_string(config)?;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.6} {y0:.6} {w:.6} {h:.6}">"#
    )?;
    writeln!(svg, "<desc>config: {}</desc>", xml_escape(&config_json))?;
    let stamp = if ext.is_certified() { "certified" } else { "non-certified" };
    writeln!(svg, r#"<desc id="certification">{stamp}</desc>"#)?;
    for curve in &curves {
        let color = match curve.class {
            "interior" => "#4878a8",
            "exterior" => "#70a870",
            _ => "#c03030",
        };
        write!(svg, r#"<path class="{}" fill="none" stroke="{}" stroke-width="{:.6}" d=""#,
            curve.class, color, stroke)?;
        for (i, p) in curve.points.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            write!(svg, "{}{:.6} {:.6}", cmd, p.re, -p.im)?;
        }
        if curve.closed {
            write!(svg, "Z")?;
        }
        writeln!(svg, r#""/>"#)?;
    }
    writeln!(svg, "</svg>")?;
    Ok(svg)
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
