//! Log-log scatter plots as plain SVG text.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use crate::config::Kind;
use crate::run::RunRecord;

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
const REF_COLORS: [&str; 4] = ["#555555", "#8c564b", "#9467bd", "#e377c2"];

/// Series plotted for each kind: (x column, y columns).
fn series(kind: Kind) -> Option<(&'static str, &'static [&'static str])> {
    match kind {
        Kind::Collapse => Some(("eps", &["diam_hi", "injrad"])),
        Kind::Rayleigh => Some(("eps", &["R_eps"])),
        _ => None,
    }
}

/// Log-log scatter of the run with reference slopes 1/μ, 1 − 1/μ, 1/k and 2, each drawn
/// through the first point of the first series. μ comes from the run summary when it
/// has one and is 2 otherwise.
pub fn plot(run: &RunRecord) -> Result<String> {
    if run.rows.len() < 2 {
        bail!("plot needs at least 2 rows, run has {}", run.rows.len());
    }
    let Some((xname, ynames)) = series(run.config.kind) else {
        bail!("no log-log plot is defined for {} runs", run.config.kind);
    };
    let xs = run.column(xname).expect("known column");
    let mut pts: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    for y in ynames {
        let ys = run.column(y).expect("known column");
        let p: Vec<(f64, f64)> = xs
            .iter()
            .zip(&ys)
            .filter_map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) if *x > 0.0 && *y > 0.0 => Some((x.log10(), y.log10())),
                _ => None,
            })
            .collect();
        pts.push((y, p));
    }
    let all: Vec<(f64, f64)> = pts.iter().flat_map(|s| s.1.iter().copied()).collect();
    if all.len() < 2 {
        bail!("fewer than 2 positive points to plot");
    }
    let (x0, x1) = bounds(all.iter().map(|p| p.0));
    let (y0, y1) = bounds(all.iter().map(|p| p.1));
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let sy = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mu: f64 = run.summary_value("mu_hat").and_then(|v| v.parse().ok()).unwrap_or(2.0);
    let k: f64 = run.summary_value("k").and_then(|v| v.parse().ok()).unwrap_or(2.0);
    let refs = [
        (format!("1/μ = {:.3}", 1.0 / mu), 1.0 / mu),
        (format!("1 − 1/μ = {:.3}", 1.0 - 1.0 / mu), 1.0 - 1.0 / mu),
        (format!("1/k = {:.3}", 1.0 / k), 1.0 / k),
        ("2".to_string(), 2.0),
    ];

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<defs><clipPath id="area"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#, W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - LEFT - RIGHT, H - TOP - BOTTOM);
    for d in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = sx(d as f64);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, H - BOTTOM, H - BOTTOM + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#, H - BOTTOM + 18.0);
    }
    for d in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = sy(d as f64);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 8.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xname}</text>"#, (LEFT + W - RIGHT) / 2.0, H - 12.0);

    let anchor = pts[0].1[0];
    let _ = writeln!(s, r#"<g clip-path="url(#area)">"#);
    for (i, (_, slope)) in refs.iter().enumerate() {
        let y = |x: f64| anchor.1 + slope * (x - anchor.0);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-dasharray="5,4"/>"#,
            sx(x0),
            sy(y(x0)),
            sx(x1),
            sy(y(x1)),
            REF_COLORS[i]
        );
    }
    for (i, (_, p)) in pts.iter().enumerate() {
        for (x, y) in p {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#, sx(*x), sy(*y), COLORS[i % COLORS.len()]);
        }
    }
    let _ = writeln!(s, "</g>");

    let lx = W - RIGHT + 10.0;
    let mut ly = TOP + 10.0;
    for (i, (name, _)) in pts.iter().enumerate() {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, lx + 5.0, ly - 4.0, COLORS[i % COLORS.len()]);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">{name}</text>"#, lx + 14.0);
        ly += 16.0;
    }
    for (i, (label, _)) in refs.iter().enumerate() {
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-dasharray="5,4"/>"#, ly - 4.0, lx + 10.0, ly - 4.0, REF_COLORS[i]);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">slope {label}</text>"#, lx + 14.0);
        ly += 16.0;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Padded range of the values.
fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use crate::run::run;

    #[test]
    fn plot_contains_points_and_references() {
        let c = ExperimentConfig::parse("kind = collapse\nalpha = phi\neps_min = 2^-10\nconvergents = false\n").unwrap();
        let r = run(&c).unwrap();
        let svg = plot(&r).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 2 * r.rows.len() + 2);
        assert_eq!(svg.matches("stroke-dasharray").count(), 8);
        assert!(svg.contains("slope 1/μ = 0.500"));
        assert_eq!(plot(&r).unwrap(), svg);
    }

    #[test]
    fn single_row_is_an_error() {
        let c = ExperimentConfig::parse("kind = rayleigh\nalpha = rat:1\neps_min = 0.5\neps_max = 0.5\n").unwrap();
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(plot(&r).unwrap_err().to_string().contains("at least 2 rows"));
    }
}
