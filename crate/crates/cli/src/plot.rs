//! Minimal SVG 1.1 log-log plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Polylines of `curves` on log axes, with horizontal reference lines at the
/// given heights. Non-positive values are dropped.
pub fn log_log_svg(title: &str, x_label: &str, y_label: &str, curves: &[Curve], hlines: &[(f64, &str)]) -> String {
    let positive = |&(x, y): &(f64, f64)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite();
    let pts: Vec<(f64, f64)> = curves.iter().flat_map(|c| c.points.iter().copied().filter(positive)).collect();

    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x.log10());
        x1 = x1.max(x.log10());
        y0 = y0.min(y.log10());
        y1 = y1.max(y.log10());
    }
    for &(h, _) in hlines {
        if h > 0.0 {
            y0 = y0.min(h.log10());
            y1 = y1.max(h.log10());
        }
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    let (x0, x1) = widen(x0, x1);
    let (y0, y1) = widen(y0, y1);

    let sx = |x: f64| MARGIN + (x.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y.log10() - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));

    // axes with decade ticks
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    );
    for d in (x0.floor() as i32)..=(x1.ceil() as i32) {
        let v = 10f64.powi(d);
        let x = sx(v);
        if (left - 0.5..=right + 0.5).contains(&x) {
            let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/>"#, bottom + 5.0);
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle" font-size="11">1e{d}</text>"#, bottom + 18.0);
        }
    }
    for d in (y0.floor() as i32)..=(y1.ceil() as i32) {
        let v = 10f64.powi(d);
        let y = sy(v);
        if (top - 0.5..=bottom + 0.5).contains(&y) {
            let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="11">1e{d}</text>"#, left - 8.0, y + 4.0);
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, WIDTH / 2.0, HEIGHT - 18.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    for &(h, label) in hlines {
        if h > 0.0 {
            let y = sy(h);
            let _ = writeln!(
                s,
                r##"<line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#777777" stroke-dasharray="6 4"/>"##
            );
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#, right, y - 4.0, escape(label));
        }
    }

    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> =
            c.points.iter().copied().filter(positive).map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        if !coords.is_empty() {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, coords.join(" "));
        }
        let ly = top + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, left + 10.0, left + 30.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{}</text>"#, left + 36.0, ly + 4.0, escape(&c.label));
    }
    s.push_str("</svg>\n");
    s
}

fn widen(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emits_polylines_and_reference() {
        let curves = [
            Curve { label: "a".into(), points: vec![(10.0, 9.0), (100.0, 9.8)] },
            Curve { label: "b<c".into(), points: vec![(10.0, 5.0), (100.0, 0.5), (1000.0, 0.0)] },
        ];
        let svg = log_log_svg("t", "N", "y", &curves, &[(std::f64::consts::PI.powi(2), "pi^2")]);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("b&lt;c"));
    }
}
