//! Minimal self-contained SVG line charts.

use std::fmt::Write as _;

const W: f64 = 720.0;
const H: f64 = 420.0;
const PAD_L: f64 = 70.0;
const PAD_R: f64 = 20.0;
const PAD_T: f64 = 40.0;
const PAD_B: f64 = 50.0;
const MAX_POINTS: usize = 1500;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Chart of at most two series against step `t = 1..`, with an optional
/// dashed horizontal reference.
pub fn line_chart(title: &str, y_label: &str, series: &[(&str, &[f64])], reference: Option<(&str, f64)>) -> String {
    let series = &series[..series.len().min(2)];
    let len = series.iter().map(|s| s.1.len()).max().unwrap_or(0).max(1);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, ys) in series {
        for &y in ys.iter().filter(|y| y.is_finite()) {
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    if let Some((_, r)) = reference {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let x = |i: usize| PAD_L + (W - PAD_L - PAD_R) * i as f64 / (len.max(2) - 1) as f64;
    let y = |v: f64| H - PAD_B - (H - PAD_T - PAD_B) * (v - lo) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{PAD_L} {PAD_T} V{} H{}" stroke="black" fill="none"/>"#,
        H - PAD_B,
        W - PAD_R
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let yy = y(v);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            PAD_L - 6.0,
            yy + 4.0,
            format_tick(v)
        );
        let _ = writeln!(s, r##"<path d="M{} {yy} H{PAD_L}" stroke="#999"/>"##, PAD_L - 3.0);
    }
    for k in 0..=4 {
        let i = (len - 1) * k / 4;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            x(i),
            H - PAD_B + 16.0,
            i + 1
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#, W / 2.0, H - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    if let Some((name, r)) = reference {
        let _ = writeln!(
            s,
            r##"<path d="M{PAD_L} {} H{}" stroke="#555" stroke-dasharray="6 4"/><text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end" fill="#555">{}</text>"##,
            y(r),
            W - PAD_R,
            W - PAD_R,
            y(r) - 4.0,
            escape(name)
        );
    }
    for (j, (name, ys)) in series.iter().enumerate() {
        let stride = ys.len().div_ceil(MAX_POINTS).max(1);
        let mut pts = String::new();
        for (i, v) in ys.iter().enumerate() {
            if (i % stride == 0 || i + 1 == ys.len()) && v.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", x(i), y(*v));
            }
        }
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#, COLORS[j], pts.trim_end());
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
            PAD_L + 10.0,
            PAD_T + 14.0 + 16.0 * j as f64,
            COLORS[j],
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_well_formed() {
        let a: Vec<f64> = (0..5000).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..5000).map(|i| (i as f64).sqrt()).collect();
        let svg = line_chart("regret <cum>", "regret", &[("a", &a), ("b", &b), ("c", &b)], Some(("ref", 10.0)));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("regret &lt;cum&gt;"));
    }

    #[test]
    fn constant_series_does_not_divide_by_zero() {
        let svg = line_chart("flat", "y", &[("a", &[1.0, 1.0])], None);
        assert!(!svg.contains("NaN"));
    }
}
