//! Minimal SVG line plot for spectrum output.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Plots `points` (sorted by x) as a single polyline with labelled axes.
pub fn line_plot(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let (x_min, x_max) = bounds(points.iter().map(|p| p.0));
    let (y_min, y_max) = bounds(points.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y_min) / (y_max - y_min) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<path d="M{m} {b} H{r} M{m} {b} V{m}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    )
    .unwrap();
    let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    writeln!(s, r#"<polyline points="{}" stroke="steelblue" fill="none"/>"#, path.join(" ")).unwrap();
    for (x, anchor, label) in [(MARGIN, "start", x_min), (W - MARGIN, "end", x_max)] {
        writeln!(s, r#"<text x="{x}" y="{}" font-size="12" text-anchor="{anchor}">{label:.3}</text>"#, H - MARGIN + 16.0).unwrap();
    }
    for (y, label) in [(H - MARGIN, y_min), (MARGIN, y_max)] {
        writeln!(s, r#"<text x="{}" y="{y}" font-size="12" text-anchor="end">{label:.3}</text>"#, MARGIN - 4.0).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{x_label}</text>"#, W / 2.0, H - 10.0).unwrap();
    writeln!(s, r#"<text x="14" y="{}" font-size="14" transform="rotate(-90 14 {})" text-anchor="middle">{y_label}</text>"#, H / 2.0, H / 2.0).unwrap();
    s.push_str("</svg>\n");
    s
}

/// Finite range of the values, widened when degenerate.
fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polyline() {
        let svg = line_plot(&[(0.0, 0.0), (2.0, 1.0)], "x", "y");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline points=\"50.00,350.00 590.00,50.00\""));
    }

    #[test]
    fn empty_and_flat_inputs() {
        assert!(line_plot(&[], "x", "y").contains("<polyline points=\"\""));
        assert_eq!(bounds([3.0, 3.0].into_iter()), (2.5, 3.5));
    }
}
