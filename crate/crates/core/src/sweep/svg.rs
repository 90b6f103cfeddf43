//! Minimal static SVG renderings of sweep and cycle results.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 10.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    s
}

fn axes(s: &mut String, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) {
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for (v, x, y, anchor) in [
        (x0, MARGIN, H - MARGIN + 15.0, "start"),
        (x1, W - MARGIN, H - MARGIN + 15.0, "end"),
        (y0, MARGIN - 5.0, H - MARGIN, "end"),
        (y1, MARGIN - 5.0, MARGIN + 10.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3e}</text>"#);
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart of labelled series; non-finite points break the line.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let xb = bounds(series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)));
    let yb = bounds(series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)));
    let sx = |x: f64| MARGIN + (x - xb.0) / (xb.1 - xb.0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - yb.0) / (yb.1 - yb.0) * (H - 2.0 * MARGIN);
    let mut s = header(title, x_label, y_label);
    axes(&mut s, xb, yb);
    for (k, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for &(x, y) in pts {
            if x.is_finite() && y.is_finite() {
                let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(x), sy(y));
                pen_down = true;
            } else {
                pen_down = false;
            }
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.trim_end());
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - MARGIN + 5.0 - 120.0,
            MARGIN + 15.0 * (k as f64 + 1.0),
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Heat map of `values[i][j]` over an `x` (rows) by `y` (columns) grid.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], values: &[Vec<f64>]) -> String {
    let vb = bounds(values.iter().flatten().copied());
    let mut s = header(title, x_label, y_label);
    let cw = (W - 2.0 * MARGIN) / xs.len().max(1) as f64;
    let ch = (H - 2.0 * MARGIN) / ys.len().max(1) as f64;
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let fill = if v.is_finite() {
                let t = (v - vb.0) / (vb.1 - vb.0);
                format!("rgb({},{},{})", (255.0 * t) as u8, (80.0 * (1.0 - t)) as u8, (255.0 * (1.0 - t)) as u8)
            } else {
                "#bbbbbb".to_owned()
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                MARGIN + i as f64 * cw,
                H - MARGIN - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes(&mut s, bounds(xs.iter().copied()), bounds(ys.iter().copied()));
    let _ = writeln!(s, r#"<text x="{}" y="40" text-anchor="end">range {:.3e} .. {:.3e}</text>"#, W - MARGIN, vb.0, vb.1);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_documents() {
        let s = line_plot("t", "x", "y", &[("a".into(), vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)])]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("M").count(), 2);
        let h = heatmap("t", "x", "y", &[0.0, 1.0], &[0.0, 1.0], &[vec![0.0, 1.0], vec![2.0, f64::NAN]]);
        assert_eq!(h.matches("<rect x=").count(), 5);
    }
}
