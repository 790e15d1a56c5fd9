//! Minimal SVG line plots: every column after the first is drawn against the
//! first, with a frame and the axis ranges written at the corners.

use std::fmt::Write as _;

use crate::table::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const STYLES: &[(&str, &str)] = &[
    ("#1f4e9c", "none"),
    ("#b03a2e", "6,4"),
    ("#1e8449", "2,3"),
    ("#7d3c98", "8,3,2,3"),
];

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return None;
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

pub fn render(table: &Table) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN / 2.0, HEIGHT - MARGIN, MARGIN / 2.0);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );

    let xs = || table.rows.iter().map(|r| r[0]);
    let ys = || table.rows.iter().flat_map(|r| r[1..].iter().copied());
    if let (Some((xmin, xmax)), Some((ymin, ymax))) = (range(xs()), range(ys())) {
        let px = |x: f64| x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
        let py = |y: f64| y0 - (y - ymin) / (ymax - ymin) * (y0 - y1);
        for col in 1..table.columns.len() {
            let (color, dash) = STYLES[(col - 1) % STYLES.len()];
            // a non-finite value breaks the line
            let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for r in &table.rows {
                if r[0].is_finite() && r[col].is_finite() {
                    segments.last_mut().unwrap().push((px(r[0]), py(r[col])));
                } else if !segments.last().unwrap().is_empty() {
                    segments.push(Vec::new());
                }
            }
            for seg in segments.iter().filter(|s| !s.is_empty()) {
                let points: Vec<String> =
                    seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-dasharray="{dash}" points="{}"/>"#,
                    points.join(" ")
                );
            }
            let ly = y1 + 14.0 * col as f64;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{ly}" font-size="11" fill="{color}">{}</text>"#,
                x1 - 120.0,
                table.columns[col]
            );
        }
        let label = |out: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{v:.4e}</text>"#
            );
        };
        label(&mut out, x0, y0 + 14.0, "start", xmin);
        label(&mut out, x1, y0 + 14.0, "end", xmax);
        label(&mut out, x0 - 4.0, y0, "end", ymin);
        label(&mut out, x0 - 4.0, y1 + 10.0, "end", ymax);
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        table.columns[0]
    );
    out.push_str("</svg>\n");
    out
}
