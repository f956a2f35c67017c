use std::fmt::Write;

use super::QuantileRow;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;

/// Median `d` against the multiplier `c` with the interquartile band.
pub fn cutoff_svg(rows: &[QuantileRow], title: &str) -> String {
    let c_max = rows.iter().map(|r| r.c).fold(0.0, f64::max).max(1e-12);
    let x = |c: f64| PAD + (W - 2.0 * PAD) * c / c_max;
    let y = |d: f64| H - PAD - (H - 2.0 * PAD) * d.clamp(0.0, 1.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    // Axes.
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD
    );
    for d in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{d}</text>"#,
            PAD - 4.0,
            y(d) + 3.0
        );
    }
    for r in rows {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
            x(r.c),
            H - PAD + 14.0,
            r.c
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">t / t*</text>"#,
        W / 2.0,
        H - 8.0
    );
    if !rows.is_empty() {
        let mut band = String::new();
        for (i, r) in rows.iter().enumerate() {
            let _ = write!(band, "{}{:.2} {:.2} ", if i == 0 { "M" } else { "L" }, x(r.c), y(r.q3));
        }
        for r in rows.iter().rev() {
            let _ = write!(band, "L{:.2} {:.2} ", x(r.c), y(r.q1));
        }
        let _ = writeln!(s, r##"<path d="{}Z" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>"##, band);
        let line: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", x(r.c), y(r.median)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#08519c" stroke-width="2"/>"##,
            line.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
