//! Standalone SVG step charts of data profiles.

use std::fmt::Write;

use seqmads_core::harness::ProfileTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 140.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round tick spacing giving at most about `target` ticks over `[0, max]`.
fn tick_step(max: f64, target: f64) -> f64 {
    let raw = max / target;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

/// Renders one right-continuous step line per procedure: fraction of
/// instances solved against evaluation cost, y fixed to `[0, 1]`.
pub fn render_profiles(table: &ProfileTable, title: &str) -> String {
    let x_max = table.costs.iter().copied().max().unwrap_or(0).max(1) as f64;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |c: f64| LEFT + c / x_max * plot_w;
    let sy = |v: f64| TOP + (1.0 - v.clamp(0.0, 1.0)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, escape(title));

    // grid and ticks
    let step = tick_step(x_max, 8.0).max(1.0);
    let mut c = 0.0;
    while c <= x_max + 1e-9 {
        let x = sx(c);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##, TOP + plot_h);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{c}</text>"#, TOP + plot_h + 16.0);
        c += step;
    }
    for k in 0..=10 {
        let v = k as f64 / 10.0;
        let y = sy(v);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, LEFT + plot_w);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">evaluation cost</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">fraction of instances solved</text>"#,
        TOP + plot_h / 2.0
    );

    for (k, curve) in table.curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut d = String::new();
        let mut prev: Option<f64> = None;
        for (&cost, &v) in table.costs.iter().zip(&curve.fractions) {
            let (x, y) = (sx(cost as f64), sy(v));
            match prev {
                None => {
                    let _ = write!(d, "M{x:.2},{y:.2}");
                }
                Some(py) => {
                    let _ = write!(d, " H{x:.2}");
                    if py != y {
                        let _ = write!(d, " V{y:.2}");
                    }
                }
            }
            prev = Some(y);
        }
        if prev.is_some() {
            let _ = write!(d, " H{:.2}", sx(x_max));
        }
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#);

        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = LEFT + plot_w + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&curve.procedure.to_string().to_uppercase())
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use seqmads_core::harness::ProfileCurve;
    use seqmads_core::ProcedureId;

    fn table() -> ProfileTable {
        ProfileTable {
            costs: vec![0, 500, 2_000, 10_000],
            curves: vec![
                ProfileCurve { procedure: ProcedureId::Eb, fractions: vec![0.0, 0.0, 0.5, 0.75] },
                ProfileCurve { procedure: ProcedureId::Int, fractions: vec![0.0, 0.25, 0.75, 1.0] },
            ],
        }
    }

    #[test]
    fn one_path_and_legend_entry_per_procedure() {
        let svg = render_profiles(&table(), "a < b");
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<path ").count(), 2);
        assert!(svg.contains(">EB</text>") && svg.contains(">INT</text>"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains(">0.0</text>") && svg.contains(">1.0</text>"));
        assert!(svg.contains(">10000</text>"));
    }

    #[test]
    fn steps_are_horizontal_then_vertical() {
        let svg = render_profiles(&table(), "");
        let path = svg.lines().find(|l| l.contains("stroke=\"#d62728\"") && l.starts_with("<path")).unwrap();
        // Int steps up at 500 and holds its last value to the right edge
        assert!(path.contains("M70.00,380.00 H95.50 V292.50"), "{path}");
        assert!(path.ends_with("H580.00\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>"), "{path}");
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(tick_step(10_000.0, 8.0), 2_000.0);
        assert_eq!(tick_step(1.0, 8.0), 0.2);
        assert_eq!(tick_step(333.0, 8.0), 50.0);
    }
}
