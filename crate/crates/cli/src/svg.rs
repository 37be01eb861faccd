use std::fmt::Write as _;

use distvar::certify::FiberSamples;

const PANEL: f64 = 320.0;
const PAD: f64 = 30.0;

fn panel(out: &mut String, x0: f64, title: &str, xlabel: &str, ylabel: &str, pts: &[(f64, f64)], range: f64) {
    let _ = writeln!(out, r#"<g transform="translate({x0},{PAD})">"#);
    let _ = writeln!(out, r#"<rect width="{PANEL}" height="{PANEL}" fill="white" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="-10" text-anchor="middle">{title}</text>"#, PANEL / 2.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, PANEL / 2.0, PANEL + 20.0);
    let _ = writeln!(
        out,
        r#"<text x="-15" y="{}" text-anchor="middle" transform="rotate(-90 -15 {})">{ylabel}</text>"#,
        PANEL / 2.0,
        PANEL / 2.0
    );
    for &(x, y) in pts {
        let px = (x + range) / (2.0 * range) * PANEL;
        let py = PANEL - (y + range) / (2.0 * range) * PANEL;
        let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="1"/>"#);
    }
    let _ = writeln!(out, "</g>");
}

/// Two panels: `(arg z, arg w)` over the boundary fibers, and the interior
/// fiber cloud in the `w`-plane.
pub fn variety_svg(samples: &FiberSamples) -> String {
    let boundary: Vec<(f64, f64)> = samples
        .boundary
        .iter()
        .flat_map(|(z, ws)| ws.iter().map(move |w| (z.arg(), w.arg())))
        .collect();
    let interior: Vec<(f64, f64)> = samples.disc.iter().flat_map(|(_, ws)| ws.iter().map(|w| (w.re, w.im))).collect();
    let width = 2.0 * PANEL + 3.0 * PAD + 20.0;
    let height = PANEL + 2.0 * PAD + 20.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    panel(&mut out, PAD + 10.0, "boundary fibers", "arg z", "arg w", &boundary, std::f64::consts::PI);
    panel(&mut out, 2.0 * PAD + PANEL + 10.0, "interior fibers", "Re w", "Im w", &interior, 1.0);
    out.push_str("</svg>\n");
    out
}
