//! Static SVG plots of competition functions with their zeros marked.

use std::fmt::Write as _;

use crate::analysis::competition::CompetitionFunction;
use crate::analysis::zeros::{ClassifiedZero, ZeroClass};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const SAMPLES: usize = 400;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One curve on the plot.
pub struct Curve<'a> {
    pub label: String,
    pub function: &'a CompetitionFunction<f64>,
    pub zeros: &'a [ClassifiedZero],
}

fn marker_style(class: ZeroClass) -> (&'static str, &'static str) {
    match class {
        ZeroClass::Stable | ZeroClass::EndpointStable => ("#000000", "#000000"),
        ZeroClass::Unstable | ZeroClass::EndpointUnstable => ("#ffffff", "#000000"),
        ZeroClass::Touchpoint => ("#999999", "#000000"),
    }
}

/// Renders `curves` on `[0, 1]`. Stable zeros are filled black, unstable
/// zeros hollow and touchpoints grey.
pub fn competition_svg(title: &str, curves: &[Curve<'_>]) -> String {
    let samples: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|c| {
            (0..=SAMPLES)
                .map(|i| {
                    let x = i as f64 / SAMPLES as f64;
                    (x, c.function.eval(&x))
                })
                .collect()
        })
        .collect();
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for s in &samples {
        for &(_, y) in s {
            if y.is_finite() {
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let px = |x: f64| MARGIN + x * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
    // Frame and zero line.
    writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    writeln!(
        svg,
        r##"<line x1="{}" y1="{y0:.2}" x2="{}" y2="{y0:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        px(0.0),
        px(1.0),
        y0 = py(0.0)
    )
    .unwrap();
    for i in 0..=4 {
        let x = i as f64 / 4.0;
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#, px(x), HEIGHT - MARGIN + 18.0).unwrap();
    }
    for (y, anchor) in [(lo + pad, "end"), (hi - pad, "end")] {
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}">{y:.3e}</text>"#, MARGIN - 6.0, py(y) + 4.0).unwrap();
    }

    for (k, (curve, pts)) in curves.iter().zip(&samples).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.6" points="{}"/>"#, path.join(" ")).unwrap();
        for z in curve.zeros {
            let (fill, stroke) = marker_style(z.class);
            writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{fill}" stroke="{stroke}"><title>{} {}</title></circle>"#,
                px(z.location),
                py(0.0),
                z.class.as_str(),
                z.location
            )
            .unwrap();
        }
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            WIDTH - MARGIN - 100.0,
            WIDTH - MARGIN - 94.0,
            ly + 4.0,
            escape(&curve.label)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::zeros::{find_zeros, ZeroSearch};
    use crate::model::{FitnessModel, TypeAssignment};

    #[test]
    fn half_half_curves_render_with_markers() {
        let ta = TypeAssignment::new(vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        let fs: Vec<_> = [7.0 / 6.0, 4.0 / 3.0]
            .iter()
            .map(|&phi| CompetitionFunction::new(ta.clone(), FitnessModel::Multiplicative { phi, alpha: 0.0 }).unwrap())
            .collect();
        let zs: Vec<_> = fs.iter().map(|f| find_zeros(f, ZeroSearch::default()).unwrap()).collect();
        let curves: Vec<Curve> = fs
            .iter()
            .zip(&zs)
            .map(|(f, z)| Curve {
                label: "phi".into(),
                function: f,
                zeros: z.zeros(),
            })
            .collect();
        let svg = competition_svg("P^M <example>", &curves);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 3 + 2);
        assert!(svg.contains("&lt;example&gt;"));
    }
}
