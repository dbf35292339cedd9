//! Self-contained SVG line charts of extraction paths. No rendering
//! dependency, deterministic output, diff-able in tests.

use std::fmt::Write as _;

use hotelling_core::ExtractionPath;

use crate::app::Failure;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 46.0;
const TICKS: usize = 5;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn fmt_tick(x: f64) -> String {
    let s = format!("{x:.3}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() { "0".to_string() } else { trimmed.to_string() }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render one `Q(t)` polyline per path into an 800x500 SVG 1.1 document with
/// axes, tick labels, and a legend built from the scenario labels.
pub fn render_svg(paths: &[&ExtractionPath]) -> Result<String, Failure> {
    if paths.is_empty() {
        return Err(Failure::solver("cannot render an empty set of paths"));
    }
    for path in paths {
        if path.times().len() < 2 {
            return Err(Failure::solver("cannot render a path with fewer than 2 grid points"));
        }
    }

    let t_max = paths
        .iter()
        .flat_map(|p| p.times().last().copied())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let q_max = paths
        .iter()
        .flat_map(|p| p.rates().iter().copied())
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.05;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x = |t: f64| MARGIN_LEFT + t / t_max * plot_w;
    let y = |q: f64| MARGIN_TOP + (1.0 - q / q_max) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" \
         height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>",
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{MARGIN_TOP:.2}\" stroke=\"black\"/>"
    );

    for k in 0..=TICKS {
        let frac = k as f64 / TICKS as f64;
        let t = frac * t_max;
        let q = frac * q_max;
        let tx = x(t);
        let qy = y(q);
        let _ = writeln!(
            svg,
            "<line x1=\"{tx:.2}\" y1=\"{y0:.2}\" x2=\"{tx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{tx:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            y0 + 18.0,
            fmt_tick(t)
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{qy:.2}\" x2=\"{x0:.2}\" y2=\"{qy:.2}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            qy + 4.0,
            fmt_tick(q)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">t</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">Q(t)</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // One polyline per path.
    for (i, path) in paths.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (&t, &q) in path.times().iter().zip(path.rates()) {
            let _ = write!(points, "{:.2},{:.2} ", x(t), y(q));
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.trim_end()
        );
    }

    // Legend.
    let legend_x = MARGIN_LEFT + plot_w + 12.0;
    for (i, path) in paths.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"{legend_x:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"1.5\"/>",
            legend_x + 18.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" class=\"legend\">{}</text>",
            legend_x + 24.0,
            ly + 3.5,
            escape(&path.scenario().to_string())
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
