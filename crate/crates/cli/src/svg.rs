use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Scatter plot of `(log m, pi * phi)` pairs as a standalone SVG 1.1 file.
pub fn scatter(points: &[(f64, f64)], title: &str) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 1.0f64, 0.0f64, std::f64::consts::PI);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let pad = |lo: f64, hi: f64| {
        let d = (hi - lo).max(1e-9) * 0.05;
        (lo - d, hi + d)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(title));
    let _ = writeln!(out, "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let (ax, ay) = (sx(0.0f64.clamp(x0, x1)), sy(0.0f64.clamp(y0, y1)));
    let _ = writeln!(
        out,
        "  <g stroke=\"black\" stroke-width=\"1\">\n    <line x1=\"{:.2}\" y1=\"{ay:.2}\" x2=\"{:.2}\" y2=\"{ay:.2}\"/>\n    <line x1=\"{ax:.2}\" y1=\"{:.2}\" x2=\"{ax:.2}\" y2=\"{:.2}\"/>\n  </g>",
        MARGIN,
        WIDTH - MARGIN,
        HEIGHT - MARGIN,
        MARGIN
    );
    let _ = writeln!(
        out,
        "  <g font-family=\"sans-serif\" font-size=\"12\">\n    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">log mass</text>\n    <text x=\"14\" y=\"{:.2}\" transform=\"rotate(-90 14 {:.2})\" text-anchor=\"middle\">pi * phase</text>\n    <text x=\"{MARGIN}\" y=\"{:.2}\">{x0:.3}</text>\n    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{x1:.3}</text>\n    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{y0:.3}</text>\n    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{y1:.3}</text>\n  </g>",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        HEIGHT - MARGIN + 16.0,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0,
        MARGIN - 4.0,
        HEIGHT - MARGIN,
        MARGIN - 4.0,
        MARGIN + 4.0,
    );
    out.push_str("  <g fill=\"steelblue\" fill-opacity=\"0.8\">\n");
    for &(x, y) in points {
        let _ = writeln!(out, "    <circle class=\"marker\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\"/>", sx(x), sy(y));
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
