//! Self-contained SVG 1.1 plots: spectrum bar charts and log-log decay
//! curves. No external plotting dependency; the documents are standalone.

use std::fmt::Write as _;

const W: f64 = 860.0;
const H: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

fn document(body: &str, title: &str) -> String {
    format!(
        concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" ",
            "width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"24\" font-family=\"monospace\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
            "{body}</svg>\n"
        ),
        w = W,
        h = H,
        tx = W / 2.0,
        title = xml_escape(title),
        body = body
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn plot_x(frac: f64) -> f64 {
    MARGIN_L + frac * (W - MARGIN_L - MARGIN_R)
}

fn plot_y(frac: f64) -> f64 {
    H - MARGIN_B - frac * (H - MARGIN_T - MARGIN_B)
}

fn axes(body: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        body,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>",
        x0 = plot_x(0.0),
        y0 = plot_y(0.0),
        x1 = plot_x(1.0),
        y1 = plot_y(1.0),
    );
    let _ = writeln!(
        body,
        "<text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{t}</text>",
        x = plot_x(0.5),
        y = H - 14.0,
        t = xml_escape(x_label)
    );
    let _ = writeln!(
        body,
        "<text x=\"18\" y=\"{y}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {y})\">{t}</text>",
        y = plot_y(0.5),
        t = xml_escape(y_label)
    );
}

/// Bar chart of per-bucket hit fractions over gap size.
pub fn spectrum_bar_chart(title: &str, midpoints: &[f64], fractions: &[f64]) -> String {
    assert_eq!(midpoints.len(), fractions.len());
    let mut body = String::new();
    axes(&mut body, "gap size", "hit fraction");
    if midpoints.is_empty() {
        return document(&body, title);
    }
    let x_min = midpoints.first().copied().unwrap_or(0.0);
    let x_max = midpoints.last().copied().unwrap_or(1.0);
    let y_max = fractions.iter().cloned().fold(0.0f64, f64::max).max(1e-12);
    let bar_w = (W - MARGIN_L - MARGIN_R) / midpoints.len() as f64;
    for (&m, &f) in midpoints.iter().zip(fractions) {
        let fx = if x_max > x_min {
            (m - x_min) / (x_max - x_min)
        } else {
            0.5
        };
        let fy = (f / y_max).clamp(0.0, 1.0);
        let x = plot_x(fx) - 0.45 * bar_w;
        let y = plot_y(fy);
        let h = plot_y(0.0) - y;
        let _ = writeln!(
            body,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"steelblue\"/>",
            w = 0.9 * bar_w,
        );
    }
    for (frac, value) in [(0.0, x_min), (1.0, x_max)] {
        let _ = writeln!(
            body,
            "<text x=\"{x:.1}\" y=\"{y}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{value:.3}</text>",
            x = plot_x(frac),
            y = plot_y(0.0) + 16.0,
        );
    }
    let _ = writeln!(
        body,
        "<text x=\"{x}\" y=\"{y:.1}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{m:.3}</text>",
        x = MARGIN_L - 6.0,
        y = plot_y(1.0) + 4.0,
        m = y_max,
    );
    document(&body, title)
}

/// Log-log polyline plot of one or more decay series.
pub fn loglog_plot(title: &str, series: &[(String, Vec<f64>, Vec<f64>)]) -> String {
    let mut body = String::new();
    axes(&mut body, "log10 x", "log10 y");
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (_, xs, ys) in series {
        for (&x, &y) in xs.iter().zip(ys) {
            if x > 0.0 && y > 0.0 {
                pts.push((x.log10(), y.log10()));
            }
        }
    }
    if pts.is_empty() {
        return document(&body, title);
    }
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if x_max - x_min < 1e-12 {
        x_max = x_min + 1.0;
    }
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let colors = ["steelblue", "firebrick", "seagreen", "darkorange"];
    for (si, (label, xs, ys)) in series.iter().enumerate() {
        let color = colors[si % colors.len()];
        let mut path = String::new();
        let mut started = false;
        for (&x, &y) in xs.iter().zip(ys) {
            if x <= 0.0 || y <= 0.0 {
                continue;
            }
            let px = plot_x((x.log10() - x_min) / (x_max - x_min));
            let py = plot_y((y.log10() - y_min) / (y_max - y_min));
            let _ = write!(path, "{}{px:.2},{py:.2} ", if started { "L" } else { "M" });
            started = true;
            let _ = writeln!(
                body,
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{color}\"/>"
            );
        }
        if started {
            let _ = writeln!(
                body,
                "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
            );
        }
        let _ = writeln!(
            body,
            "<text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{t}</text>",
            x = plot_x(1.0) - 180.0,
            y = MARGIN_T + 16.0 * (si as f64 + 1.0),
            t = xml_escape(label)
        );
    }
    for (frac, v) in [(0.0, x_min), (1.0, x_max)] {
        let _ = writeln!(
            body,
            "<text x=\"{x:.1}\" y=\"{y}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{v:.2}</text>",
            x = plot_x(frac),
            y = plot_y(0.0) + 16.0,
        );
    }
    for (frac, v) in [(0.0, y_min), (1.0, y_max)] {
        let _ = writeln!(
            body,
            "<text x=\"{x}\" y=\"{y:.1}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{v:.2}</text>",
            x = MARGIN_L - 6.0,
            y = plot_y(frac) + 4.0,
        );
    }
    document(&body, title)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_are_standalone_svg11() {
        let bar = spectrum_bar_chart("spectrum", &[0.1, 0.2, 0.3], &[0.5, 0.0, 0.9]);
        assert!(bar.starts_with("<?xml"));
        assert!(bar.contains("version=\"1.1\""));
        assert!(bar.contains("xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(bar.trim_end().ends_with("</svg>"));
        let ll = loglog_plot(
            "decay",
            &[("diff".into(), vec![0.4, 0.2, 0.1], vec![0.01, 0.004, 0.001])],
        );
        assert!(ll.contains("<path"));
        assert!(ll.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn escapes_markup_in_titles() {
        let svg = spectrum_bar_chart("a < b & c", &[0.1], &[1.0]);
        assert!(svg.contains("a &lt; b &amp; c"));
    }
}
