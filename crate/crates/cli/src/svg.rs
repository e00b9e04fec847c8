//! Hand-emitted SVG line charts: polylines and axes only, no plotting
//! dependency, byte-deterministic for fixed input so golden-file checks
//! work.

use std::fmt::Write;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f"];
/// Cap on points per polyline; longer series are strided down.
const MAX_POINTS: usize = 2000;

pub struct Series<'a> {
    pub name: &'a str,
    pub times: &'a [f64],
    pub values: &'a [f64],
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

/// Render series into a standalone SVG chart with axes, tick labels and a
/// legend.
pub fn emit_svg(title: &str, series: &[Series<'_>]) -> String {
    assert!(!series.is_empty(), "need at least one series");
    let mut tmin = f64::INFINITY;
    let mut tmax = f64::NEG_INFINITY;
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for s in series {
        assert_eq!(s.times.len(), s.values.len());
        for (&t, &v) in s.times.iter().zip(s.values.iter()) {
            tmin = tmin.min(t);
            tmax = tmax.max(t);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
    }
    if tmax - tmin < 1e-12 {
        tmax = tmin + 1.0;
    }
    if vmax - vmin < 1e-12 {
        vmax = vmin + 1.0;
        vmin -= 1.0;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |t: f64| MARGIN_L + (t - tmin) / (tmax - tmin) * plot_w;
    let sy = |v: f64| MARGIN_T + (vmax - v) / (vmax - vmin) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    // axes
    let _ = writeln!(
        out,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt2(MARGIN_L),
        fmt2(MARGIN_T),
        fmt2(MARGIN_L),
        fmt2(HEIGHT - MARGIN_B)
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt2(MARGIN_L),
        fmt2(HEIGHT - MARGIN_B),
        fmt2(WIDTH - MARGIN_R),
        fmt2(HEIGHT - MARGIN_B)
    );
    // tick labels at the corners of the data range
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        fmt2(MARGIN_L),
        fmt2(HEIGHT - MARGIN_B + 18.0),
        fmt_tick(tmin)
    );
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        fmt2(WIDTH - MARGIN_R),
        fmt2(HEIGHT - MARGIN_B + 18.0),
        fmt_tick(tmax)
    );
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
        fmt2(MARGIN_L - 6.0),
        fmt2(HEIGHT - MARGIN_B),
        fmt_tick(vmin)
    );
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
        fmt2(MARGIN_L - 6.0),
        fmt2(MARGIN_T + 10.0),
        fmt_tick(vmax)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let stride = s.times.len().div_ceil(MAX_POINTS).max(1);
        let mut points = String::new();
        let mut k = 0;
        while k < s.times.len() {
            let _ = write!(points, "{},{} ", fmt2(sx(s.times[k])), fmt2(sy(s.values[k])));
            k += stride;
        }
        // always include the final point
        if (s.times.len() - 1) % stride != 0 {
            let k = s.times.len() - 1;
            let _ = write!(points, "{},{} ", fmt2(sx(s.times[k])), fmt2(sy(s.values[k])));
        }
        let _ = writeln!(
            out,
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" class=\"series-{i}\" points=\"{}\"/>",
            points.trim_end()
        );
        let ly = MARGIN_T + 16.0 * i as f64 + 6.0;
        let _ = writeln!(
            out,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            fmt2(WIDTH - MARGIN_R - 150.0),
            fmt2(ly),
            fmt2(WIDTH - MARGIN_R - 120.0),
            fmt2(ly)
        );
        let _ = writeln!(
            out,
            "  <text x=\"{}\" y=\"{}\">{}</text>",
            fmt2(WIDTH - MARGIN_R - 112.0),
            fmt2(ly + 4.0),
            escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.abs() >= 1e4 || x.abs() < 1e-2 {
        format!("{x:.2e}")
    } else {
        format!("{x:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_horizontal_polyline() {
        let times: Vec<f64> = (0..=10).map(f64::from).collect();
        let values = vec![2.5; 11];
        let svg = emit_svg(
            "flat",
            &[Series {
                name: "P",
                times: &times,
                values: &values,
            }],
        );
        let line = svg.lines().find(|l| l.contains("polyline")).unwrap();
        // all y coordinates identical
        let ys: Vec<&str> = line
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap()
            .split_whitespace()
            .map(|p| p.split(',').nth(1).unwrap())
            .collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]), "{ys:?}");
    }

    #[test]
    fn paired_series_get_distinct_strokes() {
        let times: Vec<f64> = (0..=10).map(f64::from).collect();
        let a: Vec<f64> = times.iter().map(|t| t * 1.0).collect();
        let b: Vec<f64> = times.iter().map(|t| t * -0.5).collect();
        let svg = emit_svg(
            "pair",
            &[
                Series { name: "P", times: &times, values: &a },
                Series { name: "OU", times: &times, values: &b },
            ],
        );
        assert!(svg.contains("class=\"series-0\"") && svg.contains("class=\"series-1\""));
        assert!(svg.contains("#1f77b4") && svg.contains("#d62728"));
        assert!(svg.contains(">P<") && svg.contains(">OU<"));
    }

    #[test]
    fn deterministic_bytes() {
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let vals: Vec<f64> = times.iter().map(|t| (t * 0.7).sin()).collect();
        let s1 = emit_svg("x", &[Series { name: "s", times: &times, values: &vals }]);
        let s2 = emit_svg("x", &[Series { name: "s", times: &times, values: &vals }]);
        assert_eq!(s1, s2);
    }

    #[test]
    fn long_series_downsampled() {
        let times: Vec<f64> = (0..100_000).map(|k| k as f64).collect();
        let vals = vec![1.0; 100_000];
        let svg = emit_svg("big", &[Series { name: "s", times: &times, values: &vals }]);
        let line = svg.lines().find(|l| l.contains("polyline")).unwrap();
        let n_points = line.matches(',').count();
        assert!(n_points <= MAX_POINTS + 2, "{n_points} points");
    }
}
