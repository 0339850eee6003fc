//! Self-contained SVG plot of `log10 ext` and `log10 hyp` against `t`.

use std::fmt::Write;

use teichscan_core::experiments::ScanResult;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let mut d = String::new();
    for (k, (x, y)) in points.iter().enumerate() {
        if k > 0 {
            d.push(' ');
        }
        let _ = write!(d, "{x:.2},{y:.2}");
    }
    format!("<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{d}\"/>\n")
}

pub fn plot(scan: &ScanResult, title: &str) -> String {
    let series = |f: fn(&teichscan_core::experiments::ScanRow) -> f64| -> Vec<(f64, f64)> {
        scan.rows.iter().filter(|r| r.is_clean() && f(r) > 0.0).map(|r| (r.t, f(r).log10())).collect()
    };
    let ext = series(|r| r.ext);
    let hyp = series(|r| r.hyp);
    let all: Vec<&(f64, f64)> = ext.iter().chain(hyp.iter()).collect();
    let span = |g: fn(&(f64, f64)) -> f64| {
        let lo = all.iter().map(|p| g(p)).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|p| g(p)).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let map = |pts: &[(f64, f64)]| -> Vec<(f64, f64)> {
        pts.iter()
            .map(|&(x, y)| (PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD), H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD)))
            .collect()
    };
    let mut out = String::new();
    let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">");
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(out, "<text x=\"{PAD}\" y=\"{}\" font-size=\"14\" font-family=\"sans-serif\">{}</text>", PAD - 16.0, escape(title));
    let label = |x: f64, y: f64, s: String, anchor: &str| {
        format!("<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"{anchor}\">{s}</text>\n")
    };
    out.push_str(&label(PAD, H - PAD + 16.0, format!("{x0:.2}"), "start"));
    out.push_str(&label(W - PAD, H - PAD + 16.0, format!("{x1:.2}"), "end"));
    out.push_str(&label(W / 2.0, H - 12.0, "t".into(), "middle"));
    out.push_str(&label(PAD - 6.0, H - PAD, format!("{y0:.2}"), "end"));
    out.push_str(&label(PAD - 6.0, PAD + 10.0, format!("{y1:.2}"), "end"));
    out.push_str(&label(PAD - 6.0, H / 2.0, "log10".into(), "end"));
    out.push_str(&polyline(&map(&ext), "#1f5fbf"));
    out.push_str(&polyline(&map(&hyp), "#c0392b"));
    out.push_str(&label(W - PAD - 4.0, PAD + 16.0, "ext".into(), "end").replace("<text ", "<text fill=\"#1f5fbf\" "));
    out.push_str(&label(W - PAD - 4.0, PAD + 30.0, "hyp".into(), "end").replace("<text ", "<text fill=\"#c0392b\" "));
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
