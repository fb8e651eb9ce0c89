use std::fmt::Write as _;

use super::BehaviorFeatures;

/// Percentile rank (0–100) of each value, ties sharing the midpoint rank.
pub fn percentile_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    values
        .iter()
        .map(|&v| {
            let less = values.iter().filter(|&&x| x < v).count() as f64;
            let equal = values.iter().filter(|&&x| x == v).count() as f64;
            100.0 * (less + 0.5 * equal) / n
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditorRow {
    pub editor_id: String,
    pub n_sessions: usize,
    pub features: BehaviorFeatures,
    pub xy: [f64; 2],
}

/// Tab-separated editor table with percentile columns for each feature.
pub fn editor_table_tsv(rows: &[EditorRow]) -> String {
    let col = |f: fn(&BehaviorFeatures) -> f64| percentile_ranks(&rows.iter().map(|r| f(&r.features)).collect::<Vec<_>>());
    let p_wait = col(|f| f.avg_first_wait);
    let p_jb = col(|f| f.jump_backs_per_mt_token);
    let p_mouse = col(|f| f.mouse_events_per_mt_token);
    let mut out = String::from(
        "editor_id\tn_sessions\tavg_first_wait\tjump_backs_per_mt_token\tmouse_events_per_mt_token\tx\ty\t\
         pct_first_wait\tpct_jump_backs\tpct_mouse\n",
    );
    for (i, r) in rows.iter().enumerate() {
        let f = &r.features;
        let _ = writeln!(
            out,
            "{}\t{}\t{:.4}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.1}\t{:.1}\t{:.1}",
            r.editor_id,
            r.n_sessions,
            f.avg_first_wait,
            f.jump_backs_per_mt_token,
            f.mouse_events_per_mt_token,
            r.xy[0],
            r.xy[1],
            p_wait[i],
            p_jb[i],
            p_mouse[i]
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
    /// When set, colors the point on a blue-to-red ramp (0–100).
    pub percentile: Option<f64>,
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Scatter plot as a standalone SVG document.
pub fn scatter_svg(points: &[ScatterPoint], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 40.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let (sx, sy) = (span(x0, x1), span(y0, y1));
    let mut labels: Vec<&str> = points.iter().map(|p| p.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(out, "<text x=\"{M}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>", escape(title));
    for p in points {
        let cx = M + (p.x - x0) / sx * (W - 2.0 * M);
        let cy = H - M - (p.y - y0) / sy * (H - 2.0 * M);
        let color = match p.percentile {
            Some(q) => {
                let t = (q / 100.0).clamp(0.0, 1.0);
                format!("rgb({},{},{})", (255.0 * t) as u8, 64, (255.0 * (1.0 - t)) as u8)
            }
            None => {
                let k = labels.binary_search(&p.label.as_str()).unwrap_or(0);
                PALETTE[k % PALETTE.len()].to_owned()
            }
        };
        let _ = writeln!(
            out,
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"{color}\" fill-opacity=\"0.8\"><title>{}</title></circle>",
            escape(&p.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
