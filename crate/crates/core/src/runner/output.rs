use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::table::{SweepResult, Table};
use crate::error::{Error, Result};

/// Writes the primary CSV to `primary`, extra tables next to it as
/// `<stem>_<name>.csv`, metadata as `<stem>.meta.json`, and optionally
/// `<stem>.svg`. Returns the files written.
pub fn write_result(result: &SweepResult, primary: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    if let Some(dir) = primary.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    let stem = primary
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Config(format!("bad output path {}", primary.display())))?;
    let sibling = |suffix: &str| primary.with_file_name(format!("{stem}{suffix}"));
    let mut written = Vec::new();
    for (i, t) in result.tables.iter().enumerate() {
        let path = if i == 0 {
            primary.to_path_buf()
        } else {
            sibling(&format!("_{}.csv", t.name))
        };
        t.save_csv(&path)?;
        written.push(path);
    }
    let meta = sibling(".meta.json");
    let json = serde_json::to_string_pretty(&result.metadata).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&meta, json + "\n")?;
    written.push(meta);
    if svg {
        let path = sibling(".svg");
        std::fs::write(&path, svg_plot(result.primary()))?;
        written.push(path);
    }
    Ok(written)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Line plot of every column against the first one. Probability and leakage
/// columns are left out when a witness column is present.
pub fn svg_plot(t: &Table) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let skip = |c: &str| t.column_index("delta").is_some() && matches!(c, "p_plus" | "p_minus" | "leakage");
    let series: Vec<usize> = (1..t.columns.len()).filter(|&j| !skip(&t.columns[j])).collect();
    let finite = |v: f64| v.is_finite();
    let xs: Vec<f64> = t.rows.iter().map(|r| r[0]).collect();
    let (x0, x1) = bounds(xs.iter().copied().filter(|v| finite(*v)));
    let (y0, y1) = bounds(
        series
            .iter()
            .flat_map(|&j| t.rows.iter().map(move |r| r[j]))
            .filter(|v| finite(*v)),
    );
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(
        s,
        r#"<text x="{m}" y="{}" font-size="12">{}</text>"#,
        m - 8.0,
        escape(&t.name)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 12.0,
        escape(&t.columns[0])
    );
    let _ = writeln!(s, r#"<text x="{m}" y="{}" font-size="10">{x0:.3}</text>"#, h - m + 14.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{x1:.3}</text>"#,
        w - m,
        h - m + 14.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{y0:.3}</text>"#,
        m - 4.0,
        h - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{y1:.3}</text>"#,
        m - 4.0,
        m + 10.0
    );
    for (k, &j) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = t
            .rows
            .iter()
            .filter(|r| finite(r[0]) && finite(r[j]))
            .map(|r| format!("{:.2},{:.2}", sx(r[0]), sy(r[j])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}" text-anchor="end">{}</text>"#,
            w - m - 6.0,
            m + 16.0 + 14.0 * k as f64,
            escape(&t.columns[j])
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
