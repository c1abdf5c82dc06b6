use std::fmt;

use serde::Serialize;

use super::table::Table;
use crate::error::{Error, Result};

/// Absolute differences of one column shared by both tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnDiff {
    pub column: String,
    pub max_abs: f64,
    pub mean_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub rows: usize,
    pub columns: Vec<ColumnDiff>,
    /// Columns present in only one of the tables.
    pub unmatched: Vec<String>,
    /// `(max − min)/2` of the `delta` column in B over the same in A.
    pub visibility_ratio: Option<f64>,
}

impl DiffReport {
    pub fn max_abs(&self) -> f64 {
        self.columns.iter().map(|c| c.max_abs).fold(0.0, f64::max)
    }

    pub fn exceeds(&self, threshold: f64) -> bool {
        !(self.max_abs() <= threshold)
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {}", self.rows)?;
        writeln!(f, "{:<20} {:>24} {:>24}", "column", "max_abs", "mean_abs")?;
        for c in &self.columns {
            writeln!(f, "{:<20} {:>24.16e} {:>24.16e}", c.column, c.max_abs, c.mean_abs)?;
        }
        for u in &self.unmatched {
            writeln!(f, "unmatched column: {u}")?;
        }
        if let Some(r) = self.visibility_ratio {
            writeln!(f, "visibility_ratio: {r:.10}")?;
        }
        write!(f, "max_abs: {:.16e}", self.max_abs())
    }
}

/// Half the peak-to-peak excursion of a column, ignoring non-finite entries.
pub fn half_range(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    0.5 * (hi - lo)
}

/// Column-wise comparison of two tables with the same row count. Columns are
/// matched by name; NaN in the same place on both sides counts as equal.
pub fn diff(a: &Table, b: &Table) -> Result<DiffReport> {
    if a.rows.len() != b.rows.len() {
        return Err(Error::Config(format!(
            "tables have {} and {} rows",
            a.rows.len(),
            b.rows.len()
        )));
    }
    let mut columns = Vec::new();
    let mut unmatched = Vec::new();
    for (i, name) in a.columns.iter().enumerate() {
        let Some(j) = b.column_index(name) else {
            unmatched.push(name.clone());
            continue;
        };
        let (mut max, mut sum) = (0f64, 0f64);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            let (x, y) = (ra[i], rb[j]);
            let d = if x.is_nan() && y.is_nan() || x == y {
                0.0
            } else {
                (x - y).abs()
            };
            let d = if d.is_nan() { f64::INFINITY } else { d };
            max = max.max(d);
            sum += d;
        }
        let n = a.rows.len().max(1) as f64;
        columns.push(ColumnDiff {
            column: name.clone(),
            max_abs: max,
            mean_abs: sum / n,
        });
    }
    unmatched.extend(b.columns.iter().filter(|c| a.column_index(c).is_none()).cloned());
    let visibility_ratio = match (a.column("delta"), b.column("delta")) {
        (Some(da), Some(db)) if half_range(&da) > 0.0 => Some(half_range(&db) / half_range(&da)),
        _ => None,
    };
    Ok(DiffReport {
        rows: a.rows.len(),
        columns,
        unmatched,
        visibility_ratio,
    })
}
