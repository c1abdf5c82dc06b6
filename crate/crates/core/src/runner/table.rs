use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{FringeFit, WitnessPoint};

/// Named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Witness rows plus any number of extra columns of the same length.
    pub fn from_points(name: &str, points: &[WitnessPoint], extra: &[(&str, Vec<f64>)]) -> Self {
        let with_fc = points.iter().any(|p| p.fisher_c.is_some());
        let with_leak = points.iter().any(|p| p.leakage.is_some());
        let mut cols = vec!["phi", "p_plus", "p_minus", "delta"];
        if with_fc {
            cols.push("fisher_c");
        }
        if with_leak {
            cols.push("leakage");
        }
        cols.extend(extra.iter().map(|(n, _)| *n));
        let mut t = Table::new(name, &cols);
        for (i, p) in points.iter().enumerate() {
            let mut row = vec![p.phi, p.p_plus, p.p_minus, p.delta];
            if with_fc {
                row.push(p.fisher_c.unwrap_or(f64::NAN));
            }
            if with_leak {
                row.push(p.leakage.unwrap_or(f64::NAN));
            }
            row.extend(extra.iter().map(|(_, v)| v[i]));
            t.push(row);
        }
        t
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| format_value(*v)))
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ASCII")
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: Read>(name: &str, r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let columns: Vec<String> = rd
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("row {}: '{s}' is not a number", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Config(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Table {
            name: name.to_string(),
            columns,
            rows,
        })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
        Self::read_csv(name, f)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(format!("csv: {e}"))
}

/// Scientific notation with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub engine: String,
    pub version: String,
    pub wall_time_s: f64,
    /// Config with all defaults filled in.
    pub config: String,
    pub units: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FringeFit>,
    /// Scalar diagnostics (flip probability, first-test probability, ...).
    pub values: BTreeMap<String, f64>,
}

/// Output of one experiment: the primary table first, then any extra panels.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Phase-sweep rows of the primary table; empty for photon-number scans.
    pub points: Vec<WitnessPoint>,
    pub tables: Vec<Table>,
    pub metadata: Metadata,
}

impl SweepResult {
    pub fn primary(&self) -> &Table {
        &self.tables[0]
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}
