//! Paths sampled on a uniform time grid.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// A path sampled at times `(k - origin_index)·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    pub dt: f64,
    pub values: Vec<f64>,
    /// Index of time zero; `0` for one-sided paths.
    pub origin_index: usize,
    /// Seed of the run that produced the path, if any.
    pub seed: Option<u64>,
}

/// Metadata written next to the CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub dt: f64,
    pub origin_index: usize,
    pub seed: Option<u64>,
    pub len: usize,
}

impl PathGrid {
    pub fn new(dt: f64, values: Vec<f64>, origin_index: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return domain(format!("grid step must be positive, got {dt}"));
        }
        if values.is_empty() || origin_index >= values.len() {
            return domain("grid needs values and an origin inside them");
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("non-finite value at index {k}"));
        }
        Ok(PathGrid {
            dt,
            values,
            origin_index,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Length of the time interval covered.
    pub fn duration(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        (k as f64 - self.origin_index as f64) * self.dt
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta {
            dt: self.dt,
            origin_index: self.origin_index,
            seed: self.seed,
            len: self.values.len(),
        }
    }

    /// `index,value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(24 * self.values.len() + 12);
        s.push_str("index,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{k},{v}");
        }
        s
    }

    pub fn from_csv(text: &str, meta: &GridMeta) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("index,value") {
            return Err(Error::Parse("missing `index,value` header".into()));
        }
        let mut values = Vec::with_capacity(meta.len);
        for (row, line) in lines.enumerate() {
            let (k, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("row {row}: expected two fields")))?;
            if k.trim().parse::<usize>().ok() != Some(row) {
                return Err(Error::Parse(format!("row {row}: index out of sequence")));
            }
            values.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {row}: {e}")))?,
            );
        }
        if values.len() != meta.len {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                meta.len,
                values.len()
            )));
        }
        let mut g = PathGrid::new(meta.dt, values, meta.origin_index)?;
        g.seed = meta.seed;
        Ok(g)
    }

    /// Writes `<path>` as CSV and `<path>.json` as the sidecar.
    pub fn write_files(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        let meta =
            serde_json::to_string_pretty(&self.meta()).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(sidecar_path(path), meta)?;
        Ok(())
    }

    pub fn read_files(path: &Path) -> Result<Self> {
        let meta: GridMeta = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        PathGrid::from_csv(&std::fs::read_to_string(path)?, &meta)
    }
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
