//! CSV rows and the run manifest.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::Result;
use crate::obs::{ExponentFit, MomentSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub step: u64,
    pub sigma: f64,
    pub energy: f64,
    pub m4: f64,
    pub m6: f64,
    pub norm_error: f64,
}

pub fn series_rows(series: &MomentSeries) -> Vec<SeriesRow> {
    (0..series.len())
        .map(|i| SeriesRow {
            step: series.steps[i],
            sigma: series.sigma[i],
            energy: series.energy[i],
            m4: series.m4[i],
            m6: series.m6[i],
            norm_error: series.norm_error[i],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRow {
    pub p: i64,
    pub q: i64,
    pub c: f64,
    pub residual_rms: f64,
    pub n_lo: u64,
    pub n_hi: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaRow {
    pub kappa1: f64,
    pub kappa2: f64,
    pub c: f64,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalRow {
    pub step: u64,
    pub mean_p2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub observable: String,
    pub c: f64,
    pub window: [u64; 2],
    pub residual_rms: f64,
    pub points_used: usize,
}

impl NamedFit {
    pub fn new(observable: &str, fit: &ExponentFit) -> Self {
        Self {
            observable: observable.to_string(),
            c: fit.c,
            window: [fit.window.0, fit.window.1],
            residual_rms: fit.residual_rms,
            points_used: fit.points_used,
        }
    }
}

/// Per-run entry of a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_norm_drift: Option<f64>,
    pub fits: Vec<NamedFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub config: RunConfig,
    pub wall_time_s: f64,
    pub runs: Vec<RunRecord>,
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    write_atomic(path, &bytes)
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("rows.csv");
        let rows = vec![
            ResonanceRow {
                p: 1,
                q: 3,
                c: 0.1 + 0.2,
                residual_rms: 1e-3,
                n_lo: 418,
                n_hi: 4181,
            },
            ResonanceRow {
                p: 2,
                q: 5,
                c: 0.75,
                residual_rms: 2.5e-2,
                n_lo: 418,
                n_hi: 4181,
            },
        ];
        write_csv(&path, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("p,q,c,residual_rms,n_lo,n_hi\n"));
        assert_eq!(read_csv::<ResonanceRow>(&path).unwrap(), rows);
        assert!(!dir.path().join("sub").join("rows.csv.tmp").exists());
    }
}
