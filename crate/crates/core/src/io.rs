//! CSV import/export for channels, weights, gain tables, and analysis
//! reports.
//!
//! Every numeric value is written with 17 significant digits, which
//! round-trips an f64 exactly: exporting and re-importing a channel or
//! weight file reproduces the values bit for bit. Channel files carry a
//! JSON sidecar (`<file>.meta.json`) with the wavelength and element count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{ReciprocityReport, SweepResult};
use crate::arrays::GainTable;
use crate::beamform::Weights;
use crate::channel::ChannelVector;
use crate::{Error, Result};

/// Formats a float with 17 significant digits (exact f64 round-trip).
pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelMeta {
    schema_version: u32,
    wavelength_m: f64,
    num_elements: usize,
}

/// Writes a channel vector as `index,re,im` rows (1-based element index)
/// plus the metadata sidecar.
pub fn write_channel_csv(path: impl AsRef<Path>, h: &ChannelVector) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("index,re,im\n");
    for (i, e) in h.entries.iter().enumerate() {
        writeln!(out, "{},{},{}", i + 1, g17(e.re), g17(e.im)).expect("string write");
    }
    fs::write(path, out)?;
    let meta = ChannelMeta {
        schema_version: 1,
        wavelength_m: h.wavelength,
        num_elements: h.len(),
    };
    fs::write(
        sidecar_path(path),
        serde_json::to_string_pretty(&meta).expect("serializable meta"),
    )?;
    Ok(())
}

/// Reads a channel vector and its sidecar.
pub fn read_channel_csv(path: impl AsRef<Path>) -> Result<ChannelVector> {
    let path = path.as_ref();
    let meta_text = fs::read_to_string(sidecar_path(path)).map_err(|e| {
        Error::Parse(format!(
            "channel sidecar {} unreadable: {e}",
            sidecar_path(path).display()
        ))
    })?;
    let meta: ChannelMeta = serde_json::from_str(&meta_text)
        .map_err(|e| Error::Parse(format!("channel sidecar: {e}")))?;
    let entries = read_complex_rows(path)?;
    if entries.len() != meta.num_elements {
        return Err(Error::Parse(format!(
            "channel file has {} rows, sidecar says {}",
            entries.len(),
            meta.num_elements
        )));
    }
    Ok(ChannelVector::new(entries, meta.wavelength_m))
}

/// Writes weights as `index,re,im` rows (1-based element index).
pub fn write_weights_csv(path: impl AsRef<Path>, w: &Weights) -> Result<()> {
    let mut out = String::from("index,re,im\n");
    for (i, e) in w.entries().iter().enumerate() {
        writeln!(out, "{},{},{}", i + 1, g17(e.re), g17(e.im)).expect("string write");
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Reads a weights file; entries must form a unit-norm vector.
pub fn read_weights_csv(path: impl AsRef<Path>) -> Result<Weights> {
    let entries = read_complex_rows(path.as_ref())?;
    Weights::from_normalized(entries)
}

fn read_complex_rows(path: &Path) -> Result<Vec<Complex64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?;
    if header.trim() != "index,re,im" {
        return Err(Error::Parse(format!(
            "{}: expected header 'index,re,im', got '{header}'",
            path.display()
        )));
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "{}:{}: expected 3 fields",
                path.display(),
                lineno + 2
            )));
        }
        let index: usize = fields[0].trim().parse().map_err(|_| {
            Error::Parse(format!("{}:{}: bad index", path.display(), lineno + 2))
        })?;
        if index != entries.len() + 1 {
            return Err(Error::Parse(format!(
                "{}:{}: indices must run 1..L in order",
                path.display(),
                lineno + 2
            )));
        }
        let re: f64 = fields[1].trim().parse().map_err(|_| {
            Error::Parse(format!("{}:{}: bad re value", path.display(), lineno + 2))
        })?;
        let im: f64 = fields[2].trim().parse().map_err(|_| {
            Error::Parse(format!("{}:{}: bad im value", path.display(), lineno + 2))
        })?;
        entries.push(Complex64::new(re, im));
    }
    if entries.is_empty() {
        return Err(Error::Parse(format!("{}: no data rows", path.display())));
    }
    Ok(entries)
}

/// Reads a tabulated gain pattern from `theta_deg,phi_deg,gain_db` rows.
/// The rows must fill a full rectangular grid (any order).
pub fn read_gain_table_csv(path: impl AsRef<Path>) -> Result<GainTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?;
    if header.trim() != "theta_deg,phi_deg,gain_db" {
        return Err(Error::Parse(format!(
            "{}: expected header 'theta_deg,phi_deg,gain_db', got '{header}'",
            path.display()
        )));
    }
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "{}:{}: expected 3 fields",
                path.display(),
                lineno + 2
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| {
                Error::Parse(format!(
                    "{}:{}: bad {what} value",
                    path.display(),
                    lineno + 2
                ))
            })
        };
        rows.push((
            parse(fields[0], "theta_deg")?,
            parse(fields[1], "phi_deg")?,
            parse(fields[2], "gain_db")?,
        ));
    }
    let mut thetas: Vec<f64> = rows.iter().map(|r| r.0).collect();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup();
    let mut phis: Vec<f64> = rows.iter().map(|r| r.1).collect();
    phis.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phis.dedup();
    if rows.len() != thetas.len() * phis.len() {
        return Err(Error::Parse(format!(
            "{}: {} rows do not fill a {} x {} grid",
            path.display(),
            rows.len(),
            thetas.len(),
            phis.len()
        )));
    }
    let mut gains = vec![f64::NAN; thetas.len() * phis.len()];
    for (t, p, g_db) in rows {
        let it = thetas.partition_point(|x| *x < t);
        let ip = phis.partition_point(|x| *x < p);
        let slot = &mut gains[it * phis.len() + ip];
        if !slot.is_nan() {
            return Err(Error::Parse(format!(
                "{}: duplicate grid cell at theta={t}, phi={p}",
                path.display()
            )));
        }
        *slot = crate::from_db(g_db);
    }
    if gains.iter().any(|g| g.is_nan()) {
        return Err(Error::Parse(format!(
            "{}: grid has missing cells",
            path.display()
        )));
    }
    GainTable::new(
        thetas.iter().map(|t| t.to_radians()).collect(),
        phis.iter().map(|p| p.to_radians()).collect(),
        gains,
    )
}

/// Writes per-component power budgets as `k,pg,pg_db`.
pub fn write_budget_csv(path: impl AsRef<Path>, budgets: &[f64]) -> Result<()> {
    let mut out = String::from("k,pg,pg_db\n");
    for (k, pg) in budgets.iter().enumerate() {
        writeln!(out, "{},{},{}", k + 1, g17(*pg), g17(crate::db(*pg))).expect("string write");
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Writes a reciprocity report as
/// `snr_db,pg_analytic_db,pg_mc_db,sigma,cov1,cov2,cov3,regime`.
pub fn write_reciprocity_csv(path: impl AsRef<Path>, report: &ReciprocityReport) -> Result<()> {
    let mut out = String::from("snr_db,pg_analytic_db,pg_mc_db,sigma,cov1,cov2,cov3,regime\n");
    for p in &report.points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            g17(p.snr_db),
            g17(crate::db(p.pg_analytic)),
            g17(crate::db(p.pg_mc_mean)),
            g17(p.pg_mc_std),
            g17(p.coverage[0]),
            g17(p.coverage[1]),
            g17(p.coverage[2]),
            p.regime
        )
        .expect("string write");
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Writes a sweep result: `theta_deg,phi_deg,pg_db` for angular sweeps,
/// `x,y,z,pg_db` for spatial ones.
pub fn write_sweep_csv(path: impl AsRef<Path>, sweep: &SweepResult) -> Result<()> {
    let mut out = String::new();
    if sweep.angular {
        out.push_str("theta_deg,phi_deg,pg_db\n");
        for (params, pg) in sweep.params.iter().zip(&sweep.pg) {
            writeln!(
                out,
                "{},{},{}",
                g17(params[0].to_degrees()),
                g17(params[1].to_degrees()),
                g17(crate::db(*pg))
            )
            .expect("string write");
        }
    } else {
        out.push_str("x,y,z,pg_db\n");
        for (params, pg) in sweep.params.iter().zip(&sweep.pg) {
            writeln!(
                out,
                "{},{},{},{}",
                g17(params[0]),
                g17(params[1]),
                g17(params[2]),
                g17(crate::db(*pg))
            )
            .expect("string write");
        }
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Writes a path-gain field over receiver positions as `x,y,z,pg_db`.
pub fn write_heatmap_csv(
    path: impl AsRef<Path>,
    grid: &[nalgebra::Vector3<f64>],
    pg: &[f64],
) -> Result<()> {
    if grid.len() != pg.len() {
        return Err(Error::Dimension(
            "heatmap grid and values differ in length".into(),
        ));
    }
    let mut out = String::from("x,y,z,pg_db\n");
    for (p, g) in grid.iter().zip(pg) {
        writeln!(
            out,
            "{},{},{},{}",
            g17(p.x),
            g17(p.y),
            g17(p.z),
            g17(crate::db(*g))
        )
        .expect("string write");
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Writes a parameter-search result. The mandatory `best` summary row comes
/// first; candidate rows (in evaluation order) follow when provided.
/// Columns: `row,pg,pg_db,<name>_1..<name>_K`.
pub fn write_search_csv(
    path: impl AsRef<Path>,
    param_name: &str,
    best: (&[f64], f64),
    candidates: Option<&[(Vec<f64>, f64)]>,
) -> Result<()> {
    let k = best.0.len();
    let mut out = String::from("row,pg,pg_db");
    for i in 1..=k {
        write!(out, ",{param_name}_{i}").expect("string write");
    }
    out.push('\n');
    let write_row = |out: &mut String, label: &str, params: &[f64], pg: f64| {
        write!(out, "{label},{},{}", g17(pg), g17(crate::db(pg))).expect("string write");
        for p in params {
            write!(out, ",{}", g17(*p)).expect("string write");
        }
        out.push('\n');
    };
    write_row(&mut out, "best", best.0, best.1);
    if let Some(candidates) = candidates {
        for (i, (params, pg)) in candidates.iter().enumerate() {
            write_row(&mut out, &format!("{i}"), params, *pg);
        }
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}
