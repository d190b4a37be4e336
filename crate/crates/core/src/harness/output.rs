use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::wigner::{WignerGrid, WIGNER_CONVENTION};

use super::scenario::{ScenarioOutput, TimeSeriesRecord};

pub const SERIES_FILE: &str = "series.csv";
pub const METADATA_FILE: &str = "metadata.txt";
pub const CONFIG_FILE: &str = "config.toml";

pub const DFT_CONVENTION: &str = "F[j,k] = exp(+2 pi i j k / n) / sqrt(n)";
pub const CORRELATOR_CONVENTION: &str = "state expectation on the initial product state; C = -2 (C4 - C2), norm 1";
pub const CORRELATOR_PAIR: &str = "A = X(x)X evolved, B = P(x)P";
pub const RESCALE_METHOD: &str = "nonnegative least squares against s_linear";

/// 17 significant digits; NaN spelled `nan`.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// CSV text of the records; every row is re-checked before it is written.
pub fn records_csv(records: &[TimeSeriesRecord]) -> Result<String> {
    let mut out = TimeSeriesRecord::COLUMNS.join(",");
    out.push('\n');
    for r in records {
        r.check()?;
        out.push_str(&r.t.to_string());
        for v in r.values() {
            out.push(',');
            out.push_str(&format_value(v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Generic numeric table with a header.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn metadata_text(output: &ScenarioOutput) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: &str| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("version", env!("CARGO_PKG_VERSION"));
    kv("scenario", &output.config.to_string());
    kv("dft_convention", DFT_CONVENTION);
    kv("wigner_convention", WIGNER_CONVENTION);
    kv("correlator_convention", CORRELATOR_CONVENTION);
    kv("correlator_pair", CORRELATOR_PAIR);
    kv("otoc_xrho_pair", "A = X(x)X evolved, B = rho0 = |psi0><psi0|");
    kv("rescale_method", RESCALE_METHOD);
    kv("alpha_otoc_xp", &format_value(output.alpha_xp));
    kv("alpha_otoc_xrho", &format_value(output.alpha_xrho));
    kv("s_vn_rescale", &output.svn_rescale.describe());
    kv("max_marginal_gap", &format_value(output.max_marginal_gap));
    kv("entropy_log_base", "e");
    s
}

fn wigner_csv(grid: &WignerGrid) -> String {
    let side = grid.side();
    let rows: Vec<Vec<f64>> = (0..side)
        .flat_map(|q| (0..side).map(move |p| (q, p)))
        .map(|(q, p)| vec![q as f64, p as f64, grid.at(q, p)])
        .collect();
    table_csv(&["q_index", "p_index", "w"], &rows)
}

fn schmidt_csv(spectra: &[Vec<f64>]) -> String {
    let width = spectra.iter().map(Vec::len).max().unwrap_or(0);
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..width).map(|i| format!("lambda2_{i}")))
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = spectra
        .iter()
        .enumerate()
        .map(|(t, sp)| {
            let mut row = vec![t as f64];
            row.extend(sp.iter().copied());
            row.resize(width + 1, 0.0);
            row
        })
        .collect();
    table_csv(&header_refs, &rows)
}

/// Writes `series.csv`, `metadata.txt`, `config.toml` and any requested dumps.
pub fn write_scenario(dir: &Path, output: &ScenarioOutput) -> Result<()> {
    create_dir(dir)?;
    write_file(&dir.join(SERIES_FILE), &records_csv(&output.records)?)?;
    write_file(&dir.join(METADATA_FILE), &metadata_text(output))?;
    write_file(&dir.join(CONFIG_FILE), &output.config.to_toml())?;
    if let Some((w0, w1)) = &output.wigner_dump {
        write_file(&dir.join("wigner_t0.csv"), &wigner_csv(w0))?;
        write_file(&dir.join("wigner_tmax.csv"), &wigner_csv(w1))?;
    }
    if let Some(sp) = &output.schmidt_spectra {
        write_file(&dir.join("schmidt.csv"), &schmidt_csv(sp))?;
    }
    Ok(())
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    write_file(path, contents)
}
