use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::ConfigOverrides;
use super::output;
use super::scenario::run_scenario;

/// Outcome of one sweep entry.
#[derive(Debug)]
pub struct SweepEntry {
    pub index: usize,
    pub dir: PathBuf,
    pub error: Option<Error>,
}

#[derive(Debug, Default)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    pub fn failures(&self) -> impl Iterator<Item = &SweepEntry> {
        self.entries.iter().filter(|e| e.error.is_some())
    }

    pub fn all_succeeded(&self) -> bool {
        self.failures().next().is_none()
    }
}

pub fn run_dir_name(index: usize) -> String {
    format!("run_{index:03}")
}

/// Runs each override set (layered on `base`) into `out_dir/run_NNN`.
/// Entries run sequentially; a failing entry is recorded and the sweep
/// continues.
pub fn sweep(grid: &[ConfigOverrides], base: &ConfigOverrides, out_dir: &Path) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    if grid.is_empty() {
        return Ok(report);
    }
    output::create_dir(out_dir)?;
    for (index, overrides) in grid.iter().enumerate() {
        let dir = out_dir.join(run_dir_name(index));
        let outcome = base
            .merged_with(overrides)
            .resolve()
            .and_then(|cfg| run_scenario(&cfg))
            .and_then(|out| output::write_scenario(&dir, &out));
        report.entries.push(SweepEntry {
            index,
            dir,
            error: outcome.err(),
        });
    }
    Ok(report)
}
