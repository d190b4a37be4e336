use std::path::Path;

use rayon::prelude::*;

use crate::error::Result;
use crate::states::PhasePoint;

use super::config::{quarter_pi_center, Dynamics, ScenarioConfig};
use super::output::{self, format_value, table_csv};
use super::scenario::{run_scenario, ScenarioOutput};
use super::stats::{log_linear_fit, LinearFit};

/// Quantities whose early growth is fitted.
pub const FIT_QUANTITIES: [&str; 3] = ["otoc_xp", "otoc_xrho", "s_linear"];

#[derive(Clone, Debug)]
pub struct FigureOptions {
    /// Overrides applied to every canonical scenario (dimension, horizon...).
    pub base: ScenarioConfig,
    pub fit_window: (usize, usize),
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            base: ScenarioConfig::default(),
            fit_window: (1, 5),
        }
    }
}

/// The four canonical panels: name, dynamics, center.
pub fn canonical_panels() -> [(&'static str, Dynamics, PhasePoint); 4] {
    let center = PhasePoint::new(0.5, 0.5);
    [
        ("fig1_ee_center", Dynamics::Ee, center),
        ("fig2_ee_pi4", Dynamics::Ee, quarter_pi_center()),
        ("fig3_he", Dynamics::He, center),
        ("fig4_hh", Dynamics::Hh, center),
    ]
}

#[derive(Clone, Debug)]
pub struct FitRow {
    pub scenario: String,
    pub quantity: String,
    /// `None` when the window holds a non-positive value.
    pub fit: Option<LinearFit>,
}

#[derive(Clone, Debug)]
pub struct FigureSuite {
    pub panels: Vec<(String, ScenarioOutput)>,
    pub fits: Vec<FitRow>,
}

impl FigureSuite {
    pub fn panel(&self, name: &str) -> Option<&ScenarioOutput> {
        self.panels.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }
}

/// Runs the canonical panels without writing anything.
pub fn compute_figure_suite(opts: &FigureOptions) -> Result<FigureSuite> {
    let panels: Vec<Result<(String, ScenarioOutput)>> = canonical_panels()
        .into_par_iter()
        .map(|(name, dynamics, center)| {
            let cfg = ScenarioConfig {
                dynamics,
                center1: center,
                center2: center,
                ..opts.base.clone()
            };
            Ok((name.to_string(), run_scenario(&cfg)?))
        })
        .collect();
    let panels = panels.into_iter().collect::<Result<Vec<_>>>()?;
    let (lo, hi) = opts.fit_window;
    let mut fits = Vec::new();
    for (name, out) in &panels {
        for q in FIT_QUANTITIES {
            let series = out.column(q).expect("known column");
            fits.push(FitRow {
                scenario: name.clone(),
                quantity: q.to_string(),
                fit: log_linear_fit(&series, lo, hi).ok(),
            });
        }
    }
    Ok(FigureSuite { panels, fits })
}

fn fits_csv(fits: &[FitRow], window: (usize, usize)) -> String {
    let mut s = String::from("scenario,quantity,t_lo,t_hi,slope,intercept,r_squared\n");
    for row in fits {
        let (slope, intercept, r2) = row
            .fit
            .map_or((f64::NAN, f64::NAN, f64::NAN), |f| (f.slope, f.intercept, f.r_squared));
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.scenario,
            row.quantity,
            window.0,
            window.1,
            format_value(slope),
            format_value(intercept),
            format_value(r2)
        ));
    }
    s
}

/// Runs and writes the suite: one directory per panel, `fig5_{a..d}.csv`
/// with `(t, s_linear, s_vn_rescaled)`, and `fits.csv`.
pub fn run_figure_suite(out_dir: &Path, opts: &FigureOptions) -> Result<FigureSuite> {
    let suite = compute_figure_suite(opts)?;
    output::create_dir(out_dir)?;
    for ((name, out), letter) in suite.panels.iter().zip(['a', 'b', 'c', 'd']) {
        output::write_scenario(&out_dir.join(name), out)?;
        let svn = out.s_vn_rescaled();
        let rows: Vec<Vec<f64>> = out
            .records
            .iter()
            .zip(&svn)
            .map(|(r, &v)| vec![r.t as f64, r.s_linear, v])
            .collect();
        output::write_text(
            &out_dir.join(format!("fig5_{letter}.csv")),
            &table_csv(&["t", "s_linear", "s_vn_rescaled"], &rows),
        )?;
    }
    output::write_text(&out_dir.join("fits.csv"), &fits_csv(&suite.fits, opts.fit_window))?;
    Ok(suite)
}
