use crate::catmap::{propagator_2d, CoupledPropagator};
use crate::entropy::{self, EntropySample};
use crate::error::{Error, Result};
use crate::hilbert::{self, DensityMatrix, StateVector, Subsystem};
use crate::linalg::{self, CMatrix};
use crate::otoc::{self, CorrelatorSample, Observable};
use crate::states;
use crate::wigner::{self, WignerGrid};

use super::config::{OutputKind, ScenarioConfig};

/// Tolerance on `|S(rho1) - S(rho2)|` for every emitted row.
pub const MARGINAL_TOL: f64 = 1e-9;

/// One output row. Columns that were not requested hold NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: usize,
    pub s_linear: f64,
    pub s_vn: f64,
    pub s_renyi2: f64,
    pub otoc_xp: f64,
    pub otoc_xrho: f64,
    pub c2: f64,
    pub c4_real: f64,
    pub c4_imag: f64,
    pub otoc_xp_rescaled: f64,
    pub otoc_xrho_rescaled: f64,
}

impl TimeSeriesRecord {
    pub const COLUMNS: [&'static str; 11] = [
        "t",
        "s_linear",
        "s_vn",
        "s_renyi2",
        "otoc_xp",
        "otoc_xrho",
        "c2",
        "c4_real",
        "c4_imag",
        "otoc_xp_rescaled",
        "otoc_xrho_rescaled",
    ];

    pub fn values(&self) -> [f64; 10] {
        [
            self.s_linear,
            self.s_vn,
            self.s_renyi2,
            self.otoc_xp,
            self.otoc_xrho,
            self.c2,
            self.c4_real,
            self.c4_imag,
            self.otoc_xp_rescaled,
            self.otoc_xrho_rescaled,
        ]
    }

    /// Row-level identities: `exp(-S2) = 1 - S_L` to 1e-12, `S2 <= S_VN`,
    /// and the correlator split of `otoc_xp` (state expectation, norm 1).
    pub fn check(&self) -> Result<()> {
        let purity = 1.0 - self.s_linear;
        if ((-self.s_renyi2).exp() - purity).abs() > 1e-12 {
            return Err(Error::NumericalHealth(format!(
                "t={}: exp(-S2) = {} but purity = {}",
                self.t,
                (-self.s_renyi2).exp(),
                purity
            )));
        }
        if self.s_renyi2 > self.s_vn + 1e-10 {
            return Err(Error::NumericalHealth(format!(
                "t={}: S2 = {} exceeds S_VN = {}",
                self.t, self.s_renyi2, self.s_vn
            )));
        }
        if !self.otoc_xp.is_nan() && !self.c2.is_nan() {
            let sample = CorrelatorSample {
                t: self.t,
                c: self.otoc_xp,
                c2: self.c2,
                c4_real: self.c4_real,
                c4_imag: self.c4_imag,
                norm_factor: 1.0,
            };
            sample.check()?;
        }
        Ok(())
    }
}

/// How `s_vn` is brought onto the `s_linear` scale for side-by-side plots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SvnRescale {
    /// Multiply by `S_L^RMT / S_VN^RMT`.
    RmtRatio(f64),
    /// Divide by `max S_VN`, then multiply by `max S_L`.
    MaxNormalized(f64),
}

impl SvnRescale {
    pub fn factor(&self) -> f64 {
        match *self {
            SvnRescale::RmtRatio(f) | SvnRescale::MaxNormalized(f) => f,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SvnRescale::RmtRatio(f) => format!("rmt_ratio {f:.16e}"),
            SvnRescale::MaxNormalized(f) => format!("max_normalized {f:.16e}"),
        }
    }
}

/// Scenario result: the rows plus the constants needed to interpret them.
#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub config: ScenarioConfig,
    pub records: Vec<TimeSeriesRecord>,
    /// Least-squares factor applied to `otoc_xp`; NaN when not computed.
    pub alpha_xp: f64,
    pub alpha_xrho: f64,
    pub svn_rescale: SvnRescale,
    pub max_marginal_gap: f64,
    /// Reduced one-DOF Wigner grids of subsystem 1 at `t = 0` and `t = t_max`.
    pub wigner_dump: Option<(WignerGrid, WignerGrid)>,
    /// Schmidt probabilities of the evolved state for every `t`.
    pub schmidt_spectra: Option<Vec<Vec<f64>>>,
}

impl ScenarioOutput {
    /// `s_vn` rescaled onto the linear-entropy scale.
    pub fn s_vn_rescaled(&self) -> Vec<f64> {
        let f = self.svn_rescale.factor();
        self.records.iter().map(|r| r.s_vn * f).collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = TimeSeriesRecord::COLUMNS.iter().position(|c| *c == name)?;
        Some(
            self.records
                .iter()
                .map(|r| if idx == 0 { r.t as f64 } else { r.values()[idx - 1] })
                .collect(),
        )
    }
}

struct EntropyRow {
    sample: EntropySample,
    gap: f64,
    schmidt: Option<Vec<f64>>,
}

fn entropy_row(t: usize, m: &CMatrix, keep_schmidt: bool) -> Result<EntropyRow> {
    let rho1 = DensityMatrix::from_raw(hilbert::reduced_from_coefficients(m, Subsystem::First));
    let rho2 = DensityMatrix::from_raw(hilbert::reduced_from_coefficients(m, Subsystem::Second));
    let sample = EntropySample::from_reduced(t, &rho1)?;
    sample.check()?;
    let other = EntropySample::from_reduced(t, &rho2)?;
    let gap = (sample.s_vn - other.s_vn)
        .abs()
        .max((sample.s_linear - other.s_linear).abs());
    if gap > MARGINAL_TOL {
        return Err(Error::NumericalHealth(format!(
            "t={t}: marginal entropies differ by {gap:.3e}"
        )));
    }
    let schmidt = keep_schmidt.then(|| linalg::singular_values(m).into_iter().map(|s| s * s).collect());
    Ok(EntropyRow { sample, gap, schmidt })
}

fn otoc_column(
    a: &Observable,
    b: &Observable,
    psi0: &StateVector,
    u: &CoupledPropagator,
    t_max: usize,
) -> Result<Vec<CorrelatorSample>> {
    otoc::otoc_series(a, b, psi0, u, t_max)
}

fn rescaled(series: &[f64], reference: &[f64]) -> (Vec<f64>, f64) {
    if series.iter().any(|v| v.is_nan()) {
        return (vec![f64::NAN; series.len()], f64::NAN);
    }
    match otoc::rescale_for_comparison(series, reference) {
        Ok(pair) => pair,
        // all-zero series or reference: nothing meaningful to scale
        Err(_) => (vec![f64::NAN; series.len()], f64::NAN),
    }
}

/// Builds the propagator once, evolves the product coherent state and emits
/// one checked record per `t` in `0..=t_max`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    let n = cfg.n;
    let nn = n.get();
    let u = propagator_2d(&cfg.coupled_spec()?)?;
    let psi0 = states::product_state(
        &states::coherent_state(n, cfg.center1),
        &states::coherent_state(n, cfg.center2),
    );

    let keep_schmidt = cfg.wants(OutputKind::SchmidtSpectrum);
    let mut m = linalg::reshape_bipartite(psi0.as_slice(), nn, nn);
    let mut rows = Vec::with_capacity(cfg.t_max + 1);
    let mut wigner_first = None;
    let mut wigner_last = None;
    for t in 0..=cfg.t_max {
        if t > 0 {
            m = u.forward_coefficients(&m);
        }
        rows.push(entropy_row(t, &m, keep_schmidt)?);
        if cfg.wants(OutputKind::WignerDump) && (t == 0 || t == cfg.t_max) {
            let rho1 = DensityMatrix::from_raw(hilbert::reduced_from_coefficients(&m, Subsystem::First));
            let grid = wigner::wigner_grid(&rho1, n)?;
            if t == 0 {
                wigner_first = Some(grid);
            } else {
                wigner_last = Some(grid);
            }
        }
    }

    let len = cfg.t_max + 1;
    let nan = vec![f64::NAN; len];
    let want_otoc = cfg.wants(OutputKind::Otocs) || cfg.wants(OutputKind::Correlators);
    let xp = if want_otoc && cfg.otoc_b.wants_p2d() {
        Some(otoc_column(
            &Observable::x2d(n),
            &Observable::p2d(n),
            &psi0,
            &u,
            cfg.t_max,
        )?)
    } else {
        None
    };
    let xrho = if cfg.wants(OutputKind::Otocs) && cfg.otoc_b.wants_rho0() {
        Some(otoc_column(
            &Observable::x2d(n),
            &Observable::Projector(psi0.clone()),
            &psi0,
            &u,
            cfg.t_max,
        )?)
    } else {
        None
    };

    let s_linear: Vec<f64> = rows.iter().map(|r| r.sample.s_linear).collect();
    let otoc_xp: Vec<f64> = match (&xp, cfg.wants(OutputKind::Otocs)) {
        (Some(s), true) => s.iter().map(|c| c.c).collect(),
        _ => nan.clone(),
    };
    let otoc_xrho: Vec<f64> = xrho
        .as_ref()
        .map_or_else(|| nan.clone(), |s| s.iter().map(|c| c.c).collect());
    let (xp_resc, alpha_xp) = rescaled(&otoc_xp, &s_linear);
    let (xrho_resc, alpha_xrho) = rescaled(&otoc_xrho, &s_linear);
    let corr = xp
        .as_ref()
        .filter(|_| cfg.wants(OutputKind::Correlators) && cfg.wants(OutputKind::Otocs));

    let records: Vec<TimeSeriesRecord> = (0..len)
        .map(|t| {
            let e = &rows[t].sample;
            let (c2, c4r, c4i) = corr.map_or((f64::NAN, f64::NAN, f64::NAN), |s| {
                (s[t].c2, s[t].c4_real, s[t].c4_imag)
            });
            TimeSeriesRecord {
                t,
                s_linear: e.s_linear,
                s_vn: e.s_vn,
                s_renyi2: e.s_renyi2,
                otoc_xp: otoc_xp[t],
                otoc_xrho: otoc_xrho[t],
                c2,
                c4_real: c4r,
                c4_imag: c4i,
                otoc_xp_rescaled: xp_resc[t],
                otoc_xrho_rescaled: xrho_resc[t],
            }
        })
        .collect();
    for r in &records {
        r.check()?;
    }

    let svn_rescale = svn_rescale_for(cfg, &records);
    Ok(ScenarioOutput {
        config: cfg.clone(),
        alpha_xp,
        alpha_xrho,
        svn_rescale,
        max_marginal_gap: rows.iter().map(|r| r.gap).fold(0.0, f64::max),
        wigner_dump: wigner_first.zip(wigner_last),
        schmidt_spectra: keep_schmidt.then(|| rows.into_iter().map(|r| r.schmidt.unwrap_or_default()).collect()),
        records,
    })
}

/// RMT saturation ratio for dynamics with a hyperbolic factor, max
/// normalization for the regular case (whose entropies never approach RMT).
fn svn_rescale_for(cfg: &ScenarioConfig, records: &[TimeSeriesRecord]) -> SvnRescale {
    use super::config::Dynamics;
    match cfg.dynamics {
        Dynamics::He | Dynamics::Hh => {
            let rmt = entropy::rmt_saturation(cfg.n);
            SvnRescale::RmtRatio(rmt.linear / rmt.von_neumann)
        }
        Dynamics::Ee => {
            let max_vn = records.iter().map(|r| r.s_vn).fold(0.0, f64::max);
            let max_l = records.iter().map(|r| r.s_linear).fold(0.0, f64::max);
            SvnRescale::MaxNormalized(if max_vn > 0.0 { max_l / max_vn } else { 1.0 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ConfigOverrides, Dynamics};

    fn small(dynamics: Dynamics, n: usize, t_max: usize) -> ScenarioConfig {
        ConfigOverrides {
            dynamics: Some(dynamics),
            n: Some(n),
            t_max: Some(t_max),
            ..Default::default()
        }
        .resolve()
        .unwrap()
    }

    #[test]
    fn first_row_is_unentangled() {
        let out = run_scenario(&small(Dynamics::Hh, 8, 4)).unwrap();
        let r0 = out.records[0];
        assert!(r0.s_linear.abs() < 1e-10 && r0.s_vn.abs() < 1e-10 && r0.s_renyi2.abs() < 1e-10);
        assert_eq!(out.records.len(), 5);
        assert!(out.alpha_xp >= 0.0 && out.alpha_xrho >= 0.0);
    }

    #[test]
    fn disabled_columns_are_nan() {
        let mut cfg = small(Dynamics::Ee, 8, 3);
        cfg.outputs = vec![OutputKind::Entropies];
        let out = run_scenario(&cfg).unwrap();
        assert!(out
            .records
            .iter()
            .all(|r| r.otoc_xp.is_nan() && r.c2.is_nan() && !r.s_linear.is_nan()));
    }

    #[test]
    fn dumps_when_requested() {
        let mut cfg = small(Dynamics::He, 8, 2);
        cfg.outputs
            .extend([OutputKind::WignerDump, OutputKind::SchmidtSpectrum]);
        let out = run_scenario(&cfg).unwrap();
        let (w0, w1) = out.wigner_dump.unwrap();
        assert!((w0.total() - 1.0).abs() < 1e-10 && (w1.total() - 1.0).abs() < 1e-10);
        let sp = out.schmidt_spectra.unwrap();
        assert_eq!(sp.len(), 3);
        assert!((sp[0][0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn row_check_rejects_broken_identity() {
        let out = run_scenario(&small(Dynamics::Hh, 4, 2)).unwrap();
        let mut r = out.records[2];
        r.s_renyi2 += 1e-6;
        assert!(r.check().is_err());
        let mut r = out.records[2];
        r.c2 += 1e-3;
        assert!(r.check().is_err());
    }
}
