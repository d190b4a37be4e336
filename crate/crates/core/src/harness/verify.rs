use std::fmt;

use crate::catmap::{propagator_1d, propagator_2d, Floquet, MapSpec};
use crate::classical::{lyapunov_estimate, ClassicalSystem};
use crate::entropy;
use crate::error::Result;
use crate::hilbert::{self, partial_trace_pure, DensityMatrix, HilbertDim, StateVector, Subsystem};
use crate::linalg::{self, C64};
use crate::otoc::{self, Average, InitialState, OperatorA, OperatorB, OperatorBasis, OtocConfig};
use crate::states::{self, PhasePoint};
use crate::wigner;

use super::config::{Dynamics, ScenarioConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyLevel {
    /// Every check at `n <= 8`.
    Fast,
    /// Adds the canonical dimensions up to `n = 64`.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        // NaN residuals count as failures
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.checks.push(CheckResult {
            name: name.into(),
            residual,
            tolerance,
        });
    }

    /// Records a failed computation as an infinite residual.
    fn push_result(&mut self, name: impl Into<String>, r: Result<f64>, tolerance: f64) {
        self.push(name, r.unwrap_or(f64::INFINITY), tolerance);
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {} residual={:.3e} tol={:.1e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

const DYNAMICS: [Dynamics; 3] = [Dynamics::Ee, Dynamics::He, Dynamics::Hh];
const CENTER: (f64, f64) = (0.5, 0.5);

fn scenario(dynamics: Dynamics, n: usize) -> Result<ScenarioConfig> {
    Ok(ScenarioConfig {
        dynamics,
        n: HilbertDim::new(n)?,
        ..ScenarioConfig::default()
    })
}

fn initial_state(n: HilbertDim) -> StateVector {
    let c = states::coherent_state(n, PhasePoint::new(CENTER.0, CENTER.1));
    states::product_state(&c, &c)
}

fn evolve(u: &impl Floquet, psi: &StateVector, t: usize) -> StateVector {
    (0..t).fold(psi.clone(), |s, _| u.forward_state(&s))
}

fn weyl(report: &mut VerifyReport, ns: &[usize]) -> Result<()> {
    for &n in ns {
        let d = HilbertDim::new(n)?;
        let u = hilbert::clock_operator(d);
        let v = hilbert::shift_operator(d);
        let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        let lhs = v.matrix() * u.matrix();
        let rhs = u.matrix() * v.matrix() * phase.conj();
        report.push(format!("weyl_relation n={n}"), linalg::max_abs(&(lhs - rhs)), 1e-12);
        let f = hilbert::dft_matrix(d);
        let p = hilbert::momentum_operator(d);
        let x = hilbert::position_operator(d);
        let conj = f.matrix().ad_mul(p.matrix()) * f.matrix();
        report.push(
            format!("dft_maps_p_to_minus_x n={n}"),
            linalg::max_abs(&(conj + x.matrix())),
            1e-12,
        );
    }
    Ok(())
}

fn unitarity(report: &mut VerifyReport, ns: &[usize]) -> Result<()> {
    for &n in ns {
        let d = HilbertDim::new(n)?;
        for spec in [MapSpec::hyperbolic(0.25), MapSpec::elliptic(0.25)] {
            let u = propagator_1d(&spec, d)?;
            report.push(
                format!("unitarity_1d {:?} n={n}", spec.kind()),
                u.unitarity_defect(),
                1e-8,
            );
        }
        for dy in DYNAMICS {
            let u = propagator_2d(&scenario(dy, n)?.coupled_spec()?)?;
            report.push(
                format!("unitarity_2d {} n={n}", dy.as_str()),
                u.unitarity_defect(),
                1e-8,
            );
        }
    }
    Ok(())
}

fn split_identity(report: &mut VerifyReport, n: usize, t_max: usize) -> Result<()> {
    let d = HilbertDim::new(n)?;
    let init = InitialState::from(initial_state(d));
    for dy in DYNAMICS {
        let u = propagator_2d(&scenario(dy, n)?.coupled_spec()?)?;
        for average in [Average::StateExpectation, Average::NormalizedTrace] {
            let cfg = OtocConfig::new(OperatorA::X2d, OperatorB::P2d, average);
            let mut worst = 0.0f64;
            for t in 0..=t_max {
                worst = worst.max(otoc::otoc_full(&cfg, &init, &u, t)?.split_residual());
            }
            report.push(
                format!("split_identity {} {average:?} n={n} t<={t_max}", dy.as_str()),
                worst,
                1e-8,
            );
        }
    }
    Ok(())
}

fn otoc_re(report: &mut VerifyReport, n: usize) -> Result<()> {
    let d = HilbertDim::new(n)?;
    let psi0 = initial_state(d);
    let init = InitialState::from(psi0.clone());
    let basis = OperatorBasis::clock_shift(d);
    for dy in DYNAMICS {
        let u = propagator_2d(&scenario(dy, n)?.coupled_spec()?)?;
        let (mut to_purity, mut to_renyi) = (0.0f64, 0.0f64);
        for t in [0, 1, 2, 4, 8] {
            let sum = otoc::otoc_re_sum(&init, &u, t, &basis)?;
            let rho1 = partial_trace_pure(&evolve(&u, &psi0, t), (n, n), Subsystem::First)?;
            to_purity = to_purity.max((sum - entropy::purity(&rho1)).abs());
            to_renyi = to_renyi.max((sum - (-entropy::renyi2(&rho1)).exp()).abs());
        }
        report.push(format!("otoc_re_vs_purity {} n={n}", dy.as_str()), to_purity, 1e-8);
        report.push(format!("otoc_re_vs_renyi2 {} n={n}", dy.as_str()), to_renyi, 1e-8);
    }
    Ok(())
}

fn wse_relation(report: &mut VerifyReport, n: usize, dense: bool) -> Result<()> {
    let d = HilbertDim::new(n)?;
    let psi0 = initial_state(d);
    for dy in DYNAMICS {
        let u = propagator_2d(&scenario(dy, n)?.coupled_spec()?)?;
        let mut worst = 0.0f64;
        for t in [1, 3, 6] {
            let psi = evolve(&u, &psi0, t);
            let svn = entropy::von_neumann(&partial_trace_pure(&psi, (n, n), Subsystem::First)?)?;
            let w = if dense {
                wigner::wse(&wigner::operator_schmidt(&DensityMatrix::pure(&psi), (n, n))?)?
            } else {
                wigner::wse_pure_fast(&psi, (n, n))?
            };
            worst = worst.max((w - 2.0 * svn).abs());
        }
        let path = if dense { "operator_schmidt" } else { "fast" };
        report.push(format!("wse_equals_2svn {} {path} n={n}", dy.as_str()), worst, 1e-9);
    }
    Ok(())
}

fn wigner_checks(report: &mut VerifyReport, n: usize) -> Result<()> {
    let d = HilbertDim::new(n)?;
    let psi0 = initial_state(d);
    for dy in DYNAMICS {
        let u = propagator_2d(&scenario(dy, n)?.coupled_spec()?)?;
        let rho = DensityMatrix::pure(&evolve(&u, &psi0, 3));
        report.push_result(
            format!("wigner_schmidt_crosscheck {} n={n}", dy.as_str()),
            wigner::wigner_schmidt_crosscheck(&rho, (n, n)).map(|r| r.max_rel_deviation),
            1e-6,
        );
        let grid = wigner::wigner_grid(&rho, d)?;
        report.push(
            format!("wigner_normalization {} n={n}", dy.as_str()),
            (grid.total() - 1.0).abs(),
            1e-10,
        );
        report.push(format!("wigner_realness {} n={n}", dy.as_str()), grid.max_imag, 1e-10);
    }
    Ok(())
}

fn heisenberg_spectrum(report: &mut VerifyReport, n: usize) -> Result<()> {
    let d = HilbertDim::new(n)?;
    let u = propagator_2d(&scenario(Dynamics::Hh, n)?.coupled_spec()?)?;
    let a = otoc::Observable::x2d(d).to_dense()?;
    let before = a.eigenvalues_hermitian();
    let after = otoc::heisenberg_evolve(&a, &u, 5)?.eigenvalues_hermitian();
    let dev = before
        .iter()
        .zip(&after)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    report.push(format!("heisenberg_spectrum_invariance n={n}"), dev, 1e-10);
    Ok(())
}

fn lyapunov(report: &mut VerifyReport, steps: usize) -> Result<()> {
    let seed = (0.1234, 0.5678);
    let h = lyapunov_estimate(ClassicalSystem::Single(&MapSpec::hyperbolic(0.0), seed), steps)?;
    report.push(
        format!("lyapunov_hyperbolic steps={steps}"),
        (h - (2.0 + 3f64.sqrt()).ln()).abs(),
        1e-4,
    );
    let e = lyapunov_estimate(ClassicalSystem::Single(&MapSpec::elliptic(0.0), seed), steps)?;
    report.push(format!("lyapunov_elliptic steps={steps}"), e.abs(), 1e-3);
    Ok(())
}

fn coherent(report: &mut VerifyReport, n: usize) -> Result<()> {
    let d = HilbertDim::new(n)?;
    let psi = states::coherent_state(d, PhasePoint::new(0.5, 0.5));
    report.push(format!("coherent_norm n={n}"), (psi.norm() - 1.0).abs(), 1e-12);
    let ex = psi.expectation(&hilbert::position_operator(d))?;
    report.push(format!("coherent_position_mean n={n}"), ex.norm(), 1e-6);
    Ok(())
}

/// Runs every invariant suite; failures are reported, never raised, unless
/// a computation cannot be set up at all.
pub fn verify(level: VerifyLevel) -> Result<VerifyReport> {
    let mut r = VerifyReport::default();
    let full = level == VerifyLevel::Full;
    weyl(&mut r, &[2, 3, 4, 5, 8])?;
    let unitary_ns: &[usize] = if full { &[4, 8, 16, 32, 64] } else { &[4, 8] };
    unitarity(&mut r, unitary_ns)?;
    coherent(&mut r, if full { 64 } else { 8 })?;
    split_identity(&mut r, if full { 8 } else { 4 }, 10)?;
    otoc_re(&mut r, if full { 8 } else { 4 })?;
    wse_relation(&mut r, 4, true)?;
    wse_relation(&mut r, 8, true)?;
    if full {
        wse_relation(&mut r, 16, true)?;
        wse_relation(&mut r, 64, false)?;
    }
    wigner_checks(&mut r, if full { 8 } else { 4 })?;
    heisenberg_spectrum(&mut r, if full { 8 } else { 4 })?;
    lyapunov(&mut r, 10_000)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_level_passes() {
        let report = verify(VerifyLevel::Fast).unwrap();
        assert!(report.all_passed(), "{report}");
        assert!(report.checks.len() > 20);
    }

    #[test]
    fn nan_counts_as_failure() {
        let mut r = VerifyReport::default();
        r.push("x", f64::NAN, 1.0);
        assert!(!r.all_passed());
    }
}
