//! Torus coherent states and bipartite product states.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HilbertDim, StateVector};
use crate::linalg::{CVector, C64};

/// Point on the unit torus, coordinates reduced into `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    q: f64,
    p: f64,
}

/// `x mod 1` in `[0, 1)`; guards the `rem_euclid` rounding edge that can
/// return exactly 1.0 for tiny negative inputs.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint {
            q: wrap_unit(q),
            p: wrap_unit(p),
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.q, self.p)
    }
}

impl FromStr for PhasePoint {
    type Err = Error;

    /// Parses `"q,p"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::Config(format!("expected 'q,p', got '{s}'")));
        }
        // plain numbers or `pi/d`
        let parse = |t: &str| {
            let v = match t.strip_prefix("pi/") {
                Some(d) => d.parse::<f64>().ok().map(|d| PI / d),
                None => t.parse::<f64>().ok(),
            };
            v.filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("bad coordinate '{t}'")))
        };
        Ok(PhasePoint::new(parse(parts[0])?, parse(parts[1])?))
    }
}

fn image_window(n: usize) -> i64 {
    if n >= 8 {
        3
    } else {
        // keep the dropped images below exp(-28) ~ 1e-12
        3 + (28.0 / (PI * n as f64)).sqrt().ceil() as i64
    }
}

/// Periodized Gaussian
/// `psi_j ∝ sum_m exp[-pi n (j/n - q0 - m)^2 + 2 pi i n p0 (j/n - m)]`.
pub fn coherent_state(n: HilbertDim, center: PhasePoint) -> StateVector {
    let nn = n.get();
    let nf = nn as f64;
    let w = image_window(nn);
    let amps = CVector::from_fn(nn, |j, _| {
        let x = j as f64 / nf;
        (-w..=w)
            .map(|m| {
                let m = m as f64;
                let d = x - center.q - m;
                C64::from_polar((-PI * nf * d * d).exp(), 2.0 * PI * nf * center.p * (x - m))
            })
            .sum()
    });
    StateVector::normalized(amps).expect("periodized Gaussian never vanishes")
}

/// `psi1 ⊗ psi2`, index `j1 * n2 + j2`.
pub fn product_state(psi1: &StateVector, psi2: &StateVector) -> StateVector {
    let (a, b) = (psi1.amplitudes(), psi2.amplitudes());
    let n2 = b.len();
    let amps = CVector::from_fn(a.len() * n2, |idx, _| a[idx / n2] * b[idx % n2]);
    StateVector::from_raw(amps)
}

pub fn density_of(psi: &StateVector) -> Result<DensityMatrix> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(DensityMatrix::pure(psi))
}

/// Circular-mean centroid of a one-DOF state: `q` from `<U>` (clock), `p`
/// from `<V>` (shift, eigenvalue `exp(-2 pi i k/n)` on momentum `k`).
pub fn centroid(psi: &StateVector) -> PhasePoint {
    let amps = psi.as_slice();
    let n = amps.len();
    let clock: C64 = amps
        .iter()
        .enumerate()
        .map(|(j, a)| C64::from_polar(a.norm_sqr(), 2.0 * PI * j as f64 / n as f64))
        .sum();
    let shift: C64 = (0..n).map(|j| amps[(j + 1) % n].conj() * amps[j]).sum();
    PhasePoint::new(clock.arg() / (2.0 * PI), -shift.arg() / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{self, partial_trace_pure, ComplexOperator, Subsystem};
    use crate::linalg;

    fn dim(n: usize) -> HilbertDim {
        HilbertDim::new(n).unwrap()
    }

    #[test]
    fn phase_point_wraps_and_parses() {
        let p = PhasePoint::new(1.25, -0.25);
        assert_eq!((p.q(), p.p()), (0.25, 0.75));
        assert_eq!(wrap_unit(-1e-18), 0.0);
        let parsed: PhasePoint = "0.5, 0.5".parse().unwrap();
        assert_eq!(parsed, PhasePoint::new(0.5, 0.5));
        assert!("0.5".parse::<PhasePoint>().is_err());
        assert!("a,b".parse::<PhasePoint>().is_err());
        let quarter: PhasePoint = "pi/4,pi/4".parse().unwrap();
        assert_eq!(quarter, PhasePoint::new(PI / 4.0, PI / 4.0));
        assert!("pi/x,0".parse::<PhasePoint>().is_err());
    }

    #[test]
    fn coherent_state_norm_and_position() {
        let psi = coherent_state(dim(64), PhasePoint::new(0.5, 0.5));
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let x = hilbert::position_operator(dim(64));
        let ex = psi.expectation(&x).unwrap();
        assert!(ex.re.abs() < 1e-6 && ex.im.abs() < 1e-12);
        let c = centroid(&psi);
        assert!((c.q() - 0.5).abs() < 1e-9 && (c.p() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn distant_coherent_states_nearly_orthogonal() {
        let a = coherent_state(dim(64), PhasePoint::new(0.1, 0.1));
        let b = coherent_state(dim(64), PhasePoint::new(0.6, 0.6));
        assert!(a.inner(&b).norm() < 1e-6);
    }

    #[test]
    fn small_dimensions_widen_window() {
        assert!(image_window(2) > 3);
        assert_eq!(image_window(8), 3);
        let psi = coherent_state(dim(2), PhasePoint::new(0.3, 0.7));
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translational_covariance() {
        let n = dim(32);
        let v = hilbert::shift_operator(n);
        for (q0, p0) in [(0.2, 0.3), (0.97, 0.55)] {
            let base = coherent_state(n, PhasePoint::new(q0, p0));
            let moved = coherent_state(n, PhasePoint::new(q0 + 1.0 / 32.0, p0));
            let shifted = StateVector::from_raw(v.apply(base.amplitudes()).unwrap());
            let fidelity = moved.inner(&shifted).norm_sqr();
            assert!(fidelity >= 1.0 - 1e-8, "fidelity {fidelity}");
        }
    }

    #[test]
    fn balanced_uncertainty() {
        let n = dim(64);
        let nf = 64.0;
        let center = PhasePoint::new(0.3, 0.6);
        let psi = coherent_state(n, center);
        let wrapped_var = |probs: &[f64], c: f64| -> f64 {
            probs
                .iter()
                .enumerate()
                .map(|(j, w)| {
                    let d = wrap_unit(j as f64 / nf - c + 0.5) - 0.5;
                    w * d * d
                })
                .sum()
        };
        let pos: Vec<f64> = psi.as_slice().iter().map(|a| a.norm_sqr()).collect();
        let f = hilbert::dft_matrix(n);
        let mom_amps = f.matrix().ad_mul(psi.amplitudes());
        let mom: Vec<f64> = mom_amps.iter().map(|a| a.norm_sqr()).collect();
        let ratio = wrapped_var(&pos, center.q()) / wrapped_var(&mom, center.p());
        assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn product_state_properties() {
        let n = dim(16);
        let a = coherent_state(n, PhasePoint::new(0.2, 0.4));
        let b = coherent_state(n, PhasePoint::new(0.7, 0.1));
        let ab = product_state(&a, &b);
        assert!((ab.norm() - 1.0).abs() < 1e-12);
        let r1 = partial_trace_pure(&ab, (16, 16), Subsystem::First).unwrap();
        assert!((1.0 - r1.purity()).abs() < 1e-12);

        // <X1 ⊗ X2> = <X1><X2>, brute force on both sides
        let x = hilbert::position_operator(n);
        let xx: ComplexOperator = hilbert::tensor_product(&x, &x).unwrap();
        let lhs = ab.expectation(&xx).unwrap();
        let rhs = a.expectation(&x).unwrap() * b.expectation(&x).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn density_of_pure_states() {
        let e0 = StateVector::basis(3, 0);
        let rho = density_of(&e0).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(linalg::max_abs(rho.matrix()), 1.0);

        let psi = coherent_state(dim(8), PhasePoint::new(0.4, 0.2));
        let rho = density_of(&psi).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let idem = rho.matrix() * rho.matrix() - rho.matrix();
        assert!(linalg::max_abs(&idem) < 1e-10);
        let ev = rho.eigenvalues();
        assert!((ev[7] - 1.0).abs() < 1e-10 && ev[..7].iter().all(|e| e.abs() < 1e-10));
    }
}
