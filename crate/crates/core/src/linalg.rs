//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Reshape a bipartite amplitude vector into the `n1 x n2` coefficient
/// matrix `M[j1, j2] = psi[j1 * n2 + j2]`.
pub fn reshape_bipartite(psi: &[C64], n1: usize, n2: usize) -> CMatrix {
    debug_assert_eq!(psi.len(), n1 * n2);
    CMatrix::from_row_slice(n1, n2, psi)
}

/// Inverse of [`reshape_bipartite`].
pub fn flatten_bipartite(m: &CMatrix) -> CVector {
    let (n1, n2) = m.shape();
    CVector::from_fn(n1 * n2, |idx, _| m[(idx / n2, idx % n2)])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Max-norm distance of `m` from the identity.
pub fn identity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..=j.min(m.nrows() - 1) {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a hermitian matrix, ascending. Only the hermitian part is
/// used, so callers should check hermiticity first when it matters.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Singular values, nonincreasing.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn singular_values_real(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `<a|b>` with the conjugate on the left.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Shannon entropy `-sum w ln w` of a weight vector, with `0 ln 0 = 0`.
pub(crate) fn shannon(weights: impl IntoIterator<Item = f64>) -> f64 {
    weights.into_iter().filter(|&w| w > 0.0).map(|w| -w * w.ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reshape_roundtrip_is_row_major() {
        let psi: Vec<C64> = (0..6).map(|k| C64::new(k as f64, 0.0)).collect();
        let m = reshape_bipartite(&psi, 2, 3);
        assert_eq!(m[(1, 0)].re, 3.0);
        assert_eq!(m[(0, 2)].re, 2.0);
        let back = flatten_bipartite(&m);
        assert_eq!(back.as_slice(), psi.as_slice());
    }

    #[test]
    fn eigen_and_svd_ordering() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.5, 0.0),
        ]));
        assert_eq!(hermitian_eigenvalues(&m), vec![-1.0, 0.5, 2.0]);
        let sv = singular_values(&m);
        assert!((sv[0] - 2.0).abs() < 1e-14 && (sv[2] - 0.5).abs() < 1e-14);
    }
}
