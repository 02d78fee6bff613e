//! Proptest strategies shared by the property suites.
#![allow(dead_code)]

use num_complex::Complex64;
use opalg_core::matcore::qr;
use opalg_core::regring::Projection;
use opalg_core::CMatrix;
use proptest::collection::vec;
use proptest::prelude::*;

const COORD: core::ops::Range<f64> = -3.0..3.0;

pub fn entry() -> impl Strategy<Value = Complex64> {
    (COORD, COORD).prop_map(|(re, im)| Complex64::new(re, im))
}

pub fn nonzero_scalar() -> impl Strategy<Value = Complex64> {
    entry().prop_filter("away from zero", |z| z.norm() > 0.25)
}

prop_compose! {
    pub fn square(n: usize)(d in vec(entry(), n * n)) -> CMatrix {
        CMatrix::from_entries(n, d).unwrap()
    }
}

prop_compose! {
    /// Diagonally dominant; condition number O(1).
    pub fn invertible(n: usize)(x in square(n)) -> CMatrix {
        x.add(&CMatrix::identity(n).scale_re(6.0 * n as f64))
    }
}

prop_compose! {
    pub fn unitary(n: usize)(x in square(n)) -> CMatrix {
        qr(&x).0
    }
}

prop_compose! {
    /// Matrix of known exact rank; nonzero singular values lie in [1/2, 3].
    pub fn ranked(n: usize)
        (k in 0..=n)
        (k in Just(k), s in vec(0.5..3.0f64, k), u in unitary(n), v in unitary(n))
    -> (CMatrix, usize) {
        let mut diag = s;
        diag.resize(n, 0.0);
        (u.mul(&CMatrix::from_diag_re(&diag)).mul(&v.adjoint()), k)
    }
}

prop_compose! {
    /// Eigenvalues with pairwise separation ≥ 1/5, so that the computed
    /// spectrum is reliable far below the matching tolerances.
    pub fn separated_eigenvalues(n: usize)
        (lams in vec(entry(), n).prop_filter("separated", |ls| {
            ls.iter().enumerate().all(|(i, a)| {
                ls[..i].iter().all(|b| (a - b).norm() >= 0.2)
            })
        }))
    -> Vec<Complex64> {
        lams
    }
}

prop_compose! {
    /// Diagonalizable matrix with a well-conditioned eigenbasis and known,
    /// well-separated eigenvalues.
    pub fn diagonalizable(n: usize)
        (lams in separated_eigenvalues(n), v in invertible(n))
    -> (CMatrix, Vec<Complex64>) {
        let inv = opalg_core::matcore::inverse(&v).unwrap();
        (v.mul(&CMatrix::from_diag(&lams)).mul(&inv), lams)
    }
}

pub fn projection_of_rank(u: &CMatrix, k: usize) -> Projection {
    Projection::from_orthonormal_columns(u, k)
}

/// Projection onto columns start..start+len of a unitary basis.
pub fn projection_of_columns(u: &CMatrix, start: usize, len: usize) -> Projection {
    let n = u.n();
    let shifted = CMatrix::from_fn(n, |r, c| u.get(r, (c + start) % n));
    Projection::from_orthonormal_columns(&shifted, len)
}
