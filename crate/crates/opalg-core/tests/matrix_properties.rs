//! Factorization contracts and the rank-metric axioms on randomized
//! instances.

mod common;

use common::*;
use opalg_core::fkdet::BrownMeasure;
use opalg_core::matcore::{inverse, numerical_rank, pinv, schur, schur_reorder, svd};
use opalg_core::regring::{l0_norm, rank_metric, rank_norm, support_normalizers, supports};
use opalg_core::CMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn svd_factors_and_reconstruction(x in square(5)) {
        let f = svd(&x).unwrap();
        for w in f.s.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let eye = CMatrix::identity(5);
        prop_assert!(f.u.mul(&f.u.adjoint()).sub(&eye).fro_norm() <= 1e-12);
        prop_assert!(f.v.mul(&f.v.adjoint()).sub(&eye).fro_norm() <= 1e-12);
        let scale = x.fro_norm().max(1.0);
        prop_assert!(f.reconstruct().sub(&x).fro_norm() <= 1e-12 * scale);
    }

    #[test]
    fn pinv_is_an_involution(x in square(4)) {
        let once = pinv(&x, None).unwrap();
        let twice = pinv(&once, None).unwrap();
        prop_assert!(twice.sub(&x).fro_norm() <= 1e-8 * x.fro_norm().max(1.0));
    }

    #[test]
    fn schur_reorder_preserves_spectrum(x in square(4), t in -2.0..2.0f64) {
        let f = schur(&x).unwrap();
        let reordered = schur_reorder(&f, |z| z.re > t);
        prop_assume!(reordered.is_ok());
        let (g, k) = reordered.unwrap();
        prop_assert!(g.eigenvalues[..k].iter().all(|z| z.re > t));
        prop_assert!(g.eigenvalues[k..].iter().all(|z| z.re <= t));
        let before = BrownMeasure::from_points(&f.eigenvalues);
        let after = BrownMeasure::from_points(&g.eigenvalues);
        prop_assert!(before.matches(&after, 1e-8));
        let scale = x.fro_norm().max(1.0);
        prop_assert!(g.reconstruct().sub(&x).fro_norm() <= 1e-9 * scale);
    }

    #[test]
    fn rank_is_a_unitary_invariant((x, k) in ranked(4), u in unitary(4), v in unitary(4)) {
        prop_assert_eq!(numerical_rank(&x, None).unwrap(), k);
        prop_assert_eq!(numerical_rank(&x.adjoint(), None).unwrap(), k);
        prop_assert_eq!(numerical_rank(&u.mul(&x).mul(&v), None).unwrap(), k);
    }

    #[test]
    fn rank_norm_counts_exactly((x, k) in ranked(4)) {
        prop_assert_eq!(rank_norm(&x).unwrap(), k as f64 / 4.0);
    }

    #[test]
    fn rank_metric_triangle(x in square(3), y in square(3), z in square(3)) {
        let xz = rank_metric(&x, &z).unwrap();
        let xy = rank_metric(&x, &y).unwrap();
        let yz = rank_metric(&y, &z).unwrap();
        prop_assert!(xz <= xy + yz);
    }

    #[test]
    fn rank_norm_of_products(x in square(3), y in square(3)) {
        let xy = rank_norm(&x.mul(&y)).unwrap();
        prop_assert!(xy <= rank_norm(&x).unwrap().min(rank_norm(&y).unwrap()));
    }

    #[test]
    fn rank_norm_additive_on_orthogonal_projections(
        u in unitary(5),
        k1 in 0usize..=2,
        k2 in 0usize..=2,
    ) {
        let p = projection_of_columns(&u, 0, k1);
        let q = projection_of_columns(&u, k1, k2);
        let sum = p.matrix().add(q.matrix());
        prop_assert_eq!(rank_norm(&sum).unwrap(), (k1 + k2) as f64 / 5.0);
    }

    #[test]
    fn rank_norm_is_scale_invariant((x, _) in ranked(3), lam in nonzero_scalar()) {
        prop_assert_eq!(rank_norm(&x.scale(lam)).unwrap(), rank_norm(&x).unwrap());
    }

    #[test]
    fn supports_ignore_invertible_factors(
        (x, _) in ranked(3),
        a in invertible(3),
        b in invertible(3),
    ) {
        let (l, r) = supports(&x).unwrap();
        let (l2, _) = supports(&x.mul(&b)).unwrap();
        prop_assert!(l2.close_to(&l));
        let (_, r2) = supports(&a.mul(&x)).unwrap();
        prop_assert!(r2.close_to(&r));
    }

    #[test]
    fn rank_under_multiplication(
        (x, k) in ranked(3),
        a in invertible(3),
        b in invertible(3),
        m in square(3),
    ) {
        prop_assert_eq!(numerical_rank(&a.mul(&x).mul(&b), None).unwrap(), k);
        prop_assert!(numerical_rank(&m.mul(&x), None).unwrap() <= k);
    }

    #[test]
    fn block_rank_identity(a in square(3), b in square(3), c in invertible(3)) {
        let zero = CMatrix::zero(3);
        let block = CMatrix::from_blocks(&zero, &a, &b, &c);
        let corner = a.mul(&inverse(&c).unwrap()).mul(&b);
        prop_assert_eq!(
            numerical_rank(&block, None).unwrap(),
            3 + numerical_rank(&corner, None).unwrap()
        );
    }

    #[test]
    fn pinv_and_normalizer_identities((x, k) in ranked(3)) {
        let i = pinv(&x, None).unwrap();
        prop_assert!(x.mul(&i).mul(&x).sub(&x).fro_norm() <= 1e-10);
        prop_assert!(i.mul(&x).mul(&i).sub(&i).fro_norm() <= 1e-10);
        let xi = x.mul(&i);
        let ix = i.mul(&x);
        prop_assert!(xi.adjoint().sub(&xi).fro_norm() <= 1e-10);
        prop_assert!(ix.adjoint().sub(&ix).fro_norm() <= 1e-10);
        let (l, r) = supports(&x).unwrap();
        prop_assert!(xi.sub(l.matrix()).fro_norm() <= 1e-10);
        prop_assert!(ix.sub(r.matrix()).fro_norm() <= 1e-10);

        prop_assume!(k > 0);
        let (a, b) = support_normalizers(&x).unwrap();
        prop_assert_eq!(numerical_rank(&a, None).unwrap(), 3);
        prop_assert!(x.mul(&a).sub(l.matrix()).fro_norm() <= 1e-10);
        prop_assert!(b.mul(&x).sub(r.matrix()).fro_norm() <= 1e-10);
    }

    #[test]
    fn l0_norm_limit_recovers_rank_norm((x, _) in ranked(4)) {
        let blown = x.scale_re(1e8);
        let diff = (l0_norm(&blown).unwrap() - rank_norm(&x).unwrap()).abs();
        prop_assert!(diff <= 1e-6);
    }
}
