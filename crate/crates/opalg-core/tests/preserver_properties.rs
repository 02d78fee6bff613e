//! Preservation lemmas for rank isometries and the decomposition round
//! trip on randomized canonical forms.

mod common;

use common::*;
use opalg_core::decomp::{decompose, reject_probe, Classification, Mode, RESIDUAL_TOL};
use opalg_core::fkdet::{brown_measure, fk_logdet};
use opalg_core::maps::{
    from_form, is_multiplicative, is_rank_isometry, support_image, Jordan, MapForm, ProbeSet,
    MULT_TOL,
};
use opalg_core::matcore::{inverse, numerical_rank, polar_unitary};
use opalg_core::regring::proj_meet_join;
use opalg_core::CMatrix;
use proptest::prelude::*;

pub fn jordan() -> impl Strategy<Value = Jordan> {
    prop_oneof![Just(Jordan::Identity), Just(Jordan::Transpose)]
}

prop_compose! {
    pub fn any_form(n: usize)(
        a in invertible(n),
        b in invertible(n),
        jordan in jordan(),
        conjugated in any::<bool>(),
    ) -> MapForm {
        MapForm { a, b, jordan, conjugated }
    }
}

prop_compose! {
    /// Unital: Φ(1) = a·J(1)·a⁻¹ = 1 for every flag combination.
    pub fn unital_form(n: usize)(
        a in invertible(n),
        jordan in jordan(),
        conjugated in any::<bool>(),
    ) -> MapForm {
        let b = inverse(&a).unwrap();
        MapForm { a, b, jordan, conjugated }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_forms_are_rank_isometries(form in any_form(3), (x, _) in ranked(3)) {
        let f = from_form(&form).unwrap();
        let probes = ProbeSet { extra: vec![x] };
        prop_assert!(is_rank_isometry(&f, &probes).unwrap().is_pass());
    }

    #[test]
    fn invertibility_is_preserved_both_ways(form in any_form(3), (x, k) in ranked(3)) {
        let f = from_form(&form).unwrap();
        let image_rank = numerical_rank(&f.apply(&x).unwrap(), None).unwrap();
        prop_assert_eq!(image_rank, k);
        prop_assert_eq!(image_rank == 3, k == 3);
    }

    #[test]
    fn support_images_preserve_order_and_orthogonality(
        form in unital_form(4),
        u in unitary(4),
        k1 in 1usize..=2,
        k2 in 1usize..=2,
    ) {
        let f = from_form(&form).unwrap();
        let p = projection_of_columns(&u, 0, k1);
        let q = projection_of_columns(&u, 0, k1 + k2);
        let (phi_p, _) = support_image(&f, &p).unwrap();
        let (phi_q, _) = support_image(&f, &q).unwrap();
        prop_assert!(p.le(&q));
        prop_assert!(phi_p.le(&phi_q));

        let disjoint = projection_of_columns(&u, k1, k2);
        let (phi_d, _) = support_image(&f, &disjoint).unwrap();
        let (meet, _) = proj_meet_join(&phi_p, &phi_d).unwrap();
        prop_assert_eq!(meet.rank(), 0);
    }

    #[test]
    fn corner_supported_elements_have_zero_corner(
        u in unitary(4),
        k in 1usize..=3,
        z in square(4),
    ) {
        // x = p·z·q + q satisfies x = px + q and trace(l(x)) = trace(q);
        // the rank hypothesis is checked at a tolerance matching the
        // orthonormality error of the constructed basis
        let p = projection_of_columns(&u, 0, k);
        let q = p.complement();
        let x = p.matrix().mul(&z).mul(q.matrix()).add(q.matrix());
        prop_assert_eq!(numerical_rank(&x, Some(1e-10)).unwrap(), 4 - k);
        let pxp = p.matrix().mul(&x).mul(p.matrix());
        prop_assert!(pxp.fro_norm() <= 1e-8);
    }

    #[test]
    fn idempotents_map_to_idempotents(
        form in unital_form(3),
        u in unitary(3),
        k in 1usize..=2,
        g in square(3),
    ) {
        let p = projection_of_columns(&u, 0, k);
        let e = p
            .matrix()
            .add(&p.matrix().mul(&g).mul(&p.complement().matrix()));
        let f = from_form(&form).unwrap();
        let fe = f.apply(&e).unwrap();
        prop_assert!(fe.mul(&fe).sub(&fe).fro_norm() <= 1e-8);
    }

    #[test]
    fn zero_products_vanish_on_a_consistent_side(
        form in unital_form(3),
        u in unitary(3),
        k in 1usize..=2,
        g1 in square(3),
        h1 in square(3),
        g2 in square(3),
        h2 in square(3),
    ) {
        let f = from_form(&form).unwrap();
        let p = projection_of_columns(&u, 0, k);
        let pc = p.complement();
        let mut sides: Vec<bool> = Vec::new();
        for (g, h) in [(g1, h1), (g2, h2)] {
            let x = g.mul(p.matrix());
            let y = pc.matrix().mul(&h);
            prop_assert!(x.mul(&y).fro_norm() <= 1e-12);
            let fx = f.apply(&x).unwrap();
            let fy = f.apply(&y).unwrap();
            let scale = (fx.fro_norm() * fy.fro_norm()).max(1.0);
            let left = fx.mul(&fy).fro_norm() <= 1e-8 * scale;
            let right = fy.mul(&fx).fro_norm() <= 1e-8 * scale;
            prop_assert!(left || right);
            if left != right {
                sides.push(left);
            }
        }
        prop_assert!(sides.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn unital_linear_det_forms_preserve_brown_measures(
        a in invertible(4),
        jordan in jordan(),
        (x, _) in diagonalizable(4),
    ) {
        let form = MapForm { b: inverse(&a).unwrap(), a, jordan, conjugated: false };
        let f = from_form(&form).unwrap();
        let mu = brown_measure(&x).unwrap();
        let nu = brown_measure(&f.apply(&x).unwrap()).unwrap();
        prop_assert!(mu.matches(&nu, 1e-6));
    }

    #[test]
    fn decompose_round_trips_canonical_forms(form in any_form(3)) {
        let f = from_form(&form).unwrap();
        let r = decompose(&f, Mode::RankIsometry, &ProbeSet::empty()).unwrap();
        let expected = match form.jordan {
            Jordan::Identity => Classification::Isomorphism,
            Jordan::Transpose => Classification::AntiIsomorphism,
        };
        prop_assert_eq!(r.classification, expected);
        prop_assert!(r.residual <= RESIDUAL_TOL);
        let rec = r.form.unwrap();
        prop_assert_eq!(rec.jordan, form.jordan);
        prop_assert_eq!(rec.conjugated, form.conjugated);
        prop_assert!(reject_probe(&f).unwrap().is_none());
    }

    #[test]
    fn iso_and_anti_are_mutually_exclusive(form in unital_form(3)) {
        let f = from_form(&form).unwrap();
        let g = if form.conjugated {
            f.compose(&opalg_core::maps::MatrixMap::conjugate_map(3)).unwrap()
        } else {
            f
        };
        let report = is_multiplicative(&g, &ProbeSet::empty()).unwrap();
        prop_assert!(!(report.iso_residual <= MULT_TOL && report.anti_residual <= MULT_TOL));
    }

    #[test]
    fn polar_shift_determinant_identity(x in square(4), lam in entry()) {
        let (u, absx) = polar_unitary(&x).unwrap();
        let sigma = opalg_core::matcore::svd(&x).unwrap().s;
        prop_assume!(sigma
            .iter()
            .all(|&s| (num_complex::Complex64::new(s, 0.0) - lam).norm() >= 1e-3));
        let lhs = fk_logdet(&x.sub(&u.scale(lam))).unwrap();
        let rhs = fk_logdet(&absx.sub(&CMatrix::identity(4).scale(lam))).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8);
    }
}
