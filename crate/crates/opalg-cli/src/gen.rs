//! Deterministic instance generators.
//!
//! Every generator draws from a ChaCha stream seeded by folding the master
//! seed with structural tags (family, order, property, trial counter), so any
//! instance can be rebuilt from the numbers recorded in a report. No global
//! RNG anywhere.

use num_complex::Complex64;
use opalg_core::maps::{from_form, Jordan, MapForm, MatrixMap, ProbeSet};
use opalg_core::matcore::{inverse, qr};
use opalg_core::regring::Projection;
use opalg_core::{CMatrix, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// FNV-1a, used to tag streams by property name.
pub fn fnv64(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Stream for (master seed, tag₁, tag₂, …), independent across tag tuples.
pub fn derive_stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut acc = splitmix(master);
    for &t in tags {
        acc = splitmix(acc ^ splitmix(t));
    }
    ChaCha8Rng::seed_from_u64(acc)
}

/// Standard complex Gaussian: E|z|² = 1.
pub fn cnormal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre ensemble, entries CN(0, 1/n).
pub fn ginibre(rng: &mut impl Rng, n: usize) -> CMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, |_, _| cnormal(rng) * scale)
}

/// Haar-distributed unitary: QR of Ginibre with the diagonal phase fix that
/// makes the R factor's diagonal positive.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let (q, r) = qr(&ginibre(rng, n));
    CMatrix::from_fn(n, |i, j| {
        let d = r.get(j, j);
        let phase = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        q.get(i, j) * phase
    })
}

/// Rank-k orthogonal projection onto a Haar-random subspace.
pub fn random_projection(rng: &mut impl Rng, n: usize, k: usize) -> Result<Projection, Error> {
    if k > n {
        return Err(Error::Usage("projection rank exceeds order"));
    }
    Ok(Projection::from_orthonormal_columns(
        &haar_unitary(rng, n),
        k,
    ))
}

/// u·diag(s)·v† with log-uniform singular values in [1/√c, √c]; the condition
/// number never exceeds `cond_max`.
pub fn random_invertible(rng: &mut impl Rng, n: usize, cond_max: f64) -> Result<CMatrix, Error> {
    if !(cond_max >= 1.0) {
        return Err(Error::Usage("condition bound must be at least 1"));
    }
    let l = 0.5 * cond_max.ln();
    let s: Vec<f64> = (0..n)
        .map(|_| (rng.gen_range(-1.0..=1.0f64) * l).exp())
        .collect();
    let u = haar_unitary(rng, n);
    let v = haar_unitary(rng, n);
    Ok(CMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|i| u.get(r, i) * s[i] * v.get(c, i).conj())
            .sum()
    }))
}

/// Strictly upper triangular Gaussian matrix (nilpotent of order ≤ n).
pub fn nilpotent_upper(rng: &mut impl Rng, n: usize) -> CMatrix {
    let mut x = CMatrix::zero(n);
    for r in 0..n {
        for c in r + 1..n {
            x.set(r, c, cnormal(rng));
        }
    }
    x
}

/// Idempotent e = p + p·g·(1 − p) with p a random projection of rank
/// 1 ≤ k ≤ n − 1 (the identity for n = 1).
pub fn random_idempotent(rng: &mut impl Rng, n: usize) -> Result<CMatrix, Error> {
    if n < 2 {
        return Ok(CMatrix::identity(n));
    }
    let k = rng.gen_range(1..n);
    let p = random_projection(rng, n, k)?;
    let g = ginibre(rng, n);
    let q = p.complement();
    Ok(p.matrix().add(&p.matrix().mul(&g).mul(q.matrix())))
}

/// Diagonal ≥ 0 with each entry zero with probability 1/4, else U[1e-3, 3].
pub fn positive_diag(rng: &mut impl Rng, n: usize) -> CMatrix {
    let d: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < 0.25 {
                0.0
            } else {
                rng.gen_range(1e-3..=3.0)
            }
        })
        .collect();
    CMatrix::from_diag_re(&d)
}

/// diag((k − 1/2)/n), the midpoint discretization of multiplication by t on
/// L²[0, 1].
pub fn interval_midpoints(n: usize) -> CMatrix {
    let d: Vec<f64> = (1..=n).map(|k| (k as f64 - 0.5) / n as f64).collect();
    CMatrix::from_diag_re(&d)
}

/// Exact-rank-k matrix u·diag(s₁..s_k, 0, …)·v† with log-uniform nonzero
/// singular values in [lo, hi].
pub fn ranked(rng: &mut impl Rng, n: usize, k: usize, lo: f64, hi: f64) -> Result<CMatrix, Error> {
    if k > n || !(0.0 < lo && lo <= hi) {
        return Err(Error::Usage("rank or singular-value window out of range"));
    }
    let u = haar_unitary(rng, n);
    let v = haar_unitary(rng, n);
    let s: Vec<f64> = (0..n)
        .map(|i| {
            if i < k {
                (rng.gen_range(lo.ln()..=hi.ln())).exp()
            } else {
                0.0
            }
        })
        .collect();
    Ok(CMatrix::from_fn(n, |r, c| {
        (0..k)
            .map(|i| u.get(r, i) * s[i] * v.get(c, i).conj())
            .sum()
    }))
}

/// Canonical form x ↦ a·J(x)·b with independently drawn invertible factors,
/// returned together with its operator realization.
pub fn canonical_form(
    rng: &mut impl Rng,
    n: usize,
    jordan: Jordan,
    conjugated: bool,
    cond_max: f64,
) -> Result<(MapForm, MatrixMap), Error> {
    let a = random_invertible(rng, n, cond_max)?;
    let b = random_invertible(rng, n, cond_max)?;
    let form = MapForm {
        a,
        b,
        jordan,
        conjugated,
    };
    let map = from_form(&form)?;
    Ok((form, map))
}

/// Unital canonical form: b = a⁻¹, so the map fixes the identity.
pub fn unital_form(
    rng: &mut impl Rng,
    n: usize,
    jordan: Jordan,
    conjugated: bool,
    cond_max: f64,
) -> Result<(MapForm, MatrixMap), Error> {
    let a = random_invertible(rng, n, cond_max)?;
    let b = inverse(&a)?;
    let form = MapForm {
        a,
        b,
        jordan,
        conjugated,
    };
    let map = from_form(&form)?;
    Ok((form, map))
}

/// Canonical form with a relative Gaussian perturbation of the operator
/// matrix: op ← op + ε·(‖op‖_F/‖P‖_F)·P.
pub fn perturbed_form(
    rng: &mut impl Rng,
    n: usize,
    jordan: Jordan,
    conjugated: bool,
    cond_max: f64,
    eps: f64,
) -> Result<MatrixMap, Error> {
    if !(eps > 0.0) {
        return Err(Error::Usage("perturbation size must be positive"));
    }
    let (_, map) = canonical_form(rng, n, jordan, conjugated, cond_max)?;
    let m = n * n;
    let p = CMatrix::from_fn(m, |_, _| cnormal(rng));
    let scale = eps * map.op().fro_norm() / p.fro_norm();
    let op = map.op().add(&p.scale_re(scale));
    MatrixMap::from_op(n, map.kind(), op)
}

/// Probe matrices covering both rank regimes: alternating full-rank Ginibre
/// and exact-rank-deficient draws.
pub fn probe_set(rng: &mut impl Rng, n: usize, count: usize) -> Result<ProbeSet, Error> {
    let mut extra = Vec::with_capacity(count);
    for i in 0..count {
        if i % 2 == 0 {
            extra.push(ginibre(rng, n));
        } else {
            let k = rng.gen_range(0..n.max(1));
            extra.push(ranked(rng, n, k, 0.5, 2.0)?);
        }
    }
    Ok(ProbeSet { extra })
}

// ── Named families for the CLI ──────────────────────────────────────────────

#[derive(Clone, Debug)]
pub enum Family {
    Ginibre,
    HaarUnitary,
    RandomProjection {
        k: usize,
    },
    RandomInvertible {
        cond_max: f64,
    },
    NilpotentUpper,
    RandomIdempotent,
    PositiveDiag,
    IntervalMidpoints,
    CanonicalForm {
        jordan: Jordan,
        conjugated: bool,
        cond_max: f64,
    },
    PerturbedForm {
        jordan: Jordan,
        conjugated: bool,
        cond_max: f64,
        eps: f64,
    },
}

pub enum Generated {
    Matrix(CMatrix),
    Map(MatrixMap),
    Proj(Projection),
}

fn family_tag(family: &Family) -> u64 {
    match family {
        Family::Ginibre => 1,
        Family::HaarUnitary => 2,
        Family::RandomProjection { .. } => 3,
        Family::RandomInvertible { .. } => 4,
        Family::NilpotentUpper => 5,
        Family::RandomIdempotent => 6,
        Family::PositiveDiag => 7,
        Family::IntervalMidpoints => 8,
        Family::CanonicalForm { .. } => 9,
        Family::PerturbedForm { .. } => 10,
    }
}

/// Deterministic in (family, n, seed).
pub fn generate(family: &Family, n: usize, seed: u64) -> Result<Generated, Error> {
    if n == 0 {
        return Err(Error::Usage("order must be positive"));
    }
    let mut rng = derive_stream(seed, &[family_tag(family), n as u64]);
    Ok(match family {
        Family::Ginibre => Generated::Matrix(ginibre(&mut rng, n)),
        Family::HaarUnitary => Generated::Matrix(haar_unitary(&mut rng, n)),
        Family::RandomProjection { k } => Generated::Proj(random_projection(&mut rng, n, *k)?),
        Family::RandomInvertible { cond_max } => {
            Generated::Matrix(random_invertible(&mut rng, n, *cond_max)?)
        }
        Family::NilpotentUpper => Generated::Matrix(nilpotent_upper(&mut rng, n)),
        Family::RandomIdempotent => Generated::Matrix(random_idempotent(&mut rng, n)?),
        Family::PositiveDiag => Generated::Matrix(positive_diag(&mut rng, n)),
        Family::IntervalMidpoints => Generated::Matrix(interval_midpoints(n)),
        Family::CanonicalForm {
            jordan,
            conjugated,
            cond_max,
        } => Generated::Map(canonical_form(&mut rng, n, *jordan, *conjugated, *cond_max)?.1),
        Family::PerturbedForm {
            jordan,
            conjugated,
            cond_max,
            eps,
        } => Generated::Map(perturbed_form(
            &mut rng,
            n,
            *jordan,
            *conjugated,
            *cond_max,
            *eps,
        )?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use opalg_core::matcore::numerical_rank;
    use opalg_core::regring::rank_norm;

    fn rng(seed: u64) -> ChaCha8Rng {
        derive_stream(seed, &[])
    }

    #[test]
    fn streams_are_deterministic_and_tag_separated() {
        let a = ginibre(&mut derive_stream(7, &[1, 4]), 4);
        let b = ginibre(&mut derive_stream(7, &[1, 4]), 4);
        let c = ginibre(&mut derive_stream(7, &[2, 4]), 4);
        assert_eq!(a.entries(), b.entries());
        assert!(a.sub(&c).fro_norm() > 1e-6);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = haar_unitary(&mut rng(3), 5);
        let g = u.adjoint().mul(&u);
        assert!(g.sub(&CMatrix::identity(5)).fro_norm() <= 1e-12);
    }

    #[test]
    fn projection_has_requested_trace() {
        let p = random_projection(&mut rng(11), 2, 1).unwrap();
        assert_eq!(p.rank(), 1);
        assert!((p.trace_value() - 0.5).abs() <= 1e-12);
        assert!(random_projection(&mut rng(11), 2, 3).is_err());
    }

    #[test]
    fn invertible_condition_bound_holds() {
        let x = random_invertible(&mut rng(5), 6, 100.0).unwrap();
        let f = opalg_core::matcore::svd(&x).unwrap();
        assert!(f.s[0] / f.s[5] <= 100.0 + 1e-6);
        assert!(random_invertible(&mut rng(5), 3, 0.5).is_err());
    }

    #[test]
    fn interval_midpoint_diagonal() {
        let x = interval_midpoints(4);
        let expect = [0.125, 0.375, 0.625, 0.875];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(x.get(i, i).re, e);
        }
    }

    #[test]
    fn idempotent_is_idempotent() {
        let e = random_idempotent(&mut rng(9), 5).unwrap();
        assert!(e.mul(&e).sub(&e).fro_norm() <= 1e-10);
    }

    #[test]
    fn nilpotent_and_ranked_have_expected_ranks() {
        let x = nilpotent_upper(&mut rng(2), 4);
        assert!(x.mul(&x).mul(&x).mul(&x).fro_norm() <= 1e-30);
        let y = ranked(&mut rng(2), 5, 2, 0.5, 2.0).unwrap();
        assert_eq!(numerical_rank(&y, None).unwrap(), 2);
        assert!((rank_norm(&y).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn canonical_map_realizes_its_form() {
        let (form, map) = canonical_form(&mut rng(13), 3, Jordan::Transpose, true, 50.0).unwrap();
        let x = ginibre(&mut rng(14), 3);
        let lhs = map.apply(&x).unwrap();
        let rhs = form.apply(&x);
        assert!(lhs.sub(&rhs).fro_norm() <= 1e-10 * rhs.fro_norm());

        let (uform, umap) = unital_form(&mut rng(15), 3, Jordan::Identity, false, 50.0).unwrap();
        let one = CMatrix::identity(3);
        assert!(umap.apply(&one).unwrap().sub(&one).fro_norm() <= 1e-10);
        assert!(uform.a.mul(&uform.b).sub(&one).fro_norm() <= 1e-10);
    }

    #[test]
    fn generate_is_deterministic_in_the_triple() {
        let a = match generate(&Family::Ginibre, 3, 42).unwrap() {
            Generated::Matrix(m) => m,
            _ => unreachable!(),
        };
        let b = match generate(&Family::Ginibre, 3, 42).unwrap() {
            Generated::Matrix(m) => m,
            _ => unreachable!(),
        };
        assert_eq!(a.entries(), b.entries());
    }
}
