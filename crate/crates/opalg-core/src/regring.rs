//! Regular-ring layer: supports, rank metric, singular value function,
//! Peirce decomposition, idempotent normalization, and the invertible
//! normalizers that move a general element onto its supports.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::Error;
use crate::matcore::{default_rank_tol, numerical_rank, rank_from_singular_values, svd, CMatrix};

/// Construction thresholds for projections and idempotents.
pub const PROJECTION_TOL: f64 = 1e-10;
pub const IDEMPOTENT_TOL: f64 = 1e-8;
pub const PROJECTION_EQ_TOL: f64 = 1e-8;

// ── Projection ──────────────────────────────────────────────────────────────

/// Orthogonal projection with rational trace k/n.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    m: CMatrix,
    k: usize,
}

impl Projection {
    /// Accept a numerically Hermitian idempotent and snap it to an exact
    /// orthogonal projection by spectral truncation at 1/2.
    pub fn new(m: CMatrix) -> Result<Self, Error> {
        let idem = m.mul(&m).sub(&m).fro_norm();
        if idem > PROJECTION_TOL {
            return Err(Error::NotIdempotent { residual: idem });
        }
        let herm = m.sub(&m.adjoint()).fro_norm();
        if herm > PROJECTION_TOL {
            return Err(Error::Usage("projection must be Hermitian"));
        }
        Ok(Self::snap(&m.hermitize()))
    }

    /// Spectral truncation of a Hermitian matrix with eigenvalues near {0, 1}.
    pub(crate) fn snap(h: &CMatrix) -> Self {
        let n = h.n();
        let f = svd(h).expect("jacobi svd of hermitian matrix");
        let mut m = CMatrix::zero(n);
        let mut k = 0;
        for i in 0..n {
            if f.s[i] > 0.5 {
                k += 1;
                for r in 0..n {
                    for c in 0..n {
                        let cur = m.get(r, c);
                        m.set(r, c, cur + f.u.get(r, i) * f.u.get(c, i).conj());
                    }
                }
            }
        }
        Projection {
            m: m.hermitize(),
            k,
        }
    }

    /// Projection onto the span of the first `k` columns of `basis`.
    pub fn from_orthonormal_columns(basis: &CMatrix, k: usize) -> Self {
        let n = basis.n();
        let mut m = CMatrix::zero(n);
        for i in 0..k {
            for r in 0..n {
                for c in 0..n {
                    let cur = m.get(r, c);
                    m.set(r, c, cur + basis.get(r, i) * basis.get(c, i).conj());
                }
            }
        }
        Projection {
            m: m.hermitize(),
            k,
        }
    }

    pub fn zero(n: usize) -> Self {
        Projection {
            m: CMatrix::zero(n),
            k: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            m: CMatrix::identity(n),
            k: n,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn order(&self) -> usize {
        self.m.n()
    }

    /// Rank, the numerator of the normalized trace k/n.
    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn trace_value(&self) -> f64 {
        self.k as f64 / self.order() as f64
    }

    pub fn complement(&self) -> Self {
        Projection {
            m: CMatrix::identity(self.order()).sub(&self.m),
            k: self.order() - self.k,
        }
    }

    pub fn close_to(&self, other: &Projection) -> bool {
        self.m.sub(&other.m).fro_norm() <= PROJECTION_EQ_TOL
    }

    /// Order relation p ≤ q, i.e. q·p = p.
    pub fn le(&self, other: &Projection) -> bool {
        other.m.mul(&self.m).sub(&self.m).fro_norm() <= PROJECTION_EQ_TOL
    }

    pub fn orthogonal_to(&self, other: &Projection) -> bool {
        self.m.mul(&other.m).fro_norm() <= PROJECTION_EQ_TOL
    }
}

// ── Supports and rank metric ────────────────────────────────────────────────

/// Left and right supports l(x) = vv*, r(x) = v*v of the polar partial
/// isometry, as exact projections of trace rank(x)/n.
pub fn supports(x: &CMatrix) -> Result<(Projection, Projection), Error> {
    let n = x.n();
    let f = svd(x)?;
    let r = rank_from_singular_values(&f.s, default_rank_tol(n));
    Ok((
        Projection::from_orthonormal_columns(&f.u, r),
        Projection::from_orthonormal_columns(&f.v, r),
    ))
}

/// ρ(x, y) = rank(x − y)/n.
pub fn rank_metric(x: &CMatrix, y: &CMatrix) -> Result<f64, Error> {
    if x.n() != y.n() {
        return Err(Error::DimMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    let r = numerical_rank(&x.sub(y), None)?;
    Ok(r as f64 / x.n() as f64)
}

/// Rank norm ‖x‖_S = ρ(x, 0) = τ(l(x)).
pub fn rank_norm(x: &CMatrix) -> Result<f64, Error> {
    rank_metric(x, &CMatrix::zero(x.n()))
}

/// Singular value function μ(t; x), the right-continuous step function
/// through the ordered singular values: μ(t; x) = s_{⌊tn⌋+1}.
pub fn sv_function(x: &CMatrix, t: f64) -> Result<f64, Error> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Usage("sv_function requires t in [0, 1)"));
    }
    let f = svd(x)?;
    let idx = (t * x.n() as f64) as usize;
    Ok(f.s[idx.min(x.n() - 1)])
}

/// ‖x‖_{L0} = inf_{t>0} {t + μ(t; x)}, the exact minimum over the n+1
/// breakpoints k/n with μ ≡ s_{k+1} beyond the k-th and s_{n+1} = 0.
pub fn l0_norm(x: &CMatrix) -> Result<f64, Error> {
    let n = x.n();
    let f = svd(x)?;
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let step = k as f64 / n as f64 + if k < n { f.s[k] } else { 0.0 };
        if step < best {
            best = step;
        }
    }
    Ok(best)
}

// ── Peirce decomposition ────────────────────────────────────────────────────

/// The four corners pxp, pxq, qxp, qxq with q = 1 − p.
#[derive(Clone, Debug)]
pub struct PeirceBlocks {
    pub p: Projection,
    pub pxp: CMatrix,
    pub pxq: CMatrix,
    pub qxp: CMatrix,
    pub qxq: CMatrix,
}

impl PeirceBlocks {
    pub fn reconstruct(&self) -> CMatrix {
        self.pxp.add(&self.pxq).add(&self.qxp).add(&self.qxq)
    }
}

pub fn peirce_decompose(x: &CMatrix, p: &Projection) -> Result<PeirceBlocks, Error> {
    if x.n() != p.order() {
        return Err(Error::DimMismatch {
            left: x.n(),
            right: p.order(),
        });
    }
    let pm = p.matrix();
    let qm = p.complement();
    let qm = qm.matrix();
    Ok(PeirceBlocks {
        p: p.clone(),
        pxp: pm.mul(x).mul(pm),
        pxq: pm.mul(x).mul(qm),
        qxp: qm.mul(x).mul(pm),
        qxq: qm.mul(x).mul(qm),
    })
}

// ── Idempotent machinery ────────────────────────────────────────────────────

/// e = p + u with p = l(e) and u = p·u·(1 − p).
#[derive(Clone, Debug)]
pub struct IdempotentSplit {
    pub p: Projection,
    pub u: CMatrix,
}

pub fn idempotent_split(e: &CMatrix) -> Result<IdempotentSplit, Error> {
    let residual = e.mul(e).sub(e).fro_norm();
    if residual > IDEMPOTENT_TOL {
        return Err(Error::NotIdempotent { residual });
    }
    let (p, _) = supports(e)?;
    let u = e.sub(p.matrix());
    Ok(IdempotentSplit { p, u })
}

/// Invertible a with a·e·a⁻¹ = l(e): a = l(e) + u + (1 − l(e)) = 1 + u,
/// whose inverse is 1 − u since u² = 0.
pub fn projection_conjugator(e: &CMatrix) -> Result<CMatrix, Error> {
    let split = idempotent_split(e)?;
    Ok(CMatrix::identity(e.n()).add(&split.u))
}

// ── Support normalizers ─────────────────────────────────────────────────────

/// Invertible (a, b) with x·a = l(x) and b·x = r(x), built as w + i(x) from
/// the partial isometry w = V₂·U₂* between the kernel complements. A single
/// matrix serves both sides; its inverse is w* + x.
pub fn support_normalizers(x: &CMatrix) -> Result<(CMatrix, CMatrix), Error> {
    if x.max_abs() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let n = x.n();
    let f = svd(x)?;
    let r = rank_from_singular_values(&f.s, default_rank_tol(n));
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        d.push(if i < r { 1.0 / f.s[i] } else { 1.0 });
    }
    // a = V·diag(1/s₁..1/s_r, 1, …, 1)·U*
    let a = CMatrix::from_fn(n, |rr, cc| {
        (0..n)
            .map(|i| f.v.get(rr, i) * d[i] * f.u.get(cc, i).conj())
            .sum::<Complex64>()
    });
    Ok((a.clone(), a))
}

// ── Projection lattice ──────────────────────────────────────────────────────

/// Meet and join in the projection lattice. The join is the support of
/// p + q (the range sum); the meet follows by de Morgan.
pub fn proj_meet_join(p: &Projection, q: &Projection) -> Result<(Projection, Projection), Error> {
    if p.order() != q.order() {
        return Err(Error::DimMismatch {
            left: p.order(),
            right: q.order(),
        });
    }
    let join = range_join(p, q)?;
    let meet = range_join(&p.complement(), &q.complement())?.complement();
    Ok((meet, join))
}

/// Singular values of a sum of two projections are 1 ± cos of the principal
/// angles (plus 2 on shared directions), so the rank cut is taken at the
/// absolute scale of the projection entries, not relative to σ₁ — the sum of
/// two complements can be numerically zero and must report rank 0.
fn projection_sum_rank(s: &[f64]) -> usize {
    s.iter().filter(|&&sv| sv > PROJECTION_TOL).count()
}

fn range_join(p: &Projection, q: &Projection) -> Result<Projection, Error> {
    let sum = p.matrix().add(q.matrix());
    let f = svd(&sum)?;
    let r = projection_sum_rank(&f.s);
    Ok(Projection::from_orthonormal_columns(&f.u, r))
}

/// σ-gap at the rank cut of p + q, the diagnostic for numerically
/// ambiguous joins (near-parallel ranges).
pub fn join_rank_gap(p: &Projection, q: &Projection) -> Result<f64, Error> {
    let sum = p.matrix().add(q.matrix());
    let n = sum.n();
    let f = svd(&sum)?;
    let r = projection_sum_rank(&f.s);
    if r == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(f.s[r - 1] - if r < n { f.s[r] } else { 0.0 })
}

// ── Tests ───────────────────────────────────────────────────────────────────
