//! Linear and conjugate-linear operators on Mₙ as first-class values:
//! canonical forms a·J(x)·b, composition, inversion, and the preservation
//! checkers (rank isometry, determinant, multiplicativity).
//!
//! A map is stored as its n²×n² operator on the column-major vectorization;
//! a conjugate-linear map stores the operator applied to vec(conj(x)). The
//! checkers always run the structured deterministic family (matrix units
//! and their pairwise sums) in addition to any caller-supplied probes, so
//! that a pass verdict is exhaustive for maps of the canonical form.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::Error;
use crate::fkdet::fk_det;
use crate::matcore::{default_rank_tol, inverse, numerical_rank, svd, CMatrix, EPS};
use crate::regring::Projection;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Linear,
    Conjugate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Jordan {
    Identity,
    Transpose,
}

/// Φ(x) = a·J(x)·b with J = identity or transpose, composed with entrywise
/// conjugation when `conjugated` is set.
#[derive(Clone, Debug)]
pub struct MapForm {
    pub a: CMatrix,
    pub b: CMatrix,
    pub jordan: Jordan,
    pub conjugated: bool,
}

impl MapForm {
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let j = match self.jordan {
            Jordan::Identity => x.clone(),
            Jordan::Transpose => x.transpose(),
        };
        let j = if self.conjugated { j.conj() } else { j };
        self.a.mul(&j).mul(&self.b)
    }
}

/// Operator on Mₙ, stored via its action on column-major vectorizations.
#[derive(Clone, Debug)]
pub struct MatrixMap {
    n: usize,
    kind: MapKind,
    op: CMatrix,
}

impl MatrixMap {
    pub fn from_op(n: usize, kind: MapKind, op: CMatrix) -> Result<Self, Error> {
        if op.n() != n * n {
            return Err(Error::DimMismatch {
                left: n * n,
                right: op.n(),
            });
        }
        Ok(MatrixMap { n, kind, op })
    }

    pub fn identity(n: usize) -> Self {
        MatrixMap {
            n,
            kind: MapKind::Linear,
            op: CMatrix::identity(n * n),
        }
    }

    pub fn transpose_map(n: usize) -> Self {
        let mut op = CMatrix::zero(n * n);
        for r in 0..n {
            for c in 0..n {
                op.set(r * n + c, c * n + r, Complex64::new(1.0, 0.0));
            }
        }
        MatrixMap {
            n,
            kind: MapKind::Linear,
            op,
        }
    }

    pub fn conjugate_map(n: usize) -> Self {
        MatrixMap {
            n,
            kind: MapKind::Conjugate,
            op: CMatrix::identity(n * n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn op(&self) -> &CMatrix {
        &self.op
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix, Error> {
        if x.n() != self.n {
            return Err(Error::DimMismatch {
                left: self.n,
                right: x.n(),
            });
        }
        let arg = match self.kind {
            MapKind::Linear => x.clone(),
            MapKind::Conjugate => x.conj(),
        };
        let v = arg.vec_col_major();
        let m = self.n * self.n;
        let mut out = Vec::with_capacity(m);
        for r in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..m {
                acc += self.op.get(r, c) * v[c];
            }
            out.push(acc);
        }
        Ok(CMatrix::from_vec_col_major(self.n, &out))
    }

    pub fn is_bijective(&self) -> bool {
        numerical_rank(&self.op, None).map_or(false, |r| r == self.n * self.n)
    }

    /// f∘g. Kind flags combine by exclusive-or; a conjugate-linear outer map
    /// sees the conjugated operator of the inner one.
    pub fn compose(&self, g: &MatrixMap) -> Result<MatrixMap, Error> {
        if self.n != g.n {
            return Err(Error::DimMismatch {
                left: self.n,
                right: g.n,
            });
        }
        let inner = match self.kind {
            MapKind::Linear => g.op.clone(),
            MapKind::Conjugate => g.op.conj(),
        };
        let kind = if (self.kind == MapKind::Conjugate) != (g.kind == MapKind::Conjugate) {
            MapKind::Conjugate
        } else {
            MapKind::Linear
        };
        Ok(MatrixMap {
            n: self.n,
            kind,
            op: self.op.mul(&inner),
        })
    }

    pub fn invert(&self) -> Result<MatrixMap, Error> {
        if !self.is_bijective() {
            return Err(Error::NotBijective);
        }
        let inv = inverse(&self.op)?;
        let op = match self.kind {
            MapKind::Linear => inv,
            MapKind::Conjugate => inv.conj(),
        };
        Ok(MatrixMap {
            n: self.n,
            kind: self.kind,
            op,
        })
    }
}

/// Realize Φ(x) = a·J(x)·b as an operator; conjugation acts trivially on the
/// real matrix-unit basis, so columns are outer products of a's columns with
/// b's rows.
pub fn from_form(f: &MapForm) -> Result<MatrixMap, Error> {
    let n = f.a.n();
    if f.b.n() != n {
        return Err(Error::DimMismatch {
            left: n,
            right: f.b.n(),
        });
    }
    if numerical_rank(&f.a, None)? < n || numerical_rank(&f.b, None)? < n {
        return Err(Error::Usage("form factors must be invertible"));
    }
    let mut op = CMatrix::zero(n * n);
    for c0 in 0..n {
        for r0 in 0..n {
            let (ar, br) = match f.jordan {
                Jordan::Identity => (r0, c0),
                Jordan::Transpose => (c0, r0),
            };
            let col = c0 * n + r0;
            for c in 0..n {
                for r in 0..n {
                    op.set(c * n + r, col, f.a.get(r, ar) * f.b.get(br, c));
                }
            }
        }
    }
    let kind = if f.conjugated {
        MapKind::Conjugate
    } else {
        MapKind::Linear
    };
    Ok(MatrixMap { n, kind, op })
}

// ── Probes and verdicts ─────────────────────────────────────────────────────

/// Caller-supplied probe matrices appended to the deterministic family.
#[derive(Clone, Debug, Default)]
pub struct ProbeSet {
    pub extra: Vec<CMatrix>,
}

impl ProbeSet {
    pub fn empty() -> Self {
        ProbeSet { extra: Vec::new() }
    }
}

/// All matrix units followed by all pairwise sums e_ij + e_kl.
pub fn deterministic_probes(n: usize) -> Vec<CMatrix> {
    let m = n * n;
    let unit_at = |idx: usize| CMatrix::unit(n, idx / n, idx % n);
    let mut probes: Vec<CMatrix> = (0..m).map(unit_at).collect();
    for i in 0..m {
        for j in (i + 1)..m {
            probes.push(unit_at(i).add(&unit_at(j)));
        }
    }
    probes
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub x: CMatrix,
    pub y: Option<CMatrix>,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Rank of the computed image Φ(z), with the spectral cut lifted above the
/// evaluation noise floor. Entries of the computed image carry absolute
/// rounding error up to about n²·ε·‖op‖_F·‖z‖_F, so a singular value of the
/// image below a safe multiple of that bound is indistinguishable from an
/// exact zero and must not be counted: a rank-deficient probe applied through
/// a well-conditioned operator otherwise lands exactly on the default cut,
/// and the verdict would flip on last-bit changes in the input.
fn image_rank(f: &MatrixMap, z: &CMatrix, image: &CMatrix) -> Result<usize, Error> {
    let m = (f.n * f.n) as f64;
    let floor = 4.0 * (m + 4.0) * EPS * f.op.fro_norm() * z.fro_norm();
    let s = svd(image)?.s;
    let top = s.first().copied().unwrap_or(0.0);
    let cut = (default_rank_tol(f.n) * top).max(floor);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// rank(Φ(z)) = rank(z) over the deterministic family and extras; by
/// additivity this is equivalent to the two-point isometry condition. The
/// probe rank uses the default cut (probes are given exactly); the image
/// rank is cut above the evaluation noise floor.
pub fn is_rank_isometry(f: &MatrixMap, probes: &ProbeSet) -> Result<Verdict, Error> {
    if !f.is_bijective() {
        return Err(Error::NotBijective);
    }
    for z in deterministic_probes(f.n).iter().chain(probes.extra.iter()) {
        let before = numerical_rank(z, None)?;
        let image = f.apply(z)?;
        let after = image_rank(f, z, &image)?;
        if before != after {
            return Ok(Verdict::Fail(Witness {
                x: z.clone(),
                y: None,
            }));
        }
    }
    Ok(Verdict::Pass)
}

pub const DET_TOL: f64 = 1e-8;

/// det(Φ(x)) = det(x) over the probe family: singular probes must map to
/// singular images (rank decided above the evaluation noise floor, where the
/// determinant is exactly zero), invertible ones agree to 1e-8·max(1, det(x)).
/// Conjugate-linear maps are admitted only under the flag: det(x*) = det(x).
pub fn is_det_preserving(
    f: &MatrixMap,
    probes: &ProbeSet,
    allow_conjugate: bool,
) -> Result<Verdict, Error> {
    if f.kind == MapKind::Conjugate && !allow_conjugate {
        return Err(Error::Usage("determinant check expects a linear map"));
    }
    if !f.is_bijective() {
        return Err(Error::NotBijective);
    }
    for x in deterministic_probes(f.n).iter().chain(probes.extra.iter()) {
        let before = fk_det(x)?;
        let image = f.apply(x)?;
        let ok = if before == 0.0 {
            image_rank(f, x, &image)? < f.n
        } else {
            let after = fk_det(&image)?;
            (after - before).abs() <= DET_TOL * before.max(1.0)
        };
        if !ok {
            return Ok(Verdict::Fail(Witness {
                x: x.clone(),
                y: None,
            }));
        }
    }
    Ok(Verdict::Pass)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultClass {
    Iso,
    Anti,
    Neither,
}

#[derive(Clone, Debug)]
pub struct MultReport {
    pub class: MultClass,
    /// max over pairs of ‖Φ(xy) − Φ(x)Φ(y)‖_F / max(1, ‖Φ(xy)‖_F).
    pub iso_residual: f64,
    /// same with the reversed product Φ(y)Φ(x).
    pub anti_residual: f64,
    pub witness: Option<(CMatrix, CMatrix)>,
}

pub const MULT_TOL: f64 = 1e-8;

/// Classify Φ as a homomorphism or anti-homomorphism on matrix-unit pairs
/// plus consecutive pairs of extras. The two conditions can hold
/// simultaneously only on M₁, which is rejected.
pub fn is_multiplicative(f: &MatrixMap, probes: &ProbeSet) -> Result<MultReport, Error> {
    if f.n < 2 {
        return Err(Error::Usage("multiplicativity needs order at least 2"));
    }
    if !f.is_bijective() {
        return Err(Error::NotBijective);
    }
    let n = f.n;
    let mut unit_images = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            unit_images.push(f.apply(&CMatrix::unit(n, i, j))?);
        }
    }
    let mut iso_res = 0.0_f64;
    let mut anti_res = 0.0_f64;
    let mut witness: Option<(CMatrix, CMatrix)> = None;

    let mut record = |fxy: &CMatrix, fx: &CMatrix, fy: &CMatrix, x: &CMatrix, y: &CMatrix| {
        let scale = fxy.fro_norm().max(1.0);
        let iso = fxy.sub(&fx.mul(fy)).fro_norm() / scale;
        let anti = fxy.sub(&fy.mul(fx)).fro_norm() / scale;
        iso_res = iso_res.max(iso);
        anti_res = anti_res.max(anti);
        if iso > MULT_TOL && anti > MULT_TOL && witness.is_none() {
            witness = Some((x.clone(), y.clone()));
        }
    };

    let zero = CMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let fxy = if j == k {
                        &unit_images[i * n + l]
                    } else {
                        &zero
                    };
                    record(
                        fxy,
                        &unit_images[i * n + j],
                        &unit_images[k * n + l],
                        &CMatrix::unit(n, i, j),
                        &CMatrix::unit(n, k, l),
                    );
                }
            }
        }
    }
    for pair in probes.extra.windows(2) {
        let (x, y) = (&pair[0], &pair[1]);
        let fxy = f.apply(&x.mul(y))?;
        record(&fxy, &f.apply(x)?, &f.apply(y)?, x, y);
    }

    let class = if iso_res <= MULT_TOL {
        MultClass::Iso
    } else if anti_res <= MULT_TOL {
        MultClass::Anti
    } else {
        MultClass::Neither
    };
    Ok(MultReport {
        class,
        iso_residual: iso_res,
        anti_residual: anti_res,
        witness,
    })
}

/// Left and right supports of Φ(p).
pub fn support_image(f: &MatrixMap, p: &Projection) -> Result<(Projection, Projection), Error> {
    if !f.is_bijective() {
        return Err(Error::NotBijective);
    }
    crate::regring::supports(&f.apply(p.matrix())?)
}

// ── Tests ───────────────────────────────────────────────────────────────────
