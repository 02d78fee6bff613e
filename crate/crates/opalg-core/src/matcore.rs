//! Dense complex matrix kernel.
//!
//! Everything above this module works with `CMatrix`, the generic element of
//! the matrix algebra Mₙ carrying the normalized trace τ(x) = tr(x)/n. The
//! factorizations here are self-contained: one-sided Jacobi SVD, complex
//! Schur via Householder reduction and shifted QR, Givens-based eigenvalue
//! reordering, and Gauss–Jordan inversion.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::error::Error;

pub const EPS: f64 = f64::EPSILON;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

// ── CMatrix ─────────────────────────────────────────────────────────────────

/// Dense n×n complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    d: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.n, self.n)?;
        for r in 0..self.n {
            write!(f, "  ")?;
            for c in 0..self.n {
                let z = self.get(r, c);
                write!(f, "{:+.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be positive");
        CMatrix {
            n,
            d: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Construct from n² row-major entries, rejecting NaN/Inf.
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self, Error> {
        if n < 1 || entries.len() != n * n {
            return Err(Error::Usage("entry count must equal n²"));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix { n, d: entries })
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zero(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    pub fn from_diag_re(diag: &[f64]) -> Self {
        let mut m = Self::zero(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        m
    }

    /// Matrix unit e_rc.
    pub fn unit(n: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zero(n);
        m.set(r, c, ONE);
        m
    }

    /// 2n×2n block matrix [[a, b], [c, d]] from equal-order blocks.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Self {
        let n = a.n;
        assert!(b.n == n && c.n == n && d.n == n);
        Self::from_fn(2 * n, |r, col| match (r < n, col < n) {
            (true, true) => a.get(r, col),
            (true, false) => b.get(r, col - n),
            (false, true) => c.get(r - n, col),
            (false, false) => d.get(r - n, col - n),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.d[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.d[r * self.n + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.d
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(r, c).conj())
    }

    pub fn add(&self, o: &CMatrix) -> Self {
        assert_eq!(self.n, o.n);
        CMatrix {
            n: self.n,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &CMatrix) -> Self {
        assert_eq!(self.n, o.n);
        CMatrix {
            n: self.n,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        CMatrix {
            n: self.n,
            d: self.d.iter().map(|a| a * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    pub fn mul(&self, o: &CMatrix) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.d[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.d[r * n + c] += a * o.d[k * n + c];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Normalized trace τ(x) = tr(x)/n.
    pub fn ntrace(&self) -> Complex64 {
        self.trace() / self.n as f64
    }

    pub fn fro_norm(&self) -> f64 {
        libm::sqrt(self.d.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// (x + x*)/2.
    pub fn hermitize(&self) -> Self {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    /// Column-major vectorization: out[c·n + r] = x[r, c].
    pub fn vec_col_major(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut v = vec![ZERO; n * n];
        for c in 0..n {
            for r in 0..n {
                v[c * n + r] = self.get(r, c);
            }
        }
        v
    }

    pub fn from_vec_col_major(n: usize, v: &[Complex64]) -> Self {
        assert_eq!(v.len(), n * n);
        Self::from_fn(n, |r, c| v[c * n + r])
    }

    fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self.get(r, c)).collect())
            .collect()
    }

    fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |r, c| cols[c][r])
    }
}

// ── SVD ─────────────────────────────────────────────────────────────────────

/// x = u·diag(s)·v*, with s sorted descending and u, v unitary.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.u.n();
        let sv = CMatrix::from_fn(n, |r, c| self.v.get(c, r).conj() * self.s[r]);
        self.u.mul(&sv)
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// One-sided Jacobi SVD. High relative accuracy, converges fast on the
/// near-diagonal matrices the determinant machinery feeds it.
pub fn svd(x: &CMatrix) -> Result<SvdResult, Error> {
    let n = x.n();
    let mut a = x.columns();
    let mut v: Vec<Vec<Complex64>> = CMatrix::identity(n).columns();

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        // Columns this far below the dominant one are numerically null;
        // rotating them only shuffles rounding noise and can cycle forever.
        let defl_sq = {
            let max_sq = a
                .iter()
                .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .fold(0.0_f64, f64::max);
            let d = n as f64 * EPS;
            d * d * max_sq
        };
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let app: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let aqq: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                if app <= defl_sq || aqq <= defl_sq {
                    continue;
                }
                let apq: Complex64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = apq.norm();
                if g <= 1e-15 * libm::sqrt(app * aqq) + f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = apq / g;
                let zeta = (aqq - app) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let sp = phase.conj() * s;
                let sq = phase * s;
                for i in 0..n {
                    let xp = a[p][i];
                    let xq = a[q][i];
                    a[p][i] = xp * c - xq * sp;
                    a[q][i] = xp * sq + xq * c;
                }
                for i in 0..n {
                    let xp = v[p][i];
                    let xq = v[q][i];
                    v[p][i] = xp * c - xq * sp;
                    v[q][i] = xp * sq + xq * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged && n > 1 {
        return Err(Error::NoConvergence { iterations: sweeps });
    }

    let norms: Vec<f64> = a
        .iter()
        .map(|col| libm::sqrt(col.iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let s: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let vcols: Vec<Vec<Complex64>> = order.iter().map(|&i| v[i].clone()).collect();

    let cut = s[0] * 1e-14 + f64::MIN_POSITIVE;
    let mut ucols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &i in &order {
        if norms[i] > cut {
            ucols.push(a[i].iter().map(|z| z / norms[i]).collect());
        }
    }
    complete_orthonormal(&mut ucols, n);

    Ok(SvdResult {
        u: CMatrix::from_columns(&ucols),
        s,
        v: CMatrix::from_columns(&vcols),
    })
}

/// Extend a set of orthonormal columns to a full orthonormal basis of ℂⁿ,
/// greedily picking the standard basis vector with the largest residual.
fn complete_orthonormal(cols: &mut Vec<Vec<Complex64>>, n: usize) {
    while cols.len() < n {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for k in 0..n {
            let mut w = vec![ZERO; n];
            w[k] = ONE;
            for _ in 0..2 {
                for col in cols.iter() {
                    let ip: Complex64 = col.iter().zip(&w).map(|(u, x)| u.conj() * x).sum();
                    for (wi, ui) in w.iter_mut().zip(col) {
                        *wi -= ip * ui;
                    }
                }
            }
            let nm = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
            if best.as_ref().map_or(true, |(bn, _)| nm > *bn) {
                best = Some((nm, w));
            }
        }
        let (nm, w) = best.unwrap();
        cols.push(w.iter().map(|z| z / nm).collect());
    }
}

// ── Rank and pseudoinverse ──────────────────────────────────────────────────

pub fn default_rank_tol(n: usize) -> f64 {
    n as f64 * EPS
}

/// Rank decision on a descending singular value list: zero matrix below the
/// absolute floor, otherwise count of values above tol·s₁.
pub fn rank_from_singular_values(s: &[f64], tol: f64) -> usize {
    if s.is_empty() || s[0] <= tol {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * s[0]).count()
}

pub fn numerical_rank(x: &CMatrix, tol: Option<f64>) -> Result<usize, Error> {
    let t = tol.unwrap_or_else(|| default_rank_tol(x.n()));
    let f = svd(x)?;
    Ok(rank_from_singular_values(&f.s, t))
}

/// Partial inverse: x·i(x) = l(x), i(x)·x = r(x), x·i(x)·x = x,
/// i(x)·l(x) = i(x), r(x)·i(x) = i(x). The Moore–Penrose pseudoinverse.
pub fn pinv(x: &CMatrix, tol: Option<f64>) -> Result<CMatrix, Error> {
    let n = x.n();
    let t = tol.unwrap_or_else(|| default_rank_tol(n));
    let f = svd(x)?;
    let r = rank_from_singular_values(&f.s, t);
    let mut out = CMatrix::zero(n);
    for i in 0..r {
        let vi: Vec<Complex64> = (0..n).map(|k| f.v.get(k, i)).collect();
        let ui: Vec<Complex64> = (0..n).map(|k| f.u.get(k, i)).collect();
        let inv = 1.0 / f.s[i];
        for rr in 0..n {
            for cc in 0..n {
                let cur = out.get(rr, cc);
                out.set(rr, cc, cur + vi[rr] * ui[cc].conj() * inv);
            }
        }
    }
    Ok(out)
}

// ── Polar decomposition ─────────────────────────────────────────────────────

/// x = v·|x| with v the support partial isometry: v·v* = l(x), v*·v = r(x).
pub fn polar(x: &CMatrix) -> Result<(CMatrix, CMatrix), Error> {
    polar_impl(x, false)
}

/// Polar decomposition with v extended to a full unitary (always possible at
/// matrix scale since l(x) and r(x) have equal trace).
pub fn polar_unitary(x: &CMatrix) -> Result<(CMatrix, CMatrix), Error> {
    polar_impl(x, true)
}

fn polar_impl(x: &CMatrix, unitary: bool) -> Result<(CMatrix, CMatrix), Error> {
    let n = x.n();
    let f = svd(x)?;
    let r = if unitary {
        n
    } else {
        rank_from_singular_values(&f.s, default_rank_tol(n))
    };
    let mut v = CMatrix::zero(n);
    for i in 0..r {
        for rr in 0..n {
            for cc in 0..n {
                let cur = v.get(rr, cc);
                v.set(rr, cc, cur + f.u.get(rr, i) * f.v.get(cc, i).conj());
            }
        }
    }
    let absx = CMatrix::from_fn(n, |rr, cc| {
        (0..n)
            .map(|i| f.v.get(rr, i) * f.s[i] * f.v.get(cc, i).conj())
            .sum()
    });
    Ok((v, absx.hermitize()))
}

// ── QR ──────────────────────────────────────────────────────────────────────

/// Householder QR, x = q·r with q unitary and r upper triangular.
pub fn qr(x: &CMatrix) -> (CMatrix, CMatrix) {
    let n = x.n();
    let mut r = x.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n {
        let mut w: Vec<Complex64> = (k..n).map(|i| r.get(i, k)).collect();
        let beta = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if beta <= f64::MIN_POSITIVE {
            continue;
        }
        let phase = if w[0].norm() > 0.0 {
            w[0] / w[0].norm()
        } else {
            ONE
        };
        w[0] += phase * beta;
        let wn = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if wn <= f64::MIN_POSITIVE {
            continue;
        }
        for z in w.iter_mut() {
            *z /= wn;
        }
        // r ← (I − 2ww*)·r on rows k.., q ← q·(I − 2ww*) on columns k..
        for c in 0..n {
            let ip: Complex64 = (k..n).map(|i| w[i - k].conj() * r.get(i, c)).sum();
            for i in k..n {
                let cur = r.get(i, c);
                r.set(i, c, cur - 2.0 * ip * w[i - k]);
            }
        }
        for row in 0..n {
            let ip: Complex64 = (k..n).map(|i| q.get(row, i) * w[i - k]).sum();
            for i in k..n {
                let cur = q.get(row, i);
                q.set(row, i, cur - 2.0 * ip * w[i - k].conj());
            }
        }
        for i in (k + 1)..n {
            r.set(i, k, ZERO);
        }
    }
    (q, r)
}

// ── Inverse ─────────────────────────────────────────────────────────────────

/// Gauss–Jordan inverse with partial pivoting.
pub fn inverse(x: &CMatrix) -> Result<CMatrix, Error> {
    let n = x.n();
    let mut a = x.clone();
    let mut b = CMatrix::identity(n);
    let floor = x.max_abs() * (n as f64) * EPS + f64::MIN_POSITIVE;
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if a.get(i, k).norm() > a.get(piv, k).norm() {
                piv = i;
            }
        }
        if a.get(piv, k).norm() <= floor {
            return Err(Error::Singular);
        }
        if piv != k {
            for c in 0..n {
                let (x1, x2) = (a.get(k, c), a.get(piv, c));
                a.set(k, c, x2);
                a.set(piv, c, x1);
                let (y1, y2) = (b.get(k, c), b.get(piv, c));
                b.set(k, c, y2);
                b.set(piv, c, y1);
            }
        }
        let inv = ONE / a.get(k, k);
        for c in 0..n {
            a.set(k, c, a.get(k, c) * inv);
            b.set(k, c, b.get(k, c) * inv);
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a.get(i, k);
            if f == ZERO {
                continue;
            }
            for c in 0..n {
                let cur = a.get(i, c);
                a.set(i, c, cur - f * a.get(k, c));
                let cur = b.get(i, c);
                b.set(i, c, cur - f * b.get(k, c));
            }
        }
    }
    Ok(b)
}

// ── Complex Schur ───────────────────────────────────────────────────────────

/// x = q·t·q* with q unitary, t upper triangular; eigenvalues on the diagonal.
#[derive(Clone, Debug)]
pub struct SchurResult {
    pub q: CMatrix,
    pub t: CMatrix,
    pub eigenvalues: Vec<Complex64>,
}

impl SchurResult {
    pub fn reconstruct(&self) -> CMatrix {
        self.q.mul(&self.t).mul(&self.q.adjoint())
    }
}

struct Givens {
    u: Complex64,
    w: Complex64,
}

/// Rotation G = [[u, w], [−w̄, ū]] with G·(a, b)ᵀ = (r, 0)ᵀ.
fn givens(a: Complex64, b: Complex64) -> Givens {
    let nrm = libm::sqrt(a.norm_sqr() + b.norm_sqr());
    if nrm <= f64::MIN_POSITIVE {
        return Givens { u: ONE, w: ZERO };
    }
    Givens {
        u: a.conj() / nrm,
        w: b.conj() / nrm,
    }
}

fn rot_rows(m: &mut CMatrix, g: &Givens, r1: usize, r2: usize, cols: core::ops::Range<usize>) {
    for c in cols {
        let x = m.get(r1, c);
        let y = m.get(r2, c);
        m.set(r1, c, g.u * x + g.w * y);
        m.set(r2, c, -g.w.conj() * x + g.u.conj() * y);
    }
}

fn rot_cols_adj(m: &mut CMatrix, g: &Givens, c1: usize, c2: usize, rows: core::ops::Range<usize>) {
    // m ← m·G†
    for r in rows {
        let x = m.get(r, c1);
        let y = m.get(r, c2);
        m.set(r, c1, x * g.u.conj() + y * g.w.conj());
        m.set(r, c2, -x * g.w + y * g.u);
    }
}

fn hessenberg(h: &mut CMatrix, q: &mut CMatrix) {
    let n = h.n();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut w: Vec<Complex64> = (k + 1..n).map(|i| h.get(i, k)).collect();
        let beta = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if beta <= f64::MIN_POSITIVE {
            continue;
        }
        let phase = if w[0].norm() > 0.0 {
            w[0] / w[0].norm()
        } else {
            ONE
        };
        w[0] += phase * beta;
        let wn = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if wn <= f64::MIN_POSITIVE {
            continue;
        }
        for z in w.iter_mut() {
            *z /= wn;
        }
        // similarity by P = I − 2ww* on rows/cols k+1..
        for c in k..n {
            let ip: Complex64 = (0..m).map(|i| w[i].conj() * h.get(k + 1 + i, c)).sum();
            for i in 0..m {
                let cur = h.get(k + 1 + i, c);
                h.set(k + 1 + i, c, cur - 2.0 * ip * w[i]);
            }
        }
        for r in 0..n {
            let ip: Complex64 = (0..m).map(|i| h.get(r, k + 1 + i) * w[i]).sum();
            for i in 0..m {
                let cur = h.get(r, k + 1 + i);
                h.set(r, k + 1 + i, cur - 2.0 * ip * w[i].conj());
            }
        }
        for r in 0..n {
            let ip: Complex64 = (0..m).map(|i| q.get(r, k + 1 + i) * w[i]).sum();
            for i in 0..m {
                let cur = q.get(r, k + 1 + i);
                q.set(r, k + 1 + i, cur - 2.0 * ip * w[i].conj());
            }
        }
        for i in (k + 2)..n {
            h.set(i, k, ZERO);
        }
        h.set(k + 1, k, -phase * beta);
    }
}

fn wilkinson_shift(h: &CMatrix, m: usize) -> Complex64 {
    let a = h.get(m - 1, m - 1);
    let b = h.get(m - 1, m);
    let c = h.get(m, m - 1);
    let d = h.get(m, m);
    let tr2 = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let m1 = tr2 + root;
    let m2 = tr2 - root;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

pub fn schur(x: &CMatrix) -> Result<SchurResult, Error> {
    let n = x.n();
    let mut h = x.clone();
    let mut q = CMatrix::identity(n);
    if n == 1 {
        return Ok(SchurResult {
            eigenvalues: vec![h.get(0, 0)],
            q,
            t: h,
        });
    }
    hessenberg(&mut h, &mut q);

    let hnorm = h.fro_norm();
    let floor = EPS * hnorm + f64::MIN_POSITIVE;
    let cap = 100 * n;
    let mut iterations = 0;
    let mut hi = n - 1;
    let mut stagnation = 0;

    loop {
        // deflate negligible subdiagonals
        for k in 1..=hi {
            let sub = h.get(k, k - 1).norm();
            if sub <= EPS * (h.get(k - 1, k - 1).norm() + h.get(k, k).norm()) + floor * 1e-2 {
                h.set(k, k - 1, ZERO);
            }
        }
        while hi > 0 && h.get(hi, hi - 1) == ZERO {
            hi -= 1;
            stagnation = 0;
        }
        if hi == 0 {
            break;
        }
        let mut lo = hi;
        while lo > 0 && h.get(lo, lo - 1) != ZERO {
            lo -= 1;
        }

        if iterations >= cap {
            return Err(Error::NoConvergence { iterations });
        }
        iterations += 1;
        stagnation += 1;

        let mu = if stagnation % 16 == 0 {
            h.get(hi, hi) + Complex64::new(0.75 * h.get(hi, hi - 1).norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };

        for i in lo..=hi {
            let cur = h.get(i, i);
            h.set(i, i, cur - mu);
        }
        let mut rots: Vec<Givens> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = givens(h.get(k, k), h.get(k + 1, k));
            rot_rows(&mut h, &g, k, k + 1, k..n);
            h.set(k + 1, k, ZERO);
            rots.push(g);
        }
        for (idx, g) in rots.iter().enumerate() {
            let k = lo + idx;
            let top = core::cmp::min(k + 2, hi) + 1;
            rot_cols_adj(&mut h, g, k, k + 1, 0..top);
            rot_cols_adj(&mut q, g, k, k + 1, 0..n);
        }
        for i in lo..=hi {
            let cur = h.get(i, i);
            h.set(i, i, cur + mu);
        }
    }

    for r in 1..n {
        for c in 0..r {
            h.set(r, c, ZERO);
        }
    }
    let eigenvalues = (0..n).map(|i| h.get(i, i)).collect();
    Ok(SchurResult {
        q,
        t: h,
        eigenvalues,
    })
}

// ── Schur reordering ────────────────────────────────────────────────────────

/// Reorder a Schur form so that every eigenvalue satisfying `select` occupies
/// a leading position. Returns the reordered form and the leading block size.
/// Adjacent swaps are Givens rotations built from the 2×2 block eigenvector,
/// never dividing by the eigenvalue gap.
pub fn schur_reorder(
    sr: &SchurResult,
    select: impl Fn(Complex64) -> bool,
) -> Result<(SchurResult, usize), Error> {
    let n = sr.t.n();
    let mut t = sr.t.clone();
    let mut q = sr.q.clone();
    let mut sel: Vec<bool> = sr.eigenvalues.iter().map(|&z| select(z)).collect();
    let count = sel.iter().filter(|&&b| b).count();

    loop {
        let mut swapped = false;
        for i in 0..n.saturating_sub(1) {
            if !sel[i] && sel[i + 1] {
                swap_adjacent(&mut t, &mut q, i)?;
                sel.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }

    let eigenvalues: Vec<Complex64> = (0..n).map(|i| t.get(i, i)).collect();
    Ok((SchurResult { q, t, eigenvalues }, count))
}

fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, i: usize) -> Result<(), Error> {
    let n = t.n();
    let a = t.get(i, i);
    let c = t.get(i, i + 1);
    let b = t.get(i + 1, i + 1);
    let scale = 1f64.max(a.norm()).max(b.norm()).max(c.norm());
    let delta = b - a;
    if delta.norm() <= 1e-12 * scale {
        if c.norm() <= 1e-8 * scale {
            // numerically equal eigenvalues: direct exchange of labels
            t.set(i, i, b);
            t.set(i + 1, i + 1, a);
            return Ok(());
        }
        return Err(Error::IllConditionedSwap {
            index: i,
            first: a,
            second: b,
        });
    }
    // eigenvector of [[a, c], [0, b]] for eigenvalue b is (c, b−a)
    let g = givens(c, delta);
    rot_rows(t, &g, i, i + 1, i..n);
    rot_cols_adj(t, &g, i, i + 1, 0..(i + 2));
    rot_cols_adj(q, &g, i, i + 1, 0..n);
    t.set(i + 1, i, ZERO);
    t.set(i, i, b);
    t.set(i + 1, i + 1, a);
    Ok(())
}

// ── Tests ───────────────────────────────────────────────────────────────────
