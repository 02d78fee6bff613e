//! Fuglede–Kadison determinant, Brown measures, and spectral-region
//! projections.
//!
//! On Mₙ the determinant is det(x) = |det_n(x)|^{1/n} = exp(τ(log|x|)), the
//! Brown measure is the normalized eigenvalue counting measure, and the
//! spectral-region projection for a region B is the projection onto the sum
//! of generalized eigenspaces with eigenvalue in B, extracted from an
//! ordered Schur form.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::Error;
use crate::matcore::{
    default_rank_tol, rank_from_singular_values, schur, schur_reorder, svd, CMatrix,
};
use crate::regring::Projection;

// ── Determinant ─────────────────────────────────────────────────────────────

/// det(x) = exp of the normalized trace of log|x|; exactly 0 when x is
/// numerically singular, matching the rank decision.
pub fn fk_det(x: &CMatrix) -> Result<f64, Error> {
    let l = fk_logdet(x)?;
    Ok(if l == f64::NEG_INFINITY {
        0.0
    } else {
        libm::exp(l)
    })
}

/// log det(x), −∞ in the singular case.
pub fn fk_logdet(x: &CMatrix) -> Result<f64, Error> {
    let n = x.n();
    let f = svd(x)?;
    if rank_from_singular_values(&f.s, default_rank_tol(n)) < n {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(f.s.iter().map(|&s| libm::log(s)).sum::<f64>() / n as f64)
}

/// Regularized determinant exp(τ(log(|x| + ε))), monotone in ε and
/// converging to det(x) for invertible x.
pub fn fk_det_eps(x: &CMatrix, eps: f64) -> Result<f64, Error> {
    if !(eps > 0.0) {
        return Err(Error::Usage("fk_det_eps requires eps > 0"));
    }
    let f = svd(x)?;
    let mean = f.s.iter().map(|&s| libm::log(s + eps)).sum::<f64>() / x.n() as f64;
    Ok(libm::exp(mean))
}

/// ‖x‖_log = τ(log(1 + |x|)).
pub fn log_norm(x: &CMatrix) -> Result<f64, Error> {
    let f = svd(x)?;
    Ok(f.s.iter().map(|&s| libm::log1p(s)).sum::<f64>() / x.n() as f64)
}

/// log det(x − λ1), the logarithmic potential of the Brown measure.
pub fn ldet_at(x: &CMatrix, lambda: Complex64) -> Result<f64, Error> {
    let shifted = x.sub(&CMatrix::identity(x.n()).scale(lambda));
    fk_logdet(&shifted)
}

// ── Brown measure ───────────────────────────────────────────────────────────

#[derive(Clone, Debug, PartialEq)]
pub struct BrownAtom {
    pub loc: Complex64,
    pub num: u64,
}

/// Finite atomic probability measure on ℂ with weights num/den summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownMeasure {
    atoms: Vec<BrownAtom>,
    den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn round_loc(z: Complex64) -> Complex64 {
    let snap = |v: f64| {
        let s = v * 1e10;
        if s.is_finite() {
            libm::round(s) * 1e-10
        } else {
            v
        }
    };
    let r = Complex64::new(snap(z.re), snap(z.im));
    // normalize -0.0 so bit-exact grouping works
    Complex64::new(r.re + 0.0, r.im + 0.0)
}

impl BrownMeasure {
    /// Atoms at the given points, weight 1/n each, aggregated only under
    /// exact equality after rounding locations to the 1e-10 grid.
    pub fn from_points(points: &[Complex64]) -> Self {
        let mut locs: Vec<Complex64> = points.iter().map(|&z| round_loc(z)).collect();
        locs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let mut atoms: Vec<BrownAtom> = Vec::new();
        for z in locs {
            match atoms.last_mut() {
                Some(last) if last.loc == z => last.num += 1,
                _ => atoms.push(BrownAtom { loc: z, num: 1 }),
            }
        }
        BrownMeasure {
            atoms,
            den: points.len() as u64,
        }
    }

    pub fn from_atoms(atoms: Vec<BrownAtom>, den: u64) -> Result<Self, Error> {
        if den == 0 || atoms.iter().map(|a| a.num).sum::<u64>() != den {
            return Err(Error::Usage("atom weights must sum to 1"));
        }
        if atoms.iter().any(|a| a.num == 0) {
            return Err(Error::Usage("atom weights must be positive"));
        }
        Ok(BrownMeasure { atoms, den })
    }

    pub fn atoms(&self) -> &[BrownAtom] {
        &self.atoms
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// μ(B) as an exact rational (num, den).
    pub fn weight_in(&self, region: &RegionPredicate) -> (u64, u64) {
        let num = self
            .atoms
            .iter()
            .filter(|a| region.contains(a.loc))
            .map(|a| a.num)
            .sum();
        (num, self.den)
    }

    /// ∫ log|t − λ| dμ(t); −∞ when λ is an atom.
    pub fn log_potential(&self, lambda: Complex64) -> f64 {
        let mut acc = 0.0;
        for a in &self.atoms {
            let d = (a.loc - lambda).norm();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += a.num as f64 * libm::log(d);
        }
        acc / self.den as f64
    }

    fn unit_locations(&self, scale: u64) -> Vec<Complex64> {
        let mut out = Vec::new();
        let per = scale / self.den;
        for a in &self.atoms {
            for _ in 0..(a.num * per) {
                out.push(a.loc);
            }
        }
        out
    }

    /// Optimal matching comparison: expand both measures into unit atoms over
    /// the common denominator and look for a perfect matching in which paired
    /// atoms are within `tol` of each other. Weights therefore match exactly.
    pub fn matches(&self, other: &BrownMeasure, tol: f64) -> bool {
        let scale = lcm(self.den, other.den);
        let left = self.unit_locations(scale);
        let right = other.unit_locations(scale);
        if left.len() != right.len() {
            return false;
        }
        perfect_matching_exists(&left, &right, tol)
    }

    /// Convex combination w₁·μ₁ + w₂·μ₂ with exact rational weights.
    pub fn mix(
        w1: (u64, u64),
        m1: &BrownMeasure,
        w2: (u64, u64),
        m2: &BrownMeasure,
    ) -> Result<BrownMeasure, Error> {
        if w1.1 == 0 || w2.1 == 0 || w1.0 * w2.1 + w2.0 * w1.1 != w1.1 * w2.1 {
            return Err(Error::Usage("mix weights must be rationals summing to 1"));
        }
        let d1 = w1.1 * m1.den;
        let d2 = w2.1 * m2.den;
        let den = lcm(d1, d2);
        let mut atoms: Vec<BrownAtom> = Vec::new();
        let mut push = |loc: Complex64, num: u64| {
            if num == 0 {
                return;
            }
            if let Some(a) = atoms.iter_mut().find(|a| a.loc == loc) {
                a.num += num;
            } else {
                atoms.push(BrownAtom { loc, num });
            }
        };
        for a in &m1.atoms {
            push(round_loc(a.loc), a.num * w1.0 * (den / d1));
        }
        for a in &m2.atoms {
            push(round_loc(a.loc), a.num * w2.0 * (den / d2));
        }
        atoms.sort_by(|a, b| {
            (a.loc.re, a.loc.im)
                .partial_cmp(&(b.loc.re, b.loc.im))
                .unwrap()
        });
        let g = atoms.iter().fold(den, |acc, a| gcd(acc, a.num));
        for a in atoms.iter_mut() {
            a.num /= g;
        }
        BrownMeasure::from_atoms(atoms, den / g)
    }
}

/// Kuhn's augmenting-path bipartite matching on the "within tol" graph.
fn perfect_matching_exists(left: &[Complex64], right: &[Complex64], tol: f64) -> bool {
    let n = left.len();
    let mut matched: Vec<Option<usize>> = vec![None; n];

    fn try_augment(
        i: usize,
        left: &[Complex64],
        right: &[Complex64],
        tol: f64,
        visited: &mut [bool],
        matched: &mut [Option<usize>],
    ) -> bool {
        for j in 0..right.len() {
            if visited[j] || (left[i] - right[j]).norm() > tol {
                continue;
            }
            visited[j] = true;
            if matched[j].is_none()
                || try_augment(matched[j].unwrap(), left, right, tol, visited, matched)
            {
                matched[j] = Some(i);
                return true;
            }
        }
        false
    }

    for i in 0..n {
        let mut visited = vec![false; n];
        if !try_augment(i, left, right, tol, &mut visited, &mut matched) {
            return false;
        }
    }
    true
}

/// Brown measure of x: atoms at the Schur eigenvalues, weight 1/n each.
pub fn brown_measure(x: &CMatrix) -> Result<BrownMeasure, Error> {
    let f = schur(x)?;
    Ok(BrownMeasure::from_points(&f.eigenvalues))
}

/// True iff the spectral radius is ≤ tol (Brown measure concentrated at 0).
pub fn quasinilpotent_check(x: &CMatrix, tol: f64) -> Result<bool, Error> {
    let f = schur(x)?;
    Ok(f.eigenvalues.iter().all(|z| z.norm() <= tol))
}

// ── Regions ─────────────────────────────────────────────────────────────────

/// Closed algebra of testable regions of ℂ.
#[derive(Clone, Debug)]
pub enum RegionPredicate {
    Disk {
        center: Complex64,
        radius: f64,
    },
    /// {z : Re(conj(normal)·z) ≥ offset}.
    Halfplane {
        normal: Complex64,
        offset: f64,
    },
    Complement(alloc::boxed::Box<RegionPredicate>),
    Union(Vec<RegionPredicate>),
    Intersection(Vec<RegionPredicate>),
    Singleton {
        point: Complex64,
        tol: f64,
    },
}

impl RegionPredicate {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            RegionPredicate::Disk { center, radius } => (z - center).norm() <= *radius,
            RegionPredicate::Halfplane { normal, offset } => (normal.conj() * z).re >= *offset,
            RegionPredicate::Complement(r) => !r.contains(z),
            RegionPredicate::Union(rs) => rs.iter().any(|r| r.contains(z)),
            RegionPredicate::Intersection(rs) => rs.iter().all(|r| r.contains(z)),
            RegionPredicate::Singleton { point, tol } => (z - point).norm() <= *tol,
        }
    }

    /// Distance to the region boundary, for ambiguity diagnostics. For unions
    /// and intersections this is the minimum over member boundaries, a
    /// conservative underestimate.
    pub fn boundary_dist(&self, z: Complex64) -> f64 {
        match self {
            RegionPredicate::Disk { center, radius } => ((z - center).norm() - radius).abs(),
            RegionPredicate::Halfplane { normal, offset } => {
                let n = normal.norm().max(f64::MIN_POSITIVE);
                ((normal.conj() * z).re - offset).abs() / n
            }
            RegionPredicate::Complement(r) => r.boundary_dist(z),
            RegionPredicate::Union(rs) | RegionPredicate::Intersection(rs) => rs
                .iter()
                .map(|r| r.boundary_dist(z))
                .fold(f64::INFINITY, f64::min),
            RegionPredicate::Singleton { point, tol } => ((z - point).norm() - tol).abs(),
        }
    }
}

// ── Spectral-region projections ─────────────────────────────────────────────

pub const BOUNDARY_TOL: f64 = 1e-8;

/// The unique x-invariant projection splitting the Brown measure across B.
#[derive(Clone, Debug)]
pub struct HSProjectionResult {
    pub p: Projection,
    /// τ(p) = (trace_num, order).
    pub trace_num: u64,
    /// μ_x(B), equal to τ(p).
    pub mu_b: (u64, u64),
    /// ‖x·p − p·x·p‖_F.
    pub invariance_residual: f64,
    /// Spectrum of the compression to range(p).
    pub inside_spectrum: Vec<Complex64>,
    /// Spectrum of the complementary compression.
    pub outside_spectrum: Vec<Complex64>,
}

pub fn hs_projection(x: &CMatrix, region: &RegionPredicate) -> Result<HSProjectionResult, Error> {
    let n = x.n();
    let f = schur(x)?;
    let offenders: Vec<Complex64> = f
        .eigenvalues
        .iter()
        .copied()
        .filter(|&z| region.boundary_dist(z) < BOUNDARY_TOL)
        .collect();
    if !offenders.is_empty() {
        return Err(Error::BoundaryAmbiguous {
            eigenvalues: offenders,
        });
    }
    let (g, k) = schur_reorder(&f, |z| region.contains(z))?;
    let p = Projection::from_orthonormal_columns(&g.q, k);
    let xp = x.mul(p.matrix());
    let invariance_residual = xp.sub(&p.matrix().mul(&xp)).fro_norm();
    let mu_num = f
        .eigenvalues
        .iter()
        .filter(|&&z| region.contains(z))
        .count() as u64;
    Ok(HSProjectionResult {
        p,
        trace_num: k as u64,
        mu_b: (mu_num, n as u64),
        invariance_residual,
        inside_spectrum: g.eigenvalues[..k].to_vec(),
        outside_spectrum: g.eigenvalues[k..].to_vec(),
    })
}

/// Compress x to the ranges of p and 1 − p and return both corner Brown
/// measures. For x-invariant p the original measure is the convex
/// combination τ(p)·μ_corner + τ(1−p)·μ_complement.
pub fn brown_decompose(x: &CMatrix, p: &Projection) -> Result<(BrownMeasure, BrownMeasure), Error> {
    let n = x.n();
    if p.order() != n {
        return Err(Error::DimMismatch {
            left: n,
            right: p.order(),
        });
    }
    let k = p.rank();
    if k == 0 || k == n {
        return Err(Error::Usage("projection must be nontrivial"));
    }
    let xp = x.mul(p.matrix());
    let residual = xp.sub(&p.matrix().mul(&xp)).fro_norm();
    if residual > 1e-8 * x.fro_norm() {
        return Err(Error::NotInvariant { residual });
    }
    // orthonormal basis adapted to range(p) ⊕ range(1−p)
    let f = svd(p.matrix())?;
    let compressed = f.u.adjoint().mul(x).mul(&f.u);
    let corner = submatrix(&compressed, 0, k);
    let complement = submatrix(&compressed, k, n - k);
    Ok((brown_measure(&corner)?, brown_measure(&complement)?))
}

fn submatrix(x: &CMatrix, start: usize, size: usize) -> CMatrix {
    CMatrix::from_fn(size, |r, c| x.get(start + r, start + c))
}

// ── Grid measure ────────────────────────────────────────────────────────────

/// Square lattice [lo, hi]² split into cells×cells cells.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

impl GridSpec {
    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        let h = self.step();
        Complex64::new(
            self.lo + (i as f64 + 0.5) * h,
            self.lo + (j as f64 + 0.5) * h,
        )
    }
}

/// Discrete measure on grid cells from the distributional Laplacian of the
/// logarithmic potential. Cells are clipped at 0; the clipped (negative)
/// discretization noise is recorded, and `net_mass` is the raw discrete
/// integral before clipping.
#[derive(Clone, Debug)]
pub struct GridMeasure {
    pub spec: GridSpec,
    /// Row-major over (re index, im index), clipped at 0.
    pub cells: Vec<f64>,
    pub clipped_mass: f64,
    pub net_mass: f64,
}

impl GridMeasure {
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.spec.cells + j]
    }

    /// Total clipped mass within `radius` of a point.
    pub fn mass_near(&self, point: Complex64, radius: f64) -> f64 {
        let m = self.spec.cells;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                if (self.spec.center(i, j) - point).norm() <= radius {
                    acc += self.cell(i, j);
                }
            }
        }
        acc
    }
}

/// Five-point discrete Laplacian of λ ↦ log det(x − λ1) on cell centers,
/// scaled by 1/2π. Requires the spectrum to be covered with a margin of two
/// grid steps.
pub fn brown_from_grid(x: &CMatrix, spec: GridSpec) -> Result<GridMeasure, Error> {
    if !(spec.hi > spec.lo) || spec.cells < 1 || !spec.step().is_finite() {
        return Err(Error::Usage(
            "grid must have positive extent and cell count",
        ));
    }
    let h = spec.step();
    let f = schur(x)?;
    for &z in &f.eigenvalues {
        let inside = z.re >= spec.lo + 2.0 * h
            && z.re <= spec.hi - 2.0 * h
            && z.im >= spec.lo + 2.0 * h
            && z.im <= spec.hi - 2.0 * h;
        if !inside {
            return Err(Error::GridCoverage { eigenvalue: z });
        }
    }

    let m = spec.cells;
    let potential = |lambda: Complex64| -> Result<f64, Error> {
        let v = ldet_at(x, lambda)?;
        if v.is_finite() {
            return Ok(v);
        }
        // center coincides with an eigenvalue: nudge deterministically
        ldet_at(x, lambda + Complex64::new(h * 1e-6, h * 1e-6))
    };
    // values on the (m+2)² lattice including one ghost ring
    let mut phi = vec![0.0; (m + 2) * (m + 2)];
    for gi in 0..(m + 2) {
        for gj in 0..(m + 2) {
            let lambda = Complex64::new(
                spec.lo + (gi as f64 - 0.5) * h,
                spec.lo + (gj as f64 - 0.5) * h,
            );
            phi[gi * (m + 2) + gj] = potential(lambda)?;
        }
    }
    let at = |gi: usize, gj: usize| phi[gi * (m + 2) + gj];

    let mut cells = vec![0.0; m * m];
    let mut clipped = 0.0;
    let mut net = 0.0;
    for i in 0..m {
        for j in 0..m {
            let (gi, gj) = (i + 1, j + 1);
            let lap = at(gi + 1, gj) + at(gi - 1, gj) + at(gi, gj + 1) + at(gi, gj - 1)
                - 4.0 * at(gi, gj);
            let mass = lap / (2.0 * core::f64::consts::PI);
            net += mass;
            if mass < 0.0 {
                clipped += -mass;
            } else {
                cells[i * m + j] = mass;
            }
        }
    }
    Ok(GridMeasure {
        spec,
        cells,
        clipped_mass: clipped,
        net_mass: net,
    })
}

// ── Tests ───────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::qr;
    use crate::matcore::testkit::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_of_diag_and_unitary() {
        assert_close(
            fk_det(&CMatrix::from_diag_re(&[1.0, 4.0])).unwrap(),
            2.0,
            1e-12,
        );
        let mut rng = TestRng(113);
        for n in [2, 5] {
            let (u, _) = qr(&rng.matrix(n));
            assert_close(fk_det(&u).unwrap(), 1.0, 1e-12);
        }
    }

    #[test]
    fn det_ignores_phases() {
        // diag(i, 2i) and the rotation by i of a real upper triangle share
        // singular values with their absolute values
        let x = cm2([[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 2.0]]);
        assert_close(fk_det(&x).unwrap(), libm::sqrt(2.0), 1e-12);
        let y = cm2([[0.0, 1.0, 0.0, 3.0], [0.0, 0.0, 0.0, 2.0]]);
        let y_abs = cm2_re([[1.0, 3.0], [0.0, 2.0]]);
        assert_close(fk_det(&y).unwrap(), fk_det(&y_abs).unwrap(), 1e-12);
    }

    #[test]
    fn det_of_singular_is_exact_zero() {
        let x = cm2_re([[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(fk_det(&x).unwrap(), 0.0);
        assert_eq!(fk_logdet(&x).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn det_eps_examples() {
        assert_close(fk_det_eps(&CMatrix::zero(2), 0.5).unwrap(), 0.5, 1e-14);
        let x = CMatrix::from_diag_re(&[1.0, 4.0]);
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let v = fk_det_eps(&x, eps).unwrap();
            let oracle = libm::sqrt((1.0 + eps) * (4.0 + eps));
            assert_close(v, oracle, 1e-10);
            assert!(v < prev);
            prev = v;
        }
        assert!((prev - 2.0).abs() <= 1e-3);
        let nil = cm2_re([[0.0, 1.0], [0.0, 0.0]]);
        let v = fk_det_eps(&nil, 1e-6).unwrap();
        assert_close(v, libm::sqrt(1e-6 * (1.0 + 1e-6)), 1e-12);
        assert!(fk_det_eps(&nil, 0.0).is_err());
    }

    #[test]
    fn log_norm_examples() {
        assert_close(log_norm(&CMatrix::zero(3)).unwrap(), 0.0, 0.0);
        let e = core::f64::consts::E;
        let x = CMatrix::from_diag_re(&[e - 1.0, e - 1.0]);
        assert_close(log_norm(&x).unwrap(), 1.0, 1e-14);
    }

    #[test]
    fn log_norm_subadditive() {
        let mut rng = TestRng(127);
        for _ in 0..10 {
            let x = rng.matrix(4);
            let y = rng.matrix(4);
            let lhs = log_norm(&x.add(&y)).unwrap();
            let rhs = log_norm(&x).unwrap() + log_norm(&y).unwrap();
            assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn brown_of_nilpotent_is_delta_zero() {
        let u = cm2_re([[0.0, 1.0], [0.0, 0.0]]);
        let mu = brown_measure(&u).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_eq!(mu.atoms()[0].loc, c(0.0, 0.0));
        assert_eq!((mu.atoms()[0].num, mu.den()), (2, 2));
    }

    #[test]
    fn brown_of_abs_nilpotent_two_atoms() {
        // |u| = diag(0, 1): τ(u*u)δ₁ + (1 − τ(u*u))δ₀
        let u = cm2_re([[0.0, 1.0], [0.0, 0.0]]);
        let (_, absu) = crate::matcore::polar(&u).unwrap();
        let mu = brown_measure(&absu).unwrap();
        let expect = BrownMeasure::from_points(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(mu.matches(&expect, 1e-10));
    }

    #[test]
    fn brown_of_normal_matches_spectral_measure() {
        let x = CMatrix::from_diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let mu = brown_measure(&x).unwrap();
        let expect = BrownMeasure::from_points(&[c(0.0, 1.0), c(0.0, -1.0)]);
        assert!(mu.matches(&expect, 1e-12));
    }

    #[test]
    fn brown_aggregates_equal_eigenvalues_only() {
        let x = CMatrix::from_diag_re(&[2.0, 2.0, 1.0]);
        let mu = brown_measure(&x).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        assert_eq!(mu.atoms()[0].num + mu.atoms()[1].num, 3);
    }

    #[test]
    fn measure_matching_weights_exact() {
        let a = BrownMeasure::from_points(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let b = BrownMeasure::from_points(&[c(1e-8, 0.0), c(1.0, 1e-8)]);
        assert!(a.matches(&b, 1e-6));
        assert!(!a.matches(&b, 1e-10));
        let lopsided = BrownMeasure::from_points(&[c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(!a.matches(&lopsided, 1e-6));
        // different denominators, same measure
        let fine = BrownMeasure::from_points(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(a.matches(&fine, 1e-10));
    }

    #[test]
    fn measure_mix_recombines() {
        let m1 = BrownMeasure::from_points(&[c(2.0, 0.0)]);
        let m2 = BrownMeasure::from_points(&[c(0.0, 0.0)]);
        let mixed = BrownMeasure::mix((1, 2), &m1, (1, 2), &m2).unwrap();
        let expect = BrownMeasure::from_points(&[c(2.0, 0.0), c(0.0, 0.0)]);
        assert!(mixed.matches(&expect, 0.0));
        assert!(BrownMeasure::mix((1, 2), &m1, (1, 3), &m2).is_err());
    }

    #[test]
    fn ldet_examples() {
        let x = CMatrix::from_diag_re(&[0.0, 1.0]);
        assert_close(
            ldet_at(&x, c(2.0, 0.0)).unwrap(),
            libm::log(2.0) / 2.0,
            1e-12,
        );
        assert_eq!(ldet_at(&x, c(1.0, 0.0)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn ldet_equals_log_potential_off_spectrum() {
        let mut rng = TestRng(131);
        for _ in 0..10 {
            let x = rng.matrix(5);
            let mu = brown_measure(&x).unwrap();
            let lambda = c(rng.normal() * 2.0, rng.normal() * 2.0);
            if mu.atoms().iter().any(|a| (a.loc - lambda).norm() < 1e-3) {
                continue;
            }
            let lhs = ldet_at(&x, lambda).unwrap();
            let rhs = mu.log_potential(lambda);
            assert_close(lhs, rhs, 1e-8);
        }
    }

    #[test]
    fn quasinilpotent_examples() {
        let mut strict = CMatrix::zero(3);
        strict.set(0, 1, c(5.0, 0.0));
        strict.set(1, 2, c(-2.0, 1.0));
        assert!(quasinilpotent_check(&strict, 1e-8).unwrap());
        assert!(!quasinilpotent_check(&CMatrix::identity(3), 1e-8).unwrap());
    }

    #[test]
    fn region_membership_and_boundary() {
        let disk = RegionPredicate::Disk {
            center: c(1.0, 0.0),
            radius: 0.5,
        };
        assert!(disk.contains(c(1.2, 0.0)));
        assert!(!disk.contains(c(2.0, 0.0)));
        assert_close(disk.boundary_dist(c(2.0, 0.0)), 0.5, 1e-14);
        let half = RegionPredicate::Halfplane {
            normal: c(1.0, 0.0),
            offset: 0.0,
        };
        assert!(half.contains(c(0.3, -5.0)));
        assert!(!half.contains(c(-0.3, 5.0)));
        let comp = RegionPredicate::Complement(alloc::boxed::Box::new(disk.clone()));
        assert!(comp.contains(c(2.0, 0.0)));
        let uni = RegionPredicate::Union(vec![disk.clone(), half.clone()]);
        assert!(uni.contains(c(0.3, -5.0)));
        let inter = RegionPredicate::Intersection(vec![disk, half]);
        assert!(inter.contains(c(1.2, 0.0)));
        assert!(!inter.contains(c(0.3, -5.0)));
        let single = RegionPredicate::Singleton {
            point: c(0.0, 0.0),
            tol: 1e-9,
        };
        assert!(single.contains(c(0.0, 0.0)));
        assert!(!single.contains(c(1e-3, 0.0)));
    }

    #[test]
    fn hs_projection_first_eigenvector() {
        let x = cm2_re([[1.0, 5.0], [0.0, 3.0]]);
        let b = RegionPredicate::Disk {
            center: c(1.0, 0.0),
            radius: 0.5,
        };
        let r = hs_projection(&x, &b).unwrap();
        assert_eq!(r.trace_num, 1);
        assert_eq!(r.mu_b, (1, 2));
        assert_mat_close(r.p.matrix(), &cm2_re([[1.0, 0.0], [0.0, 0.0]]), 1e-10);
        assert!(r.invariance_residual <= 1e-10);
        assert_eq!(r.inside_spectrum.len(), 1);
        assert_close(r.inside_spectrum[0].re, 1.0, 1e-10);
        assert_close(r.outside_spectrum[0].re, 3.0, 1e-10);
    }

    #[test]
    fn hs_projection_generalized_eigenvector() {
        let x = cm2_re([[1.0, 5.0], [0.0, 3.0]]);
        let b = RegionPredicate::Disk {
            center: c(3.0, 0.0),
            radius: 0.5,
        };
        let r = hs_projection(&x, &b).unwrap();
        // range is span (5, 2)ᵀ: x·(5,2)ᵀ = 3·(5,2)ᵀ
        let expect = cm2_re([[25.0 / 29.0, 10.0 / 29.0], [10.0 / 29.0, 4.0 / 29.0]]);
        assert_mat_close(r.p.matrix(), &expect, 1e-10);
        assert!(r.invariance_residual <= 1e-8 * x.fro_norm());
        assert_close(r.inside_spectrum[0].re, 3.0, 1e-10);
    }

    #[test]
    fn hs_projection_trivial_regions() {
        let mut rng = TestRng(137);
        let x = rng.matrix(4);
        let all = RegionPredicate::Disk {
            center: c(0.0, 0.0),
            radius: 1e6,
        };
        let r = hs_projection(&x, &all).unwrap();
        assert_eq!(r.trace_num, 4);
        assert!(r.p.close_to(&Projection::identity(4)));
        let none = RegionPredicate::Disk {
            center: c(100.0, 0.0),
            radius: 0.5,
        };
        let r = hs_projection(&x, &none).unwrap();
        assert_eq!(r.trace_num, 0);
    }

    #[test]
    fn hs_projection_boundary_ambiguity() {
        let x = CMatrix::from_diag_re(&[1.0, 3.0]);
        let b = RegionPredicate::Disk {
            center: c(0.0, 0.0),
            radius: 1.0,
        };
        assert!(matches!(
            hs_projection(&x, &b),
            Err(Error::BoundaryAmbiguous { .. })
        ));
    }

    #[test]
    fn hs_complement_traces_sum_to_one() {
        let mut rng = TestRng(139);
        let x = rng.matrix(5);
        let b = RegionPredicate::Halfplane {
            normal: c(1.0, 0.0),
            offset: 0.1,
        };
        let inside = hs_projection(&x, &b).unwrap();
        let outside =
            hs_projection(&x, &RegionPredicate::Complement(alloc::boxed::Box::new(b))).unwrap();
        assert_eq!(inside.trace_num + outside.trace_num, 5);
    }

    #[test]
    fn brown_decompose_upper_triangular_example() {
        let x = cm2_re([[2.0, 7.0], [0.0, 0.0]]);
        let p = Projection::new(cm2_re([[1.0, 0.0], [0.0, 0.0]])).unwrap();
        let (corner, complement) = brown_decompose(&x, &p).unwrap();
        assert!(corner.matches(&BrownMeasure::from_points(&[c(2.0, 0.0)]), 1e-10));
        assert!(complement.matches(&BrownMeasure::from_points(&[c(0.0, 0.0)]), 1e-10));
        let recombined = BrownMeasure::mix((1, 2), &corner, (1, 2), &complement).unwrap();
        assert!(recombined.matches(&brown_measure(&x).unwrap(), 1e-10));
    }

    #[test]
    fn brown_decompose_block_diagonal() {
        let x = CMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 3.0)]);
        let p = Projection::new(CMatrix::from_diag_re(&[1.0, 1.0, 0.0])).unwrap();
        let (corner, complement) = brown_decompose(&x, &p).unwrap();
        assert!(corner.matches(
            &BrownMeasure::from_points(&[c(1.0, 0.0), c(2.0, 0.0)]),
            1e-10
        ));
        assert!(complement.matches(&BrownMeasure::from_points(&[c(0.0, 3.0)]), 1e-10));
    }

    #[test]
    fn brown_decompose_rejects_non_invariant() {
        let x = cm2_re([[0.0, 1.0], [1.0, 0.0]]);
        let p = Projection::new(cm2_re([[1.0, 0.0], [0.0, 0.0]])).unwrap();
        assert!(matches!(
            brown_decompose(&x, &p),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn grid_two_real_atoms() {
        let x = CMatrix::from_diag_re(&[1.0, -1.0]);
        let spec = GridSpec {
            lo: -2.0,
            hi: 2.0,
            cells: 64,
        };
        let g = brown_from_grid(&x, spec).unwrap();
        let h = spec.step();
        assert!((g.net_mass - 1.0).abs() <= 0.05, "net {}", g.net_mass);
        let near_pos = g.mass_near(c(1.0, 0.0), 2.0 * h);
        let near_neg = g.mass_near(c(-1.0, 0.0), 2.0 * h);
        assert!((near_pos - 0.5).abs() <= 0.05, "mass near +1: {near_pos}");
        assert!((near_neg - 0.5).abs() <= 0.05, "mass near -1: {near_neg}");
    }

    #[test]
    fn grid_zero_matrix_concentrates_at_origin() {
        let x = CMatrix::zero(2);
        let spec = GridSpec {
            lo: -2.0,
            hi: 2.0,
            cells: 64,
        };
        let g = brown_from_grid(&x, spec).unwrap();
        let h = spec.step();
        let near = g.mass_near(c(0.0, 0.0), 2.0 * h);
        assert!((near - 1.0).abs() <= 0.05, "mass near origin: {near}");
        assert!((g.net_mass - 1.0).abs() <= 0.05);
    }

    #[test]
    fn grid_rejects_uncovered_spectrum() {
        let x = CMatrix::from_diag_re(&[5.0, 0.0]);
        let spec = GridSpec {
            lo: -2.0,
            hi: 2.0,
            cells: 32,
        };
        assert!(matches!(
            brown_from_grid(&x, spec),
            Err(Error::GridCoverage { .. })
        ));
    }
}
