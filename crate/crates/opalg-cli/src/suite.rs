//! Property-suite runner.
//!
//! Each suite is a static list of properties; a property is a single trial
//! body run `trials` times per matrix order. All randomness comes from
//! streams derived from the master seed, the suite and property names, the
//! order, and the trial counter, so any witness can be rebuilt from the
//! report alone. Reports are bit-identical for equal configs; the wall clock
//! is excluded from the digest.

use crate::gen;
use num_complex::Complex64;
use opalg_core::decomp::{decompose, Classification, Mode, RESIDUAL_TOL};
use opalg_core::fkdet::{
    brown_decompose, brown_measure, fk_det, fk_det_eps, hs_projection, ldet_at,
    quasinilpotent_check, BrownMeasure, RegionPredicate,
};
use opalg_core::maps::{
    is_multiplicative, support_image, Jordan, MapKind, MatrixMap, MultClass, ProbeSet, MULT_TOL,
};
use opalg_core::matcore::{inverse, numerical_rank, polar_unitary, schur, svd};
use opalg_core::regring::{
    idempotent_split, l0_norm, peirce_decompose, proj_meet_join, projection_conjugator, rank_norm,
    support_normalizers, supports, sv_function, Projection,
};
use opalg_core::{CMatrix, Error};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::time::Instant;

// ── Configuration and report types ──────────────────────────────────────────

fn default_ns() -> Vec<usize> {
    vec![2, 4, 8]
}

fn default_trials() -> usize {
    100
}

fn default_seed() -> u64 {
    2026
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default = "default_ns")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl SuiteConfig {
    /// Suite-appropriate defaults: orders and trial counts sized so a bare
    /// `opalg suite <name>` exercises each identity at full strength.
    pub fn named(suite: &str) -> Self {
        let (n_values, trials) = match suite {
            "fk-axioms" => (vec![2, 4, 8, 16], 125),
            "brown-identities" => (vec![2, 4, 8, 16], 25),
            "hs-projections" => (vec![2, 4, 8, 16], 50),
            "isometry-lemmas" => (vec![2, 4, 6], 50),
            "decomposition-roundtrip" => (vec![2, 3, 4, 6, 8], 40),
            "hk-theorem" => (vec![2, 3, 4, 6], 25),
            "interval-midpoints" => (vec![64, 256, 512], 1),
            _ => (default_ns(), default_trials()),
        };
        SuiteConfig {
            suite: suite.to_string(),
            n_values,
            trials,
            seed: default_seed(),
            tolerances: BTreeMap::new(),
            output: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub name: String,
    pub anchor: String,
    pub trials: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub witnesses: Vec<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: SuiteConfig,
    pub properties: Vec<PropertyRecord>,
    pub failures: usize,
    pub digest: String,
    pub wall_clock_ms: u128,
}

#[derive(Serialize)]
struct DigestBody<'a> {
    suite: &'a str,
    config: &'a SuiteConfig,
    properties: &'a [PropertyRecord],
    failures: usize,
}

impl Report {
    pub fn human_summary(&self) -> String {
        let mut out = format!("suite {} (seed {})\n", self.suite, self.config.seed);
        for p in &self.properties {
            out.push_str(&format!(
                "  {:28} trials {:5}  failures {:3}  worst {:.3e}   [{}]\n",
                p.name, p.trials, p.failures, p.worst_residual, p.anchor
            ));
        }
        out.push_str(&format!(
            "  total failures: {}   digest: {}   {} ms\n",
            self.failures, self.digest, self.wall_clock_ms
        ));
        out
    }
}

// ── Trial plumbing ──────────────────────────────────────────────────────────

pub struct TrialCtx<'a> {
    pub n: usize,
    pub rng: &'a mut ChaCha8Rng,
    tols: &'a BTreeMap<String, f64>,
}

impl TrialCtx<'_> {
    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tols.get(key).copied().unwrap_or(default)
    }
}

pub struct TrialOutcome {
    pub pass: bool,
    pub residual: f64,
    pub witness: Option<Value>,
}

type PropFn = fn(&mut TrialCtx) -> Result<TrialOutcome, Error>;

pub struct Property {
    pub name: &'static str,
    pub anchor: &'static str,
    pub min_n: usize,
    pub max_n: usize,
    pub run: PropFn,
}

/// Accumulates named sub-checks; the first violation becomes the witness.
struct Acc {
    worst: f64,
    witness: Option<Value>,
}

impl Acc {
    fn new() -> Self {
        Acc {
            worst: 0.0,
            witness: None,
        }
    }

    fn le(&mut self, label: &'static str, value: f64, bound: f64) {
        if value.is_finite() {
            self.worst = self.worst.max(value);
        } else {
            self.worst = 1e300;
        }
        if !(value <= bound) && self.witness.is_none() {
            self.witness = Some(json!({ "check": label, "value": value, "bound": bound }));
        }
    }

    fn eq_count(&mut self, label: &'static str, got: usize, want: usize) {
        self.worst = self.worst.max((got as f64 - want as f64).abs());
        if got != want && self.witness.is_none() {
            self.witness = Some(json!({ "check": label, "got": got, "want": want }));
        }
    }

    fn require(&mut self, label: &'static str, cond: bool) {
        if !cond && self.witness.is_none() {
            self.witness = Some(json!({ "check": label }));
        }
    }

    fn done(self) -> TrialOutcome {
        TrialOutcome {
            pass: self.witness.is_none(),
            residual: self.worst,
            witness: self.witness,
        }
    }
}

// ── Shared instance helpers ─────────────────────────────────────────────────

fn rank_of(x: &CMatrix) -> Result<usize, Error> {
    numerical_rank(x, None)
}

fn nonzero_scalar(rng: &mut ChaCha8Rng) -> Complex64 {
    let z = gen::cnormal(rng);
    let r = 0.25 + z.norm();
    Complex64::from_polar(r, z.arg())
}

fn random_jordan(rng: &mut ChaCha8Rng) -> Jordan {
    if rng.gen() {
        Jordan::Identity
    } else {
        Jordan::Transpose
    }
}

/// Projections built over one shared orthonormal basis so meets, joins and
/// orthogonality relations have exactly known ranks.
fn column_projection(u: &CMatrix, start: usize, len: usize) -> Projection {
    let n = u.n();
    let shifted = CMatrix::from_fn(n, |r, c| u.get(r, (c + start) % n));
    Projection::from_orthonormal_columns(&shifted, len)
}

fn spectrum(x: &CMatrix) -> Result<Vec<Complex64>, Error> {
    Ok(schur(x)?.eigenvalues)
}

/// Disk with every eigenvalue at distance ≥ margin from the circle; the
/// inside count is uniform over 0..=n.
fn sample_disk(rng: &mut ChaCha8Rng, eigs: &[Complex64], margin: f64) -> Option<RegionPredicate> {
    let n = eigs.len();
    let center = gen::cnormal(rng) * 0.8;
    let mut d: Vec<f64> = eigs.iter().map(|&e| (e - center).norm()).collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = rng.gen_range(0..=n);
    let radius = if m == 0 {
        if d[0] < 4.0 * margin {
            return None;
        }
        d[0] * 0.5
    } else if m == n {
        d[n - 1] + 1.0
    } else {
        if d[m] - d[m - 1] < 2.5 * margin {
            return None;
        }
        0.5 * (d[m - 1] + d[m])
    };
    Some(RegionPredicate::Disk { center, radius })
}

/// Half-plane in a random direction splitting the spectrum between two order
/// statistics of the projected eigenvalues.
fn sample_halfplane(
    rng: &mut ChaCha8Rng,
    eigs: &[Complex64],
    margin: f64,
) -> Option<RegionPredicate> {
    let n = eigs.len();
    let normal = Complex64::from_polar(1.0, rng.gen_range(0.0..core::f64::consts::TAU));
    let mut v: Vec<f64> = eigs.iter().map(|&e| (normal.conj() * e).re).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = rng.gen_range(0..=n);
    let offset = if m == 0 {
        v[0] - 1.0
    } else if m == n {
        v[n - 1] + 1.0
    } else {
        if v[m] - v[m - 1] < 2.5 * margin {
            return None;
        }
        0.5 * (v[m - 1] + v[m])
    };
    Some(RegionPredicate::Halfplane { normal, offset })
}

/// Region (disk or half-plane) with boundary margin ≥ `margin` around the
/// given spectrum; with `splitting` set, both sides are nonempty.
fn sample_region(
    rng: &mut ChaCha8Rng,
    eigs: &[Complex64],
    margin: f64,
    splitting: bool,
) -> Result<RegionPredicate, Error> {
    for _ in 0..128 {
        let cand = if rng.gen() {
            sample_disk(rng, eigs, margin)
        } else {
            sample_halfplane(rng, eigs, margin)
        };
        if let Some(region) = cand {
            if splitting {
                let inside = eigs.iter().filter(|&&e| region.contains(e)).count();
                if inside == 0 || inside == eigs.len() {
                    continue;
                }
            }
            return Ok(region);
        }
    }
    Err(Error::Usage("no admissible region found for this spectrum"))
}

/// λ with a guaranteed complex distance to every listed point.
fn offset_scalar(
    rng: &mut ChaCha8Rng,
    points: &[Complex64],
    min_dist: f64,
) -> Result<Complex64, Error> {
    for _ in 0..128 {
        let lambda = gen::cnormal(rng) * 1.5;
        if points.iter().all(|&p| (p - lambda).norm() >= min_dist) {
            return Ok(lambda);
        }
    }
    Err(Error::Usage("no scalar clear of the spectrum found"))
}

// ── rank-axioms ─────────────────────────────────────────────────────────────

fn rank_separation(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let mut acc = Acc::new();
    let rn = rank_norm(&x)?;
    acc.le("rank_norm == k/n", (rn - k as f64 / n as f64).abs(), 0.0);
    acc.require("zero norm only at zero", (rn == 0.0) == (k == 0));
    Ok(acc.done())
}

fn rank_triangle(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let draw = |ctx: &mut TrialCtx| {
        let k = ctx.rng.gen_range(0..=n);
        gen::ranked(ctx.rng, n, k, 0.5, 3.0)
    };
    let x = draw(ctx)?;
    let y = draw(ctx)?;
    let z = draw(ctx)?;
    let rxz = rank_of(&x.sub(&z))?;
    let rxy = rank_of(&x.sub(&y))?;
    let ryz = rank_of(&y.sub(&z))?;
    let mut acc = Acc::new();
    acc.require("rank(x−z) ≤ rank(x−y) + rank(y−z)", rxz <= rxy + ryz);
    acc.le("slack", (rxz as f64 - (rxy + ryz) as f64).max(0.0), 0.0);
    Ok(acc.done())
}

fn rank_product_bound(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k1 = ctx.rng.gen_range(0..=n);
    let k2 = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k1, 0.5, 3.0)?;
    let y = gen::ranked(ctx.rng, n, k2, 0.5, 3.0)?;
    let r = rank_of(&x.mul(&y))?;
    let mut acc = Acc::new();
    acc.require("rank(xy) ≤ min", r <= k1.min(k2));
    Ok(acc.done())
}

fn rank_orthogonal_additivity(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let u = gen::haar_unitary(ctx.rng, n);
    let k = ctx.rng.gen_range(0..=n);
    let l = ctx.rng.gen_range(0..=(n - k));
    let p = column_projection(&u, 0, k);
    let q = column_projection(&u, k, l);
    let mut acc = Acc::new();
    acc.le("pq = 0", p.matrix().mul(q.matrix()).fro_norm(), 1e-12);
    acc.eq_count(
        "rank(p+q) = rank p + rank q",
        rank_of(&p.matrix().add(q.matrix()))?,
        k + l,
    );
    Ok(acc.done())
}

fn rank_scalar_invariance(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let lambda = nonzero_scalar(ctx.rng);
    let mut acc = Acc::new();
    acc.eq_count("rank(λx) = rank(x)", rank_of(&x.scale(lambda))?, k);
    Ok(acc.done())
}

fn rank_sv_step(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let mut s: Vec<f64> = (0..n)
        .map(|i| {
            if i < k {
                (ctx.rng.gen_range(0.5f64.ln()..=3.0f64.ln())).exp()
            } else {
                0.0
            }
        })
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let u = gen::haar_unitary(ctx.rng, n);
    let v = gen::haar_unitary(ctx.rng, n);
    let x = CMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|i| u.get(r, i) * s[i] * v.get(c, i).conj())
            .sum()
    });
    let tol = ctx.tol("sv", 1e-10);
    let mut acc = Acc::new();
    for (i, &si) in s.iter().enumerate() {
        let t = (i as f64 + 0.5) / n as f64;
        acc.le(
            "μ(t; x) is the ⌊tn⌋+1-th singular value",
            (sv_function(&x, t)? - si).abs(),
            tol,
        );
    }
    Ok(acc.done())
}

fn rank_l0_limit(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k, 1e-3, 3.0)?;
    let diff = (l0_norm(&x.scale_re(1e8))? - rank_norm(&x)?).abs();
    let mut acc = Acc::new();
    acc.le("‖λx‖_L0 → ‖x‖_S", diff, ctx.tol("l0", 1e-6));
    Ok(acc.done())
}

static RANK_AXIOMS: &[Property] = &[
    Property {
        name: "separation",
        anchor: "‖x‖_S = rank(x)/n, zero exactly at x = 0",
        min_n: 1,
        max_n: usize::MAX,
        run: rank_separation,
    },
    Property {
        name: "triangle",
        anchor: "ρ(x, z) ≤ ρ(x, y) + ρ(y, z)",
        min_n: 1,
        max_n: usize::MAX,
        run: rank_triangle,
    },
    Property {
        name: "product-bound",
        anchor: "‖xy‖_S ≤ min{‖x‖_S, ‖y‖_S}",
        min_n: 1,
        max_n: usize::MAX,
        run: rank_product_bound,
    },
    Property {
        name: "orthogonal-additivity",
        anchor: "pq = 0 ⇒ ‖p + q‖_S = ‖p‖_S + ‖q‖_S",
        min_n: 1,
        max_n: usize::MAX,
        run: rank_orthogonal_additivity,
    },
    Property {
        name: "scalar-invariance",
        anchor: "‖λx‖_S = ‖x‖_S for λ ≠ 0",
        min_n: 1,
        max_n: usize::MAX,
        run: rank_scalar_invariance,
    },
    Property {
        name: "sv-step",
        anchor: "μ(t; x) = σ_{⌊tn⌋+1}(x) on [k/n, (k+1)/n)",
        min_n: 1,
        max_n: usize::MAX,
        run: rank_sv_step,
    },
    Property {
        name: "l0-limit",
        anchor: "lim_{λ→∞} ‖λx‖_{L0} = ‖x‖_S = τ(r(x))",
        min_n: 1,
        max_n: usize::MAX,
        run: rank_l0_limit,
    },
];

// ── regring-identities ──────────────────────────────────────────────────────

fn reg_pinv_identities(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let i = opalg_core::matcore::pinv(&x, None)?;
    let tol = ctx.tol("pinv", 1e-10);
    let xi = x.mul(&i);
    let ix = i.mul(&x);
    let mut acc = Acc::new();
    acc.le("x·i(x)·x = x", xi.mul(&x).sub(&x).fro_norm(), tol);
    acc.le("i(x)·x·i(x) = i(x)", ix.mul(&i).sub(&i).fro_norm(), tol);
    acc.le("(x·i(x))* = x·i(x)", xi.adjoint().sub(&xi).fro_norm(), tol);
    acc.le("(i(x)·x)* = i(x)·x", ix.adjoint().sub(&ix).fro_norm(), tol);
    acc.le(
        "i(i(x)) = x",
        opalg_core::matcore::pinv(&i, None)?.sub(&x).fro_norm(),
        tol,
    );
    Ok(acc.done())
}

fn reg_support_identities(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let i = opalg_core::matcore::pinv(&x, None)?;
    let (l, r) = supports(&x)?;
    let tol = ctx.tol("pinv", 1e-10);
    let mut acc = Acc::new();
    acc.le("x·i(x) = l(x)", x.mul(&i).sub(l.matrix()).fro_norm(), tol);
    acc.le("i(x)·x = r(x)", i.mul(&x).sub(r.matrix()).fro_norm(), tol);
    Ok(acc.done())
}

fn reg_normalizers(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(1..=n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let (a, b) = support_normalizers(&x)?;
    let (l, r) = supports(&x)?;
    let tol = ctx.tol("pinv", 1e-10);
    let mut acc = Acc::new();
    acc.eq_count("a invertible", rank_of(&a)?, n);
    acc.eq_count("b invertible", rank_of(&b)?, n);
    acc.le("x·a = l(x)", x.mul(&a).sub(l.matrix()).fro_norm(), tol);
    acc.le("b·x = r(x)", b.mul(&x).sub(r.matrix()).fro_norm(), tol);
    Ok(acc.done())
}

fn reg_support_invariance(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let g = gen::random_invertible(ctx.rng, n, 1e2)?;
    let h = gen::random_invertible(ctx.rng, n, 1e2)?;
    let tol = ctx.tol("support", 1e-8);
    let mut acc = Acc::new();
    acc.le(
        "l(x·b) = l(x)",
        supports(&x.mul(&g))?
            .0
            .matrix()
            .sub(supports(&x)?.0.matrix())
            .fro_norm(),
        tol,
    );
    acc.le(
        "r(a·x) = r(x)",
        supports(&h.mul(&x))?
            .1
            .matrix()
            .sub(supports(&x)?.1.matrix())
            .fro_norm(),
        tol,
    );
    Ok(acc.done())
}

fn reg_rank_conjugation(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..=n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let a = gen::random_invertible(ctx.rng, n, 1e2)?;
    let b = gen::random_invertible(ctx.rng, n, 1e2)?;
    let mut acc = Acc::new();
    acc.eq_count("rank(a·x·b) = rank(x)", rank_of(&a.mul(&x).mul(&b))?, k);
    Ok(acc.done())
}

fn reg_block_rank(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k1 = ctx.rng.gen_range(0..=n);
    let k2 = ctx.rng.gen_range(0..=n);
    let a = gen::ranked(ctx.rng, n, k1, 0.5, 3.0)?;
    let b = gen::ranked(ctx.rng, n, k2, 0.5, 3.0)?;
    let c = gen::random_invertible(ctx.rng, n, 1e2)?;
    let block = CMatrix::from_blocks(&CMatrix::zero(n), &a, &b, &c);
    let corner = a.mul(&inverse(&c)?).mul(&b);
    let mut acc = Acc::new();
    acc.eq_count(
        "rank[[0,a],[b,c]] = n + rank(a·c⁻¹·b)",
        rank_of(&block)?,
        n + rank_of(&corner)?,
    );
    Ok(acc.done())
}

fn reg_idempotent_split(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let e = gen::random_idempotent(ctx.rng, n)?;
    let split = idempotent_split(&e)?;
    let tol = ctx.tol("idem", 1e-8);
    let p = split.p.matrix();
    let q = split.p.complement();
    let mut acc = Acc::new();
    acc.le("e = l(e) + u", p.add(&split.u).sub(&e).fro_norm(), 1e-12);
    acc.le("u² = 0", split.u.mul(&split.u).fro_norm(), tol);
    acc.le(
        "u = p·u·(1−p)",
        p.mul(&split.u).mul(q.matrix()).sub(&split.u).fro_norm(),
        tol,
    );
    Ok(acc.done())
}

fn reg_projection_conjugator(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let e = gen::random_idempotent(ctx.rng, n)?;
    let a = projection_conjugator(&e)?;
    let (l, _) = supports(&e)?;
    let res = a.mul(&e).mul(&inverse(&a)?).sub(l.matrix()).fro_norm();
    let mut acc = Acc::new();
    acc.le("a·e·a⁻¹ = l(e) with a = 1 + u", res, ctx.tol("idem", 1e-8));
    Ok(acc.done())
}

fn reg_meet_join(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let u = gen::haar_unitary(ctx.rng, n);
    let kp = ctx.rng.gen_range(0..=n);
    let kq = ctx.rng.gen_range(0..=n);
    let s = ctx.rng.gen_range(0..n.max(1));
    let p = column_projection(&u, 0, kp);
    let q = column_projection(&u, s, kq);
    let expected_meet = (0..n).filter(|&c| c < kp && ((c + n - s) % n) < kq).count();
    let expected_join = (0..n).filter(|&c| c < kp || ((c + n - s) % n) < kq).count();
    let (meet, join) = proj_meet_join(&p, &q)?;
    let mut acc = Acc::new();
    acc.eq_count("rank(p∧q)", meet.rank(), expected_meet);
    acc.eq_count("rank(p∨q)", join.rank(), expected_join);
    acc.require("p∧q ≤ p ≤ p∨q", meet.le(&p) && p.le(&join));
    acc.require("p∧q ≤ q ≤ p∨q", meet.le(&q) && q.le(&join));
    Ok(acc.done())
}

fn reg_peirce(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let k = ctx.rng.gen_range(0..=n);
    let p = gen::random_projection(ctx.rng, n, k)?;
    let blocks = peirce_decompose(&x, &p)?;
    let mut acc = Acc::new();
    acc.le(
        "x = pxp + pxq + qxp + qxq",
        blocks.reconstruct().sub(&x).fro_norm(),
        1e-12 * x.fro_norm().max(1.0),
    );
    Ok(acc.done())
}

static REGRING_IDENTITIES: &[Property] = &[
    Property {
        name: "pinv-identities",
        anchor: "x·i(x)·x = x, i(x)·x·i(x) = i(x), both products self-adjoint, i involutive",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_pinv_identities,
    },
    Property {
        name: "support-identities",
        anchor: "x·i(x) = l(x), i(x)·x = r(x)",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_support_identities,
    },
    Property {
        name: "normalizers",
        anchor: "invertible a, b with x·a = l(x), b·x = r(x)",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_normalizers,
    },
    Property {
        name: "support-invariance",
        anchor: "l(x·b) = l(x), r(a·x) = r(x) for invertible a, b",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_support_invariance,
    },
    Property {
        name: "rank-conjugation",
        anchor: "rank(a·x·b) = rank(x) for invertible a, b",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_rank_conjugation,
    },
    Property {
        name: "block-rank",
        anchor: "rank[[0, a], [b, c]] = rank(c) + rank(a·c⁻¹·b) for invertible c",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_block_rank,
    },
    Property {
        name: "idempotent-split",
        anchor: "e² = e ⇒ e = l(e) + u with u² = 0 in the corner l(e)·M·(1−l(e))",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_idempotent_split,
    },
    Property {
        name: "projection-conjugator",
        anchor: "(1 + u)·e·(1 + u)⁻¹ = l(e)",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_projection_conjugator,
    },
    Property {
        name: "meet-join",
        anchor: "rank(p∧q) + rank(p∨q) = rank(p) + rank(q)",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_meet_join,
    },
    Property {
        name: "peirce",
        anchor: "x = pxp + px(1−p) + (1−p)xp + (1−p)x(1−p)",
        min_n: 1,
        max_n: usize::MAX,
        run: reg_peirce,
    },
];

// ── fk-axioms ───────────────────────────────────────────────────────────────

fn fk_multiplicative(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let cond = ctx.tol("cond", 1e4);
    let x = gen::random_invertible(ctx.rng, n, cond)?;
    let y = gen::random_invertible(ctx.rng, n, cond)?;
    let dx = fk_det(&x)?;
    let dy = fk_det(&y)?;
    let dxy = fk_det(&x.mul(&y))?;
    let rel = (dxy - dx * dy).abs() / (dx * dy);
    let mut acc = Acc::new();
    acc.le("Δ(xy) = Δ(x)·Δ(y)", rel, ctx.tol("det_rel", 1e-8));
    Ok(acc.done())
}

fn fk_star_invariance(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::random_invertible(ctx.rng, n, ctx.tol("cond", 1e4))?;
    let d = fk_det(&x)?;
    let rel = (fk_det(&x.adjoint())? - d).abs() / d;
    let mut acc = Acc::new();
    acc.le("Δ(x*) = Δ(x)", rel, ctx.tol("det_rel", 1e-8));
    Ok(acc.done())
}

fn fk_scalar(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let r = (ctx.rng.gen_range(1e-3f64.ln()..=10f64.ln())).exp();
    let lambda = Complex64::from_polar(r, ctx.rng.gen_range(0.0..core::f64::consts::TAU));
    let d = fk_det(&CMatrix::identity(n).scale(lambda))?;
    let mut acc = Acc::new();
    acc.le("Δ(λ1) = |λ|", (d - r).abs() / r, ctx.tol("det_rel", 1e-8));
    Ok(acc.done())
}

fn fk_contraction(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let u = gen::haar_unitary(ctx.rng, n);
    let d: Vec<f64> = (0..n).map(|_| ctx.rng.gen_range(1e-3..=1.0)).collect();
    let x = CMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|i| u.get(r, i) * d[i] * u.get(c, i).conj())
            .sum()
    });
    let det = fk_det(&x.hermitize())?;
    let mut acc = Acc::new();
    acc.le(
        "0 ≤ x ≤ 1 ⇒ Δ(x) ≤ 1",
        (det - 1.0).max(0.0),
        ctx.tol("det_rel", 1e-8),
    );
    Ok(acc.done())
}

fn fk_eps_regularization(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::random_invertible(ctx.rng, n, 1e2)?;
    let d = fk_det(&x)?;
    let e2 = fk_det_eps(&x, 1e-2)?;
    let e4 = fk_det_eps(&x, 1e-4)?;
    let e6 = fk_det_eps(&x, 1e-6)?;
    let mut acc = Acc::new();
    acc.require(
        "ε ↦ Δ_ε(x) decreasing",
        e2 >= e4 - 1e-12 && e4 >= e6 - 1e-12,
    );
    acc.require("Δ_ε ≥ Δ", e6 >= d - 1e-12);
    acc.le(
        "Δ_ε → Δ as ε ↓ 0",
        e6 - d,
        ctx.tol("eps_gap", 1e-3) * d.max(1.0),
    );
    Ok(acc.done())
}

fn fk_singular_zero(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(0..n);
    let x = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let y = gen::random_invertible(ctx.rng, n, 1e2)?;
    let mut acc = Acc::new();
    acc.require("Δ(singular) = 0 exactly", fk_det(&x)? == 0.0);
    acc.require("Δ(invertible) > 0", fk_det(&y)? > 0.0);
    Ok(acc.done())
}

static FK_AXIOMS: &[Property] = &[
    Property {
        name: "multiplicative",
        anchor: "Δ(xy) = Δ(x)·Δ(y)",
        min_n: 1,
        max_n: usize::MAX,
        run: fk_multiplicative,
    },
    Property {
        name: "star-invariance",
        anchor: "Δ(x*) = Δ(x)",
        min_n: 1,
        max_n: usize::MAX,
        run: fk_star_invariance,
    },
    Property {
        name: "scalar",
        anchor: "Δ(λ1) = |λ|",
        min_n: 1,
        max_n: usize::MAX,
        run: fk_scalar,
    },
    Property {
        name: "contraction",
        anchor: "0 ≤ x ≤ 1 ⇒ Δ(x) ≤ 1",
        min_n: 1,
        max_n: usize::MAX,
        run: fk_contraction,
    },
    Property {
        name: "eps-regularization",
        anchor: "Δ(x) = lim_{ε↓0} exp τ(log(|x| + ε)), monotone from above",
        min_n: 1,
        max_n: usize::MAX,
        run: fk_eps_regularization,
    },
    Property {
        name: "singular-zero",
        anchor: "Δ(x) = 0 exactly on singular x, positive otherwise",
        min_n: 1,
        max_n: usize::MAX,
        run: fk_singular_zero,
    },
];

// ── brown-identities ────────────────────────────────────────────────────────

fn brown_ldet_atom_sum(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let mu = brown_measure(&x)?;
    let locs: Vec<Complex64> = mu.atoms().iter().map(|a| a.loc).collect();
    let lambda = offset_scalar(ctx.rng, &locs, ctx.tol("lambda_margin", 1e-2))?;
    let diff = (ldet_at(&x, lambda)? - mu.log_potential(lambda)).abs();
    let mut acc = Acc::new();
    acc.le(
        "log Δ(x − λ) = ∫ log|t − λ| dμ_x(t)",
        diff,
        ctx.tol("ldet", 1e-8),
    );
    Ok(acc.done())
}

fn brown_unitary_invariance(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let u = gen::haar_unitary(ctx.rng, n);
    let y = u.mul(&x).mul(&u.adjoint());
    let mut acc = Acc::new();
    acc.require(
        "μ_{uxu*} = μ_x",
        brown_measure(&x)?.matches(&brown_measure(&y)?, ctx.tol("match", 1e-6)),
    );
    Ok(acc.done())
}

fn brown_normal_spectral(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let lambdas: Vec<Complex64> = (0..n).map(|_| gen::cnormal(ctx.rng) * 1.2).collect();
    let u = gen::haar_unitary(ctx.rng, n);
    let x = CMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|i| u.get(r, i) * lambdas[i] * u.get(c, i).conj())
            .sum()
    });
    let mut acc = Acc::new();
    acc.require(
        "normal x: μ_x is the eigenvalue counting measure",
        brown_measure(&x)?.matches(&BrownMeasure::from_points(&lambdas), ctx.tol("match", 1e-6)),
    );
    Ok(acc.done())
}

fn brown_quasinilpotent(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::nilpotent_upper(ctx.rng, n);
    let mu = brown_measure(&x)?;
    let shifted = x.add(&CMatrix::identity(n));
    let mut acc = Acc::new();
    acc.require("nilpotent ⇒ μ_x = δ₀", quasinilpotent_check(&x, 1e-10)?);
    acc.eq_count("single atom", mu.atoms().len(), 1);
    acc.require("atom at 0", mu.atoms()[0].loc == Complex64::new(0.0, 0.0));
    acc.require(
        "1 + nilpotent is not quasinilpotent",
        !quasinilpotent_check(&shifted, 1e-10)?,
    );
    Ok(acc.done())
}

fn brown_rank_domination(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let d: Vec<Complex64> = (0..n)
        .map(|_| {
            if ctx.rng.gen::<f64>() < 0.34 {
                Complex64::new(0.0, 0.0)
            } else {
                let m = (ctx.rng.gen_range(0.5f64.ln()..=3.0f64.ln())).exp();
                Complex64::from_polar(m, ctx.rng.gen_range(0.0..core::f64::consts::TAU))
            }
        })
        .collect();
    let k = d.iter().filter(|z| z.norm() > 0.0).count();
    let u = gen::haar_unitary(ctx.rng, n);
    let x = CMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|i| u.get(r, i) * d[i] * u.get(c, i).conj())
            .sum()
    });
    // y stays exactly triangular: repeated diagonal entries coupled through
    // the strict upper part form Jordan blocks, whose eigenvalues no dense
    // eigensolver can recover better than ε^(1/m) after a similarity.
    let mut y = CMatrix::from_diag(&d);
    for r in 0..n {
        for c in r + 1..n {
            y.set(r, c, gen::cnormal(ctx.rng) * 0.8);
        }
    }
    let mut acc = Acc::new();
    acc.require(
        "μ_x = μ_y (same triangular diagonal)",
        brown_measure(&x)?.matches(&brown_measure(&y)?, ctx.tol("match", 1e-6)),
    );
    acc.require(
        "x normal, y triangular, μ equal ⇒ rank x ≤ rank y",
        k <= rank_of(&y)?,
    );
    Ok(acc.done())
}

static BROWN_IDENTITIES: &[Property] = &[
    Property {
        name: "ldet-atom-sum",
        anchor: "log Δ(x − λ1) = ∫ log|t − λ| dμ_x(t) off the spectrum",
        min_n: 1,
        max_n: usize::MAX,
        run: brown_ldet_atom_sum,
    },
    Property {
        name: "unitary-invariance",
        anchor: "μ_{uxu*} = μ_x",
        min_n: 1,
        max_n: usize::MAX,
        run: brown_unitary_invariance,
    },
    Property {
        name: "normal-spectral",
        anchor: "for normal x the Brown measure is the spectral counting measure",
        min_n: 1,
        max_n: usize::MAX,
        run: brown_normal_spectral,
    },
    Property {
        name: "quasinilpotent",
        anchor: "μ_x = δ₀ exactly for nilpotent x",
        min_n: 1,
        max_n: usize::MAX,
        run: brown_quasinilpotent,
    },
    Property {
        name: "rank-domination",
        anchor: "x normal, y with the same Brown measure ⇒ ‖x‖_S ≤ ‖y‖_S",
        min_n: 1,
        max_n: usize::MAX,
        run: brown_rank_domination,
    },
];

// ── hs-projections ──────────────────────────────────────────────────────────

fn hs_invariance(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let eigs = spectrum(&x)?;
    let region = sample_region(ctx.rng, &eigs, ctx.tol("margin", 1e-3), false)?;
    let hs = hs_projection(&x, &region)?;
    let mut acc = Acc::new();
    acc.le(
        "x·p = p·x·p",
        hs.invariance_residual,
        ctx.tol("invariance", 1e-8) * x.fro_norm().max(1.0),
    );
    Ok(acc.done())
}

fn hs_trace_weight(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let eigs = spectrum(&x)?;
    let region = sample_region(ctx.rng, &eigs, ctx.tol("margin", 1e-3), false)?;
    let hs = hs_projection(&x, &region)?;
    let (wn, wd) = brown_measure(&x)?.weight_in(&region);
    let mut acc = Acc::new();
    acc.require(
        "τ(p) = μ_x(B) (exact rational)",
        hs.trace_num * wd == wn * n as u64,
    );
    acc.require(
        "result echoes the measure weight",
        hs.mu_b.0 * wd == wn * hs.mu_b.1,
    );
    acc.eq_count("rank matches trace", hs.p.rank(), hs.trace_num as usize);
    Ok(acc.done())
}

fn hs_corner_spectra(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let eigs = spectrum(&x)?;
    let region = sample_region(ctx.rng, &eigs, ctx.tol("margin", 1e-3), false)?;
    let hs = hs_projection(&x, &region)?;
    let k = hs.trace_num as usize;
    let mut acc = Acc::new();
    acc.eq_count("inside count", hs.inside_spectrum.len(), k);
    acc.eq_count("outside count", hs.outside_spectrum.len(), n - k);
    acc.require(
        "σ(pxp | pH) ⊆ B",
        hs.inside_spectrum.iter().all(|&z| region.contains(z)),
    );
    acc.require(
        "σ(qxq | qH) ∩ B = ∅",
        hs.outside_spectrum.iter().all(|&z| !region.contains(z)),
    );
    Ok(acc.done())
}

fn hs_complement_split(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let eigs = spectrum(&x)?;
    let region = sample_region(ctx.rng, &eigs, ctx.tol("margin", 1e-3), false)?;
    let hs_in = hs_projection(&x, &region)?;
    let hs_out = hs_projection(&x, &RegionPredicate::Complement(Box::new(region)))?;
    let mut acc = Acc::new();
    acc.eq_count(
        "τ(p(B)) + τ(p(ℂ∖B)) = 1",
        (hs_in.trace_num + hs_out.trace_num) as usize,
        n,
    );
    Ok(acc.done())
}

fn hs_measure_decomposition(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let eigs = spectrum(&x)?;
    let region = sample_region(ctx.rng, &eigs, ctx.tol("margin", 1e-3), true)?;
    let hs = hs_projection(&x, &region)?;
    let k = hs.trace_num as usize;
    let (inside, outside) = brown_decompose(&x, &hs.p)?;
    let mixed = BrownMeasure::mix(
        (k as u64, n as u64),
        &inside,
        ((n - k) as u64, n as u64),
        &outside,
    )?;
    let mut acc = Acc::new();
    acc.require(
        "μ_x = τ(p)·μ_pxp + τ(q)·μ_qxq",
        mixed.matches(&brown_measure(&x)?, ctx.tol("match", 1e-6)),
    );
    Ok(acc.done())
}

static HS_PROJECTIONS: &[Property] = &[
    Property {
        name: "invariance",
        anchor: "x·p = p·x·p: range(p) is x-invariant",
        min_n: 2,
        max_n: usize::MAX,
        run: hs_invariance,
    },
    Property {
        name: "trace-weight",
        anchor: "τ(p) = μ_x(B)",
        min_n: 2,
        max_n: usize::MAX,
        run: hs_trace_weight,
    },
    Property {
        name: "corner-spectra",
        anchor: "the compression to range(p) has spectrum in B, the complement outside",
        min_n: 2,
        max_n: usize::MAX,
        run: hs_corner_spectra,
    },
    Property {
        name: "complement-split",
        anchor: "p(B) and p(ℂ∖B) have complementary traces",
        min_n: 2,
        max_n: usize::MAX,
        run: hs_complement_split,
    },
    Property {
        name: "measure-decomposition",
        anchor: "μ_x = τ(p)·μ_{pxp} + τ(1−p)·μ_{(1−p)x(1−p)} for invariant p",
        min_n: 2,
        max_n: usize::MAX,
        run: hs_measure_decomposition,
    },
];

// ── isometry-lemmas ─────────────────────────────────────────────────────────

const FORM_COND: f64 = 1e2;

fn lemma_invertibility(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let (_, map) = gen::canonical_form(ctx.rng, n, jordan, conj, FORM_COND)?;
    let g = gen::random_invertible(ctx.rng, n, 1e2)?;
    let k = ctx.rng.gen_range(0..n);
    let s = gen::ranked(ctx.rng, n, k, 0.5, 3.0)?;
    let mut acc = Acc::new();
    acc.eq_count("Φ(invertible) invertible", rank_of(&map.apply(&g)?)?, n);
    acc.eq_count(
        "Φ(singular) singular of equal rank",
        rank_of(&map.apply(&s)?)?,
        k,
    );
    Ok(acc.done())
}

fn lemma_order_preservation(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let (_, map) = gen::canonical_form(ctx.rng, n, jordan, conj, FORM_COND)?;
    let u = gen::haar_unitary(ctx.rng, n);
    let l = ctx.rng.gen_range(0..=n);
    let k = ctx.rng.gen_range(0..=l);
    let p = column_projection(&u, 0, k);
    let q = column_projection(&u, 0, l);
    let (lp, rp) = support_image(&map, &p)?;
    let (lq, rq) = support_image(&map, &q)?;
    let mut acc = Acc::new();
    acc.require("p ≤ q ⇒ l(Φp) ≤ l(Φq)", lp.le(&lq));
    acc.require("p ≤ q ⇒ r(Φp) ≤ r(Φq)", rp.le(&rq));
    Ok(acc.done())
}

fn lemma_orthogonality_meet(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let (_, map) = gen::canonical_form(ctx.rng, n, jordan, conj, FORM_COND)?;
    let u = gen::haar_unitary(ctx.rng, n);
    let k = ctx.rng.gen_range(1..n);
    let l = ctx.rng.gen_range(1..=(n - k));
    let p = column_projection(&u, 0, k);
    let q = column_projection(&u, k, l);
    let (lp, _) = support_image(&map, &p)?;
    let (lq, _) = support_image(&map, &q)?;
    let (meet, _) = proj_meet_join(&lp, &lq)?;
    let mut acc = Acc::new();
    acc.eq_count("pq = 0 ⇒ l(Φp) ∧ l(Φq) = 0", meet.rank(), 0);
    acc.le("meet trace 0", meet.trace_value(), 1e-12);
    Ok(acc.done())
}

fn lemma_idempotent_image(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let (_, map) = gen::unital_form(ctx.rng, n, jordan, conj, FORM_COND)?;
    let e = gen::random_idempotent(ctx.rng, n)?;
    let fe = map.apply(&e)?;
    let res = fe.mul(&fe).sub(&fe).fro_norm() / fe.fro_norm().max(1.0).powi(2);
    let mut acc = Acc::new();
    acc.le("Φ(e)² = Φ(e) for unital Φ", res, ctx.tol("idem", 1e-8));
    Ok(acc.done())
}

fn lemma_corner_vanishing(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let k = ctx.rng.gen_range(1..n);
    let p = gen::random_projection(ctx.rng, n, k)?;
    let q = p.complement();
    let z = gen::ginibre(ctx.rng, n);
    let x = p.matrix().mul(&z).mul(q.matrix()).add(q.matrix());
    let mut acc = Acc::new();
    acc.eq_count(
        "hypothesis τ(l(x)) = τ(q)",
        numerical_rank(&x, Some(1e-10))?,
        n - k,
    );
    acc.le(
        "x = px + q with τ(l(x)) = τ(q) ⇒ pxp = 0",
        p.matrix().mul(&x).mul(p.matrix()).fro_norm(),
        ctx.tol("corner", 1e-8),
    );
    Ok(acc.done())
}

fn lemma_zero_product_side(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let (_, map) = gen::unital_form(ctx.rng, n, jordan, conj, FORM_COND)?;
    let tol = ctx.tol("zero_product", 1e-8);
    let mut all_left = true;
    let mut all_right = true;
    for _ in 0..3 {
        let k = ctx.rng.gen_range(1..n);
        let p = gen::random_projection(ctx.rng, n, k)?;
        let x = gen::ginibre(ctx.rng, n).mul(p.matrix());
        let y = p.complement().matrix().mul(&gen::ginibre(ctx.rng, n));
        let fx = map.apply(&x)?;
        let fy = map.apply(&y)?;
        let scale = (fx.fro_norm() * fy.fro_norm()).max(1.0);
        all_left &= fx.mul(&fy).fro_norm() <= tol * scale;
        all_right &= fy.mul(&fx).fro_norm() <= tol * scale;
    }
    let mut acc = Acc::new();
    acc.require(
        "xy = 0 ⇒ Φ(x)Φ(y) = 0 or Φ(y)Φ(x) = 0, one side per map",
        all_left || all_right,
    );
    Ok(acc.done())
}

fn lemma_corner_ideal_span(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let (_, map) = gen::unital_form(ctx.rng, n, jordan, conj, FORM_COND)?;
    let k = ctx.rng.gen_range(1..n);
    let l = ctx.rng.gen_range(1..n);
    let p = gen::random_projection(ctx.rng, n, k)?;
    let q = gen::random_projection(ctx.rng, n, l)?;

    // Stack vec(Φ(p·e_ij·q)) over all matrix units as columns; the span of
    // the image of the corner p·M·q has complex dimension rank(p)·rank(q).
    let m = n * n;
    let mut data: Vec<Complex64> = Vec::with_capacity(m * m);
    for i in 0..n {
        for j in 0..n {
            let e = CMatrix::unit(n, i, j);
            let y = map.apply(&p.matrix().mul(&e).mul(q.matrix()))?;
            data.extend_from_slice(&y.vec_col_major());
        }
    }
    let stack = CMatrix::from_vec_col_major(m, &data);
    let rank_tol = Some(1e-8 * stack.fro_norm().max(1.0));
    let mut acc = Acc::new();
    acc.eq_count(
        "dim Φ(p·M·q) = rank(p)·rank(q)",
        numerical_rank(&stack, rank_tol)?,
        k * l,
    );

    // Every image lies in one corner cut by the supports of Φ(p) and Φ(q);
    // which corner depends on the multiplicative orientation of the map.
    let (lp, rp) = support_image(&map, &p)?;
    let (lq, rq) = support_image(&map, &q)?;
    let tol = ctx.tol("corner", 1e-8);
    let mut iso_ok = true;
    let mut anti_ok = true;
    for _ in 0..3 {
        let x = p.matrix().mul(&gen::ginibre(ctx.rng, n)).mul(q.matrix());
        let y = map.apply(&x)?;
        let scale = y.fro_norm().max(1.0);
        iso_ok &= lp.matrix().mul(&y).mul(rq.matrix()).sub(&y).fro_norm() <= tol * scale;
        anti_ok &= lq.matrix().mul(&y).mul(rp.matrix()).sub(&y).fro_norm() <= tol * scale;
    }
    acc.require("images compress to one support corner", iso_ok || anti_ok);
    Ok(acc.done())
}

static ISOMETRY_LEMMAS: &[Property] = &[
    Property {
        name: "invertibility",
        anchor: "Φ(x) invertible iff x invertible; ranks preserved exactly",
        min_n: 2,
        max_n: usize::MAX,
        run: lemma_invertibility,
    },
    Property {
        name: "order-preservation",
        anchor: "p ≤ q ⇒ supports of Φ(p) dominate supports of Φ(q) in order",
        min_n: 2,
        max_n: usize::MAX,
        run: lemma_order_preservation,
    },
    Property {
        name: "orthogonality-meet",
        anchor: "pq = 0 ⇒ l(Φ(p)) ∧ l(Φ(q)) = 0",
        min_n: 2,
        max_n: usize::MAX,
        run: lemma_orthogonality_meet,
    },
    Property {
        name: "idempotent-image",
        anchor: "unital Φ maps idempotents to idempotents",
        min_n: 2,
        max_n: usize::MAX,
        run: lemma_idempotent_image,
    },
    Property {
        name: "corner-vanishing",
        anchor: "x = px + q, τ(l(x)) = τ(q) ⇒ pxp = 0",
        min_n: 2,
        max_n: usize::MAX,
        run: lemma_corner_vanishing,
    },
    Property {
        name: "zero-product-side",
        anchor: "xy = 0 forces Φ(x)Φ(y) = 0 or Φ(y)Φ(x) = 0, consistently per map",
        min_n: 2,
        max_n: usize::MAX,
        run: lemma_zero_product_side,
    },
    Property {
        name: "corner-ideal-span",
        anchor: "Φ(p·M·q) spans the corner between the supports of Φ(p) and Φ(q)",
        min_n: 2,
        max_n: 6,
        run: lemma_corner_ideal_span,
    },
];

// ── decomposition-roundtrip ─────────────────────────────────────────────────

fn roundtrip_mode(ctx: &mut TrialCtx) -> Mode {
    if ctx.rng.gen() {
        Mode::RankIsometry
    } else {
        Mode::DetPreserving
    }
}

/// Canonical form adjusted (for determinant mode) so Δ(a)·Δ(b) = 1, making
/// the realized map determinant-preserving rather than merely a rank isometry.
fn drawn_form(
    ctx: &mut TrialCtx,
    mode: Mode,
    jordan: Jordan,
    conj: bool,
) -> Result<(opalg_core::maps::MapForm, MatrixMap), Error> {
    let (mut form, map) = gen::canonical_form(ctx.rng, ctx.n, jordan, conj, FORM_COND)?;
    if mode == Mode::RankIsometry {
        return Ok((form, map));
    }
    let scale = 1.0 / (fk_det(&form.a)? * fk_det(&form.b)?);
    form.a = form.a.scale_re(scale);
    let map = opalg_core::maps::from_form(&form)?;
    Ok((form, map))
}

fn rt_round_trip(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let mode = roundtrip_mode(ctx);
    let (_, map) = drawn_form(ctx, mode, jordan, conj)?;
    let probes = gen::probe_set(ctx.rng, n, 8)?;
    let result = decompose(&map, mode, &probes)?;
    let expected = match jordan {
        Jordan::Identity => Classification::Isomorphism,
        Jordan::Transpose => Classification::AntiIsomorphism,
    };
    let mut acc = Acc::new();
    acc.require(
        "classification matches the drawn form",
        result.classification == expected,
    );
    acc.le(
        "certificate residual",
        result.residual,
        ctx.tol("residual", RESIDUAL_TOL),
    );
    match result.form {
        None => acc.require("form recovered", false),
        Some(form) => {
            acc.require("jordan flag", form.jordan == jordan);
            acc.require("conjugation flag", form.conjugated == conj);
            let rebuilt = opalg_core::maps::from_form(&form)?;
            acc.require("rebuilt kind", rebuilt.kind() == map.kind());
            acc.le(
                "rebuilt operator matches",
                rebuilt.op().sub(map.op()).fro_norm() / map.op().fro_norm(),
                ctx.tol("residual", RESIDUAL_TOL),
            );
        }
    }
    Ok(acc.done())
}

fn rt_perturbed_rejection(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let eps = ctx.tol("perturb_eps", 1e-3);
    let map = gen::perturbed_form(ctx.rng, n, jordan, conj, FORM_COND, eps)?;
    let mode = roundtrip_mode(ctx);
    let probes = gen::probe_set(ctx.rng, n, 8)?;
    let result = decompose(&map, mode, &probes)?;
    let mut acc = Acc::new();
    acc.require(
        "perturbed map rejected",
        result.classification == Classification::NotAnIsometry,
    );
    acc.require("rejection carries a witness", result.witness.is_some());
    Ok(acc.done())
}

fn rt_iso_anti_exclusive(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let (_, map) = gen::unital_form(ctx.rng, n, jordan, false, FORM_COND)?;
    let probes = gen::probe_set(ctx.rng, n, 4)?;
    let report = is_multiplicative(&map, &probes)?;
    let mut acc = Acc::new();
    match jordan {
        Jordan::Identity => {
            acc.require("classified as homomorphism", report.class == MultClass::Iso);
            acc.require("reversed products fail", report.anti_residual > MULT_TOL);
        }
        Jordan::Transpose => {
            acc.require(
                "classified as anti-homomorphism",
                report.class == MultClass::Anti,
            );
            acc.require("direct products fail", report.iso_residual > MULT_TOL);
        }
    }
    Ok(acc.done())
}

fn rt_not_bijective(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    // Symmetrization x ↦ (x + xᵀ)/2 kills the antisymmetric part.
    let m = n * n;
    let mut data: Vec<Complex64> = Vec::with_capacity(m * m);
    for j in 0..n {
        for i in 0..n {
            let image = CMatrix::unit(n, i, j)
                .add(&CMatrix::unit(n, j, i))
                .scale_re(0.5);
            data.extend_from_slice(&image.vec_col_major());
        }
    }
    let op = CMatrix::from_vec_col_major(m, &data);
    let map = MatrixMap::from_op(n, MapKind::Linear, op)?;
    let result = decompose(&map, roundtrip_mode(ctx), &ProbeSet::empty())?;
    let mut acc = Acc::new();
    acc.require("symmetrizer is not bijective", !map.is_bijective());
    acc.require(
        "classified NotBijective",
        result.classification == Classification::NotBijective,
    );
    acc.require("no form reported", result.form.is_none());
    Ok(acc.done())
}

static DECOMPOSITION_ROUNDTRIP: &[Property] = &[
    Property {
        name: "round-trip",
        anchor: "decompose(a·J(x)·b) recovers classification, flags, and the operator",
        min_n: 2,
        max_n: usize::MAX,
        run: rt_round_trip,
    },
    Property {
        name: "perturbed-rejection",
        anchor: "a relatively perturbed canonical form is rejected with a witness",
        min_n: 2,
        max_n: usize::MAX,
        run: rt_perturbed_rejection,
    },
    Property {
        name: "iso-anti-exclusive",
        anchor: "a unital linear form is multiplicative in exactly one orientation",
        min_n: 2,
        max_n: usize::MAX,
        run: rt_iso_anti_exclusive,
    },
    Property {
        name: "not-bijective",
        anchor: "the symmetrizer x ↦ (x + xᵀ)/2 is classified NotBijective",
        min_n: 2,
        max_n: usize::MAX,
        run: rt_not_bijective,
    },
];

// ── hk-theorem ──────────────────────────────────────────────────────────────

fn hk_unital_det_roundtrip(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let conj = ctx.rng.gen();
    let (_, map) = gen::unital_form(ctx.rng, n, jordan, conj, FORM_COND)?;
    let probes = gen::probe_set(ctx.rng, n, 8)?;
    let result = decompose(&map, Mode::DetPreserving, &probes)?;
    let expected = match jordan {
        Jordan::Identity => Classification::Isomorphism,
        Jordan::Transpose => Classification::AntiIsomorphism,
    };
    let mut acc = Acc::new();
    acc.require(
        "unital determinant preserver certified",
        result.classification == expected,
    );
    match result.form {
        None => acc.require("form recovered", false),
        Some(form) => {
            let ab = form.a.mul(&form.b);
            acc.le(
                "b = a⁻¹ after gauge: ‖a·b − 1‖",
                ab.sub(&CMatrix::identity(n)).fro_norm(),
                ctx.tol("unital", 1e-8),
            );
        }
    }
    Ok(acc.done())
}

fn hk_det_chain(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::ginibre(ctx.rng, n);
    let (u, absx) = polar_unitary(&x)?;
    let sv: Vec<Complex64> = svd(&x)?.s.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let tol = ctx.tol("det_rel", 1e-8);
    let mut acc = Acc::new();
    for _ in 0..20 {
        let lambda = offset_scalar(ctx.rng, &sv, 1e-2)?;
        let left = x.sub(&u.scale(lambda));
        let right = absx.sub(&CMatrix::identity(n).scale(lambda));
        let d1 = fk_det(&left)?;
        let d2 = fk_det(&right)?;
        acc.le(
            "Δ(x − λu) = Δ(|x| − λ1)",
            (d1 - d2).abs() / d2.max(1.0),
            tol,
        );
    }
    Ok(acc.done())
}

fn hk_brown_preservation(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let jordan = random_jordan(ctx.rng);
    let (_, map) = gen::unital_form(ctx.rng, n, jordan, false, FORM_COND)?;
    let tol = ctx.tol("match", 1e-6);
    let mut acc = Acc::new();
    for _ in 0..20 {
        let x = gen::ginibre(ctx.rng, n);
        let y = map.apply(&x)?;
        acc.require(
            "μ_{Φ(x)} = μ_x",
            brown_measure(&x)?.matches(&brown_measure(&y)?, tol),
        );
    }
    Ok(acc.done())
}

fn hk_negative_control(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let m = n * n;
    let doubling = MatrixMap::from_op(n, MapKind::Linear, CMatrix::identity(m).scale_re(2.0))?;
    let probes = gen::probe_set(ctx.rng, n, 4)?;
    let result = decompose(&doubling, Mode::DetPreserving, &probes)?;
    let mut acc = Acc::new();
    acc.require(
        "x ↦ 2x fails determinant preservation",
        result.classification == Classification::NotAnIsometry,
    );
    match &result.witness {
        None => acc.require("witness produced", false),
        Some(w) => {
            let before = fk_det(&w.x)?;
            let after = fk_det(&doubling.apply(&w.x)?)?;
            acc.require(
                "witness certifies the violation",
                (after - before).abs() > opalg_core::maps::DET_TOL * before.max(1.0),
            );
        }
    }
    Ok(acc.done())
}

static HK_THEOREM: &[Property] = &[
    Property {
        name: "unital-det-roundtrip",
        anchor: "a unital determinant preserver decomposes with b = a⁻¹",
        min_n: 2,
        max_n: usize::MAX,
        run: hk_unital_det_roundtrip,
    },
    Property {
        name: "det-chain",
        anchor: "Δ(x − λu) = Δ(|x| − λ1) along the polar decomposition x = u|x|",
        min_n: 2,
        max_n: usize::MAX,
        run: hk_det_chain,
    },
    Property {
        name: "brown-preservation",
        anchor: "unital linear forms preserve the Brown measure",
        min_n: 2,
        max_n: usize::MAX,
        run: hk_brown_preservation,
    },
    Property {
        name: "negative-control",
        anchor: "x ↦ 2x is rejected in determinant mode with a concrete witness",
        min_n: 2,
        max_n: usize::MAX,
        run: hk_negative_control,
    },
];

// ── interval-midpoints ───────────────────────────────────────────────────────

const E_INV: f64 = 0.36787944117144233;
const OFF_INTERVAL_LOGDET: f64 = 0.3862943611198906; // ∫₀¹ log(2 − t) dt = 2·ln 2 − 1

fn ex53_det_value(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let x = gen::interval_midpoints(ctx.n);
    let mut acc = Acc::new();
    acc.le(
        "Δ(diag midpoints) → e⁻¹",
        (fk_det(&x)? - E_INV).abs(),
        ctx.tol("det_abs", 1e-2),
    );
    Ok(acc.done())
}

fn ex53_det_curve(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let n = ctx.n;
    let x = gen::interval_midpoints(n);
    let tol = ctx.tol("det_abs", 1e-2);
    let mut acc = Acc::new();
    for &lambda in &[0.25_f64, 0.5, 0.75] {
        let shifted = x.sub(&CMatrix::identity(n).scale_re(lambda));
        let expected = E_INV * lambda.powf(lambda) * (1.0 - lambda).powf(1.0 - lambda);
        acc.le(
            "Δ(x − λ1) → e⁻¹·λ^λ·(1−λ)^{1−λ}",
            (fk_det(&shifted)? - expected).abs(),
            tol,
        );
    }
    Ok(acc.done())
}

fn ex53_off_interval(ctx: &mut TrialCtx) -> Result<TrialOutcome, Error> {
    let x = gen::interval_midpoints(ctx.n);
    let mut acc = Acc::new();
    acc.le(
        "log Δ(x − 2·1) → ∫₀¹ log(2 − t) dt",
        (ldet_at(&x, Complex64::new(2.0, 0.0))? - OFF_INTERVAL_LOGDET).abs(),
        ctx.tol("logdet_abs", 1e-3),
    );
    Ok(acc.done())
}

static INTERVAL_MIDPOINTS: &[Property] = &[
    Property {
        name: "det-value",
        anchor: "Δ of the midpoint discretization of t on [0,1] approaches e⁻¹",
        min_n: 64,
        max_n: usize::MAX,
        run: ex53_det_value,
    },
    Property {
        name: "det-curve",
        anchor: "Δ(x − λ1) approaches e⁻¹·λ^λ·(1−λ)^{1−λ} on (0,1)",
        min_n: 64,
        max_n: usize::MAX,
        run: ex53_det_curve,
    },
    Property {
        name: "off-interval-logdet",
        anchor: "log Δ(x − 2·1) approaches 2·ln 2 − 1",
        min_n: 64,
        max_n: usize::MAX,
        run: ex53_off_interval,
    },
];

// ── Registry and runner ─────────────────────────────────────────────────────

pub const SUITE_NAMES: &[&str] = &[
    "rank-axioms",
    "regring-identities",
    "fk-axioms",
    "brown-identities",
    "hs-projections",
    "isometry-lemmas",
    "decomposition-roundtrip",
    "hk-theorem",
    "interval-midpoints",
];

pub fn suite_properties(name: &str) -> Option<&'static [Property]> {
    match name {
        "rank-axioms" => Some(RANK_AXIOMS),
        "regring-identities" => Some(REGRING_IDENTITIES),
        "fk-axioms" => Some(FK_AXIOMS),
        "brown-identities" => Some(BROWN_IDENTITIES),
        "hs-projections" => Some(HS_PROJECTIONS),
        "isometry-lemmas" => Some(ISOMETRY_LEMMAS),
        "decomposition-roundtrip" => Some(DECOMPOSITION_ROUNDTRIP),
        "hk-theorem" => Some(HK_THEOREM),
        "interval-midpoints" => Some(INTERVAL_MIDPOINTS),
        _ => None,
    }
}

const WITNESS_CAP: usize = 3;

pub fn run_suite(config: &SuiteConfig) -> Result<Report, Error> {
    let props = suite_properties(&config.suite).ok_or(Error::Usage("unknown suite name"))?;
    let start = Instant::now();
    let mut records = Vec::with_capacity(props.len());
    let mut total_failures = 0;

    for prop in props {
        let mut trials = 0;
        let mut failures = 0;
        let mut worst = 0.0_f64;
        let mut witnesses: Vec<Value> = Vec::new();
        for &n in &config.n_values {
            if n < prop.min_n || n > prop.max_n {
                continue;
            }
            for trial in 0..config.trials {
                let mut rng = gen::derive_stream(
                    config.seed,
                    &[
                        gen::fnv64(&config.suite),
                        gen::fnv64(prop.name),
                        n as u64,
                        trial as u64,
                    ],
                );
                let mut ctx = TrialCtx {
                    n,
                    rng: &mut rng,
                    tols: &config.tolerances,
                };
                trials += 1;
                let coords = |w: &mut Value| {
                    if let Value::Object(m) = w {
                        m.insert("n".into(), json!(n));
                        m.insert("trial".into(), json!(trial));
                        m.insert("seed".into(), json!(config.seed));
                    }
                };
                match (prop.run)(&mut ctx) {
                    Ok(out) => {
                        worst = worst.max(if out.residual.is_finite() {
                            out.residual
                        } else {
                            1e300
                        });
                        if !out.pass {
                            failures += 1;
                            if witnesses.len() < WITNESS_CAP {
                                let mut w = out.witness.unwrap_or_else(|| json!({}));
                                coords(&mut w);
                                witnesses.push(w);
                            }
                        }
                    }
                    Err(e) => {
                        failures += 1;
                        worst = worst.max(1e300);
                        if witnesses.len() < WITNESS_CAP {
                            let mut w = json!({ "error": format!("{e}") });
                            coords(&mut w);
                            witnesses.push(w);
                        }
                    }
                }
            }
        }
        total_failures += failures;
        records.push(PropertyRecord {
            name: prop.name.to_string(),
            anchor: prop.anchor.to_string(),
            trials,
            failures,
            worst_residual: worst,
            witnesses,
        });
    }

    // The digest covers everything reproducible; wall clock and the output
    // path are excluded so reruns of one config agree bit for bit.
    let mut scrubbed = config.clone();
    scrubbed.output = None;
    let body = DigestBody {
        suite: &config.suite,
        config: &scrubbed,
        properties: &records,
        failures: total_failures,
    };
    let serialized =
        serde_json::to_string(&body).map_err(|_| Error::Usage("report serialization failed"))?;
    let digest = format!("{:016x}", gen::fnv64(&serialized));

    Ok(Report {
        suite: config.suite.clone(),
        config: config.clone(),
        properties: records,
        failures: total_failures,
        digest,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

// ── Tests ───────────────────────────────────────────────────────────────────
