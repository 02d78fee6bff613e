//! JSON and CSV interchange formats.
//!
//! Matrices are row-major lists of `[re, im]` pairs; maps store the n²×n²
//! operator matrix acting on column-major vectorizations, itself row-major.
//! Parsing rejects wrong lengths and non-finite entries.

use num_complex::Complex64;
use opalg_core::decomp::{Classification, DecompositionResult};
use opalg_core::fkdet::{
    BrownAtom, BrownMeasure, GridMeasure, HSProjectionResult, RegionPredicate,
};
use opalg_core::maps::{Jordan, MapForm, MapKind, MatrixMap, Witness};
use opalg_core::CMatrix;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(#[from] opalg_core::Error),
    #[error("{0}")]
    Format(String),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

// ── Matrices ────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(x: &CMatrix) -> Self {
        MatrixJson {
            n: x.n(),
            data: x.entries().iter().map(|&z| pair(z)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, IoError> {
        if self.data.len() != self.n * self.n {
            return Err(bad(format!(
                "matrix of order {} needs {} entries, found {}",
                self.n,
                self.n * self.n,
                self.data.len()
            )));
        }
        let entries = self.data.iter().map(|&p| unpair(p)).collect();
        Ok(CMatrix::from_entries(self.n, entries)?)
    }
}

// ── Maps ────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKindJson {
    Linear,
    Conjugate,
}

impl From<MapKind> for MapKindJson {
    fn from(k: MapKind) -> Self {
        match k {
            MapKind::Linear => MapKindJson::Linear,
            MapKind::Conjugate => MapKindJson::Conjugate,
        }
    }
}

impl From<MapKindJson> for MapKind {
    fn from(k: MapKindJson) -> Self {
        match k {
            MapKindJson::Linear => MapKind::Linear,
            MapKindJson::Conjugate => MapKind::Conjugate,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub n: usize,
    pub kind: MapKindJson,
    pub op: Vec<[f64; 2]>,
}

impl MapJson {
    pub fn from_map(f: &MatrixMap) -> Self {
        MapJson {
            n: f.n(),
            kind: f.kind().into(),
            op: f.op().entries().iter().map(|&z| pair(z)).collect(),
        }
    }

    pub fn to_map(&self) -> Result<MatrixMap, IoError> {
        let m = self.n * self.n;
        if self.op.len() != m * m {
            return Err(bad(format!(
                "map on order {} needs {} operator entries, found {}",
                self.n,
                m * m,
                self.op.len()
            )));
        }
        let op = CMatrix::from_entries(m, self.op.iter().map(|&p| unpair(p)).collect())?;
        Ok(MatrixMap::from_op(self.n, self.kind.into(), op)?)
    }
}

// ── Regions ─────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionJson {
    Disk { center: [f64; 2], radius: f64 },
    Halfplane { normal: [f64; 2], offset: f64 },
    Complement { of: Box<RegionJson> },
    Union { of: Vec<RegionJson> },
    Intersection { of: Vec<RegionJson> },
    Singleton { point: [f64; 2], tol: f64 },
}

impl RegionJson {
    pub fn to_region(&self) -> RegionPredicate {
        match self {
            RegionJson::Disk { center, radius } => RegionPredicate::Disk {
                center: unpair(*center),
                radius: *radius,
            },
            RegionJson::Halfplane { normal, offset } => RegionPredicate::Halfplane {
                normal: unpair(*normal),
                offset: *offset,
            },
            RegionJson::Complement { of } => RegionPredicate::Complement(Box::new(of.to_region())),
            RegionJson::Union { of } => {
                RegionPredicate::Union(of.iter().map(|r| r.to_region()).collect())
            }
            RegionJson::Intersection { of } => {
                RegionPredicate::Intersection(of.iter().map(|r| r.to_region()).collect())
            }
            RegionJson::Singleton { point, tol } => RegionPredicate::Singleton {
                point: unpair(*point),
                tol: *tol,
            },
        }
    }
}

// ── Brown measures ──────────────────────────────────────────────────────────

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomJson {
    pub loc: [f64; 2],
    pub num: u64,
    pub den: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureJson {
    pub atoms: Vec<AtomJson>,
}

impl MeasureJson {
    pub fn from_measure(m: &BrownMeasure) -> Self {
        MeasureJson {
            atoms: m
                .atoms()
                .iter()
                .map(|a| AtomJson {
                    loc: pair(a.loc),
                    num: a.num,
                    den: m.den(),
                })
                .collect(),
        }
    }

    pub fn to_measure(&self) -> Result<BrownMeasure, IoError> {
        if self.atoms.is_empty() {
            return Err(bad("measure needs at least one atom"));
        }
        let den = self.atoms.iter().try_fold(1u64, |acc, a| {
            if a.den == 0 {
                Err(bad("atom denominator must be positive"))
            } else {
                Ok(lcm(acc, a.den))
            }
        })?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| BrownAtom {
                loc: unpair(a.loc),
                num: a.num * (den / a.den),
            })
            .collect();
        Ok(BrownMeasure::from_atoms(atoms, den)?)
    }
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

// ── Spectral projections ────────────────────────────────────────────────────

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HsJson {
    pub p: MatrixJson,
    pub trace: AtomFraction,
    pub measure_weight: AtomFraction,
    pub invariance_residual: f64,
    pub inside_spectrum: Vec<[f64; 2]>,
    pub outside_spectrum: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomFraction {
    pub num: u64,
    pub den: u64,
}

impl HsJson {
    pub fn from_result(r: &HSProjectionResult) -> Self {
        let n = r.p.order() as u64;
        HsJson {
            p: MatrixJson::from_matrix(r.p.matrix()),
            trace: AtomFraction {
                num: r.trace_num,
                den: n,
            },
            measure_weight: AtomFraction {
                num: r.mu_b.0,
                den: r.mu_b.1,
            },
            invariance_residual: r.invariance_residual,
            inside_spectrum: r.inside_spectrum.iter().map(|&z| pair(z)).collect(),
            outside_spectrum: r.outside_spectrum.iter().map(|&z| pair(z)).collect(),
        }
    }
}

// ── Canonical forms and decompositions ──────────────────────────────────────

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JordanJson {
    Identity,
    Transpose,
}

impl From<Jordan> for JordanJson {
    fn from(j: Jordan) -> Self {
        match j {
            Jordan::Identity => JordanJson::Identity,
            Jordan::Transpose => JordanJson::Transpose,
        }
    }
}

impl From<JordanJson> for Jordan {
    fn from(j: JordanJson) -> Self {
        match j {
            JordanJson::Identity => Jordan::Identity,
            JordanJson::Transpose => Jordan::Transpose,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormJson {
    pub a: MatrixJson,
    pub b: MatrixJson,
    pub jordan: JordanJson,
    pub conjugated: bool,
}

impl FormJson {
    pub fn from_form(f: &MapForm) -> Self {
        FormJson {
            a: MatrixJson::from_matrix(&f.a),
            b: MatrixJson::from_matrix(&f.b),
            jordan: f.jordan.into(),
            conjugated: f.conjugated,
        }
    }

    pub fn to_form(&self) -> Result<MapForm, IoError> {
        Ok(MapForm {
            a: self.a.to_matrix()?,
            b: self.b.to_matrix()?,
            jordan: self.jordan.into(),
            conjugated: self.conjugated,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub x: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<MatrixJson>,
}

impl WitnessJson {
    pub fn from_witness(w: &Witness) -> Self {
        WitnessJson {
            x: MatrixJson::from_matrix(&w.x),
            y: w.y.as_ref().map(MatrixJson::from_matrix),
        }
    }
}

pub fn classification_str(c: Classification) -> &'static str {
    match c {
        Classification::Isomorphism => "isomorphism",
        Classification::AntiIsomorphism => "anti-isomorphism",
        Classification::NotAnIsometry => "not-an-isometry",
        Classification::NotBijective => "not-bijective",
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub classification: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<FormJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub gauge: String,
    pub probe_seed: u64,
    pub probe_count: usize,
}

impl DecompositionJson {
    pub fn from_result(r: &DecompositionResult, probe_seed: u64, probe_count: usize) -> Self {
        DecompositionJson {
            classification: classification_str(r.classification).to_string(),
            form: r.form.as_ref().map(FormJson::from_form),
            residual: r.residual.is_finite().then_some(r.residual),
            witness: r.witness.as_ref().map(WitnessJson::from_witness),
            gauge: r.gauge.to_string(),
            probe_seed,
            probe_count,
        }
    }
}

// ── Grid output ─────────────────────────────────────────────────────────────

/// One CSV line per cell: center re, center im, mass.
pub fn grid_csv(g: &GridMeasure) -> String {
    let mut out = String::new();
    for i in 0..g.spec.cells {
        for j in 0..g.spec.cells {
            let c = g.spec.center(i, j);
            out.push_str(&format!("{:.15},{:.15},{:.15}\n", c.re, c.im, g.cell(i, j)));
        }
    }
    out
}

/// Parse a `LO:HI:CELLS` grid argument.
pub fn parse_grid(arg: &str) -> Result<opalg_core::fkdet::GridSpec, IoError> {
    let parts: Vec<&str> = arg.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("grid argument must be LO:HI:CELLS"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| bad("grid LO is not a number"))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| bad("grid HI is not a number"))?;
    let cells: usize = parts[2]
        .parse()
        .map_err(|_| bad("grid CELLS is not an integer"))?;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || cells == 0 {
        return Err(bad("grid needs LO < HI and at least one cell"));
    }
    Ok(opalg_core::fkdet::GridSpec { lo, hi, cells })
}

// ── File helpers ────────────────────────────────────────────────────────────

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, IoError> {
    read_json::<MatrixJson>(path)?.to_matrix()
}

pub fn read_map(path: &Path) -> Result<MatrixMap, IoError> {
    read_json::<MapJson>(path)?.to_map()
}

pub fn read_region(path: &Path) -> Result<RegionPredicate, IoError> {
    Ok(read_json::<RegionJson>(path)?.to_region())
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_and_rejection() {
        let x = CMatrix::from_fn(2, |r, c| Complex64::new((r + 1) as f64, c as f64));
        let j = MatrixJson::from_matrix(&x);
        let back = j.to_matrix().unwrap();
        assert_eq!(back.entries(), x.entries());

        let short = MatrixJson {
            n: 2,
            data: vec![[1.0, 0.0]; 3],
        };
        assert!(short.to_matrix().is_err());
        let bad_entry = MatrixJson {
            n: 1,
            data: vec![[f64::NAN, 0.0]],
        };
        assert!(bad_entry.to_matrix().is_err());
    }

    #[test]
    fn map_round_trip() {
        let f = MatrixMap::transpose_map(2);
        let j = MapJson::from_map(&f);
        let text = serde_json::to_string(&j).unwrap();
        let back: MapJson = serde_json::from_str(&text).unwrap();
        let g = back.to_map().unwrap();
        assert_eq!(g.op().entries(), f.op().entries());
        assert_eq!(g.kind(), MapKind::Linear);
    }

    #[test]
    fn region_json_recursive() {
        let text = r#"{"kind":"complement","of":{"kind":"disk","center":[0.0,0.0],"radius":1.0}}"#;
        let r: RegionJson = serde_json::from_str(text).unwrap();
        let region = r.to_region();
        assert!(!region.contains(Complex64::new(0.5, 0.0)));
        assert!(region.contains(Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn measure_common_denominator() {
        let j = MeasureJson {
            atoms: vec![
                AtomJson {
                    loc: [0.0, 0.0],
                    num: 1,
                    den: 2,
                },
                AtomJson {
                    loc: [1.0, 0.0],
                    num: 1,
                    den: 3,
                },
                AtomJson {
                    loc: [2.0, 0.0],
                    num: 1,
                    den: 6,
                },
            ],
        };
        let m = j.to_measure().unwrap();
        assert_eq!(m.den(), 6);
        assert_eq!(m.atoms().iter().map(|a| a.num).sum::<u64>(), 6);
    }

    #[test]
    fn grid_spec_parsing() {
        let g = parse_grid("-2.0:2.0:32").unwrap();
        assert_eq!(g.cells, 32);
        assert!(parse_grid("1:0:4").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a:1:4").is_err());
    }
}
