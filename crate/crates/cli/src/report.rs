//! JSON report structures. Every run emits a single document with a
//! `meta` block so the numbers are reproducible from the report alone.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

use rotcp::invariants::InvariantValues;
use rotcp::AlgebraContext;

#[derive(Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<(i64, i64)>,
    pub tolerances: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Meta {
    pub fn new(command: &str, ctx: &AlgebraContext) -> Self {
        Self {
            tool: "rotcp",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            theta: ctx.theta(),
            rational: ctx.rational_mode(),
            tolerances: BTreeMap::new(),
            note: None,
        }
    }

    pub fn tol(mut self, name: &'static str, value: f64) -> Self {
        self.tolerances.insert(name, value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Serialize)]
pub struct IndexedValue {
    pub index: [i64; 4],
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct PolyCoeff {
    pub pow: (i64, i64),
    pub re: f64,
    pub im: f64,
}

pub fn poly_coeffs(poly: &BTreeMap<(i64, i64), Complex64>) -> Vec<PolyCoeff> {
    poly.iter()
        .map(|(&pow, &c)| PolyCoeff {
            pow,
            re: c.re,
            im: c.im,
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct StateReport {
    pub meta: Meta,
    pub box_radius: i64,
    pub values: Vec<IndexedValue>,
}

#[derive(Debug, Serialize)]
pub struct DensityEntry {
    pub k: (i64, i64),
    pub support_bound: i64,
    pub density: Vec<PolyCoeff>,
}

#[derive(Debug, Serialize)]
pub struct ExtendibleReport {
    pub meta: Meta,
    pub k_radius: i64,
    pub verdict: &'static str,
    pub entries: Vec<DensityEntry>,
}

#[derive(Debug, Serialize)]
pub struct RnReport {
    pub meta: Meta,
    pub k: (i64, i64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Vec<PolyCoeff>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<PolyCoeff>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct InvariantsBlock {
    pub cutoff: i64,
    pub basis_size: usize,
    pub herm_residual: f64,
    pub heat: Vec<f64>,
    pub proj_spectral: f64,
    pub proj_lsq: f64,
    pub lsq_singular_system: bool,
    pub lsq_rank: usize,
}

impl From<&InvariantValues> for InvariantsBlock {
    fn from(v: &InvariantValues) -> Self {
        Self {
            cutoff: v.cutoff,
            basis_size: v.basis_size,
            herm_residual: v.herm_residual,
            heat: v.heat.clone(),
            proj_spectral: v.proj_spectral,
            proj_lsq: v.proj_lsq.value,
            lsq_singular_system: v.proj_lsq.singular_system,
            lsq_rank: v.proj_lsq.rank,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InvariantsReport {
    pub meta: Meta,
    pub t_list: Vec<f64>,
    pub current: InvariantsBlock,
    pub previous: InvariantsBlock,
    /// Largest absolute difference between the cutoff and cutoff−1 values.
    pub cutoff_drift: f64,
}

#[derive(Debug, Serialize)]
pub struct EquivReport {
    pub meta: Meta,
    pub unitary: (i64, i64),
    pub t_list: Vec<f64>,
    pub original: InvariantsBlock,
    pub conjugated: InvariantsBlock,
    pub max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct RelationResidual {
    pub relation: String,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct RepReport {
    pub meta: Meta,
    pub multiplicity: usize,
    pub points: usize,
    pub unitarity_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<RelationResidual>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equiv_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CommutantBlock {
    pub cutoff: i64,
    pub quotient_rank: usize,
    pub dimension: usize,
}

#[derive(Debug, Serialize)]
pub struct PurityReport {
    pub meta: Meta,
    pub caveat: &'static str,
    pub lower: CommutantBlock,
    pub upper: CommutantBlock,
    pub stable: bool,
    pub evidence: String,
}
