//! Uniform-multiplicity irreducible representations of the four-generator
//! algebra on L²(T², ν) ⊗ ℂ^m, built from a multiplicity m, a quasi-invariant
//! measure ν and two unitary cocycle fields b₁, b₂.
//!
//! On a function f : T² → ℂ^m the generators act by
//!
//!   (π(W₁)f)(z) = z₁ f(z)
//!   (π(W₂)f)(z) = z₂ f(z)
//!   (π(W₃)f)(z) = b₁(z) √(dν₁/dν)(z) · f(λz₁, z₂)
//!   (π(W₄)f)(z) = b₂(z) √(dν₂/dν)(z) · f(z₁, λ̄z₂),
//!
//! where νᵢ are the translates of ν along the two shifts. The shift
//! directions are fixed by the relations the generator dictionary of
//! [`crate::biweyl`] satisfies (W₃W₁ = λW₁W₃ and W₂W₄ = λW₄W₂): with these
//! actions both hold for every choice of cocycle data, and the relation
//! residual is a pure data check.
//!
//! The verification workhorse is RATIONAL_GRID mode: with θ = p/q and ν the
//! uniform measure on the q×q grid of q-th roots of unity, both shifts are
//! exact permutations of the grid and all residuals close to machine
//! precision. Irrational θ is supported through SAMPLED mode with
//! user-supplied points, weights and Radon–Nikodym ratio tables; ergodicity
//! of ν is the user's assertion and is never tested here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::biweyl::{eta_word_exp, BiIdx, WGen};
use crate::context::AlgebraContext;
use crate::error::CoreError;
use crate::linalg;

/// Tolerance for cocycle unitarity and measure matching.
pub const COCYCLE_TOL: f64 = 1e-10;

/// Tolerance for locating shifted sample points.
pub const POINT_MATCH_TOL: f64 = 1e-9;

/// Measure data resolved to points, weights, Radon–Nikodym ratios and the
/// two shift permutations.
#[derive(Debug, Clone)]
pub struct Measure {
    pub points: Vec<(Complex64, Complex64)>,
    pub weights: Vec<f64>,
    /// dν₁/dν at each point (shift z₁ ↦ λz₁).
    pub rn1: Vec<f64>,
    /// dν₂/dν at each point (shift z₂ ↦ λ̄z₂).
    pub rn2: Vec<f64>,
    /// Index of (λz₁, z₂) for each point.
    pub shift1: Vec<usize>,
    /// Index of (z₁, λ̄z₂) for each point.
    pub shift2: Vec<usize>,
}

impl Measure {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Uniform measure on the q×q grid of q-th roots of unity, points in
    /// lexicographic (i, j) order; the rotation by λ = e^{2πip/q} permutes
    /// the grid exactly.
    pub fn rational_grid(p: i64, q: i64) -> Result<Self, CoreError> {
        let ctx = AlgebraContext::rational(p, q)?;
        let q = q as usize;
        let n = q * q;
        let mut points = Vec::with_capacity(n);
        for i in 0..q {
            for j in 0..q {
                let a1 = TAU * i as f64 / q as f64;
                let a2 = TAU * j as f64 / q as f64;
                points.push((
                    Complex64::new(a1.cos(), a1.sin()),
                    Complex64::new(a2.cos(), a2.sin()),
                ));
            }
        }
        let p = ctx.rational_mode().unwrap().0 as usize;
        let mut shift1 = Vec::with_capacity(n);
        let mut shift2 = Vec::with_capacity(n);
        for i in 0..q {
            for j in 0..q {
                shift1.push(((i + p) % q) * q + j);
                shift2.push(i * q + (j + q - p) % q);
            }
        }
        Ok(Self {
            points,
            weights: vec![1.0 / n as f64; n],
            rn1: vec![1.0; n],
            rn2: vec![1.0; n],
            shift1,
            shift2,
        })
    }

    /// Sampled measure with user-supplied Radon–Nikodym tables. The shift
    /// images are located in the point list within [`POINT_MATCH_TOL`];
    /// a shifted point outside the support fails with
    /// [`CoreError::NonQuasiInvariant`].
    pub fn sampled(
        ctx: &AlgebraContext,
        points: Vec<(Complex64, Complex64)>,
        weights: Vec<f64>,
        rn1: Vec<f64>,
        rn2: Vec<f64>,
    ) -> Result<Self, CoreError> {
        let n = points.len();
        if weights.len() != n || rn1.len() != n || rn2.len() != n {
            return Err(CoreError::InvalidSpec {
                reason: "points, weights and ratio tables must have equal length".into(),
            });
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w <= 0.0) || (total - 1.0).abs() > 1e-8 {
            return Err(CoreError::InvalidSpec {
                reason: "weights must be positive and sum to 1".into(),
            });
        }
        if rn1.iter().chain(rn2.iter()).any(|&r| r <= 0.0) {
            return Err(CoreError::InvalidSpec {
                reason: "Radon-Nikodym ratios must be positive".into(),
            });
        }
        let lambda = ctx.lambda();
        let locate = |target: (Complex64, Complex64), origin: usize| -> Result<usize, CoreError> {
            points
                .iter()
                .position(|&(z1, z2)| {
                    (z1 - target.0).norm() < POINT_MATCH_TOL
                        && (z2 - target.1).norm() < POINT_MATCH_TOL
                })
                .ok_or(CoreError::NonQuasiInvariant { point: origin })
        };
        let mut shift1 = Vec::with_capacity(n);
        let mut shift2 = Vec::with_capacity(n);
        for (i, &(z1, z2)) in points.iter().enumerate() {
            shift1.push(locate((lambda * z1, z2), i)?);
            shift2.push(locate((z1, lambda.conj() * z2), i)?);
        }
        let out = Self {
            points,
            weights,
            rn1,
            rn2,
            shift1,
            shift2,
        };
        out.validate_chain()?;
        Ok(out)
    }

    /// Atomic chain consistency: the ratio tables must satisfy
    /// rᵢ(z) · w(z) = w(shiftᵢ z), which is exactly what makes the weighted
    /// shifts unitary.
    fn validate_chain(&self) -> Result<(), CoreError> {
        for i in 0..self.len() {
            let c1 = (self.rn1[i] * self.weights[i] - self.weights[self.shift1[i]]).abs();
            let c2 = (self.rn2[i] * self.weights[i] - self.weights[self.shift2[i]]).abs();
            if c1 > 1e-8 || c2 > 1e-8 {
                return Err(CoreError::InvalidSpec {
                    reason: format!(
                        "Radon-Nikodym chain inconsistency at point {i}: {c1:.3e}, {c2:.3e}"
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a.0 - b.0).norm() < POINT_MATCH_TOL && (a.1 - b.1).norm() < POINT_MATCH_TOL)
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() < POINT_MATCH_TOL)
    }
}

/// Representation data: multiplicity, measure and the two cocycle fields
/// (one m×m unitary per point per generator).
#[derive(Debug, Clone)]
pub struct RepSpec {
    pub m: usize,
    pub measure: Measure,
    pub b1: Vec<DMatrix<Complex64>>,
    pub b2: Vec<DMatrix<Complex64>>,
}

impl RepSpec {
    /// Cocycle fields constantly the identity.
    pub fn with_trivial_cocycles(m: usize, measure: Measure) -> Self {
        let n = measure.len();
        let eye = DMatrix::<Complex64>::identity(m, m);
        Self {
            m,
            measure,
            b1: vec![eye.clone(); n],
            b2: vec![eye; n],
        }
    }

    fn validate(&self) -> Result<(), CoreError> {
        let n = self.measure.len();
        if self.b1.len() != n || self.b2.len() != n {
            return Err(CoreError::InvalidSpec {
                reason: "cocycle tables must have one matrix per point".into(),
            });
        }
        for (gen, field) in [(1usize, &self.b1), (2usize, &self.b2)] {
            for (pt, b) in field.iter().enumerate() {
                if b.nrows() != self.m || b.ncols() != self.m {
                    return Err(CoreError::InvalidSpec {
                        reason: format!("cocycle b{gen} at point {pt} is not {0}x{0}", self.m),
                    });
                }
                let residual = linalg::operator_norm(
                    &(b.adjoint() * b - DMatrix::<Complex64>::identity(self.m, self.m)),
                );
                if residual >= COCYCLE_TOL {
                    return Err(CoreError::NonUnitaryCocycle {
                        generator: gen,
                        point: pt,
                        residual,
                    });
                }
            }
        }
        Ok(())
    }

    /// Gauge transform by a unitary field W: b̃ᵢ(z) = W(z) bᵢ(z) W(shiftᵢ z)*.
    /// The result is cocycle-equivalent to `self` with intertwiner W.
    pub fn gauge(&self, w: &[DMatrix<Complex64>]) -> Result<RepSpec, CoreError> {
        if w.len() != self.measure.len() {
            return Err(CoreError::InvalidSpec {
                reason: "gauge field must have one matrix per point".into(),
            });
        }
        let b1 = (0..self.measure.len())
            .map(|i| &w[i] * &self.b1[i] * w[self.measure.shift1[i]].adjoint())
            .collect();
        let b2 = (0..self.measure.len())
            .map(|i| &w[i] * &self.b2[i] * w[self.measure.shift2[i]].adjoint())
            .collect();
        Ok(RepSpec {
            m: self.m,
            measure: self.measure.clone(),
            b1,
            b2,
        })
    }
}

/// The four representation matrices, acting on ℂ^{m·#points} with one
/// m-block per measure point.
#[derive(Debug, Clone)]
pub struct RepMatrices {
    pub w: [DMatrix<Complex64>; 4],
    pub m: usize,
    pub points: usize,
}

impl RepMatrices {
    pub fn dim(&self) -> usize {
        self.m * self.points
    }

    /// Largest deviation of the four matrices from unitarity, in operator
    /// norm.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let eye = DMatrix::<Complex64>::identity(n, n);
        self.w
            .iter()
            .map(|w| linalg::operator_norm(&(w.adjoint() * w - &eye)))
            .fold(0.0, f64::max)
    }
}

/// Build the four matrices of the representation defined by the spec.
pub fn build_rep(spec: &RepSpec) -> Result<RepMatrices, CoreError> {
    spec.validate()?;
    let m = spec.m;
    let npts = spec.measure.len();
    let n = m * npts;
    let mut w1 = DMatrix::<Complex64>::zeros(n, n);
    let mut w2 = DMatrix::<Complex64>::zeros(n, n);
    let mut w3 = DMatrix::<Complex64>::zeros(n, n);
    let mut w4 = DMatrix::<Complex64>::zeros(n, n);
    for pt in 0..npts {
        let (z1, z2) = spec.measure.points[pt];
        for r in 0..m {
            w1[(pt * m + r, pt * m + r)] = z1;
            w2[(pt * m + r, pt * m + r)] = z2;
        }
        let s1 = spec.measure.shift1[pt];
        let s2 = spec.measure.shift2[pt];
        let f1 = Complex64::new(spec.measure.rn1[pt].sqrt(), 0.0);
        let f2 = Complex64::new(spec.measure.rn2[pt].sqrt(), 0.0);
        for r in 0..m {
            for c in 0..m {
                w3[(pt * m + r, s1 * m + c)] = f1 * spec.b1[pt][(r, c)];
                w4[(pt * m + r, s2 * m + c)] = f2 * spec.b2[pt][(r, c)];
            }
        }
    }
    Ok(RepMatrices {
        w: [w1, w2, w3, w4],
        m,
        points: npts,
    })
}

/// Labeled residuals of the six defining relations.
pub fn relation_residuals(reps: &RepMatrices, ctx: &AlgebraContext) -> Vec<(String, f64)> {
    let lambda = ctx.lambda();
    let [w1, w2, w3, w4] = &reps.w;
    let comm = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| -> f64 {
        linalg::operator_norm(&(a * b - b * a))
    };
    vec![
        ("W1W2 = W2W1".into(), comm(w1, w2)),
        ("W3W4 = W4W3".into(), comm(w3, w4)),
        ("W2W3 = W3W2".into(), comm(w2, w3)),
        ("W1W4 = W4W1".into(), comm(w1, w4)),
        (
            "W3W1 = lambda W1W3".into(),
            linalg::operator_norm(&(w3 * w1 - (w1 * w3).scale_complex(lambda))),
        ),
        (
            "W2W4 = lambda W4W2".into(),
            linalg::operator_norm(&(w2 * w4 - (w4 * w2).scale_complex(lambda))),
        ),
    ]
}

/// Maximum residual over the defining relations.
pub fn relations_residual(reps: &RepMatrices, ctx: &AlgebraContext) -> f64 {
    relation_residuals(reps, ctx)
        .into_iter()
        .map(|(_, r)| r)
        .fold(0.0, f64::max)
}

trait ScaleComplex {
    fn scale_complex(&self, c: Complex64) -> Self;
}

impl ScaleComplex for DMatrix<Complex64> {
    fn scale_complex(&self, c: Complex64) -> Self {
        self.map(|x| x * c)
    }
}

/// Cocycle-equivalence residual: max over points and both generators of
/// ‖W(z) bᵢ(z) − b̃ᵢ(z) W(shiftᵢ z)‖. Zero certifies that the unitary field
/// W intertwines the two representations.
pub fn cocycle_equiv_residual(
    spec1: &RepSpec,
    spec2: &RepSpec,
    w_table: &[DMatrix<Complex64>],
) -> Result<f64, CoreError> {
    if spec1.m != spec2.m {
        return Err(CoreError::MeasureMismatch {
            reason: format!("multiplicity {} vs {}", spec1.m, spec2.m),
        });
    }
    if !spec1.measure.approx_eq(&spec2.measure) {
        return Err(CoreError::MeasureMismatch {
            reason: "measures differ".into(),
        });
    }
    if w_table.len() != spec1.measure.len() {
        return Err(CoreError::InvalidSpec {
            reason: "intertwiner field must have one matrix per point".into(),
        });
    }
    let mut worst: f64 = 0.0;
    for i in 0..spec1.measure.len() {
        let r1 = linalg::operator_norm(
            &(&w_table[i] * &spec1.b1[i] - &spec2.b1[i] * &w_table[spec1.measure.shift1[i]]),
        );
        let r2 = linalg::operator_norm(
            &(&w_table[i] * &spec1.b2[i] - &spec2.b2[i] * &w_table[spec1.measure.shift2[i]]),
        );
        worst = worst.max(r1).max(r2);
    }
    Ok(worst)
}

/// ψ-value table ψ(x) = ⟨e, π(x) e⟩ over Z⁴ monomials with |hᵢ| ≤ radius.
///
/// A monomial W(h) factors through the generator dictionary as
/// λ^{−e} · W₁^{m₁}W₂^{m₂}W₃^{k₁}W₄^{k₂} with m = (h₁+h₃, h₂+h₄),
/// k = (−h₂, h₃) and e the exact reorder exponent, so its image is a
/// product of the four representation matrices.
pub fn state_from_rep(
    reps: &RepMatrices,
    ctx: &AlgebraContext,
    e: &DVector<Complex64>,
    radius: i64,
) -> BTreeMap<BiIdx, Complex64> {
    let mut out = BTreeMap::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            for c in -radius..=radius {
                for d in -radius..=radius {
                    let h = [a, b, c, d];
                    let m = (h[0] + h[2], h[1] + h[3]);
                    let k = (-h[1], h[2]);
                    let word = [
                        (WGen::W1, m.0),
                        (WGen::W2, m.1),
                        (WGen::W3, k.0),
                        (WGen::W4, k.1),
                    ];
                    let (exp, idx) = eta_word_exp(&word);
                    debug_assert_eq!(idx, h);
                    let mut v = e.clone();
                    // apply right-to-left
                    for &(g, pw) in word.iter().rev() {
                        v = apply_power(&reps.w[g as usize], &v, pw);
                    }
                    let val = ctx.lambda_pow(-exp) * e.dotc(&v);
                    out.insert(h, val);
                }
            }
        }
    }
    out
}

fn apply_power(w: &DMatrix<Complex64>, v: &DVector<Complex64>, n: i64) -> DVector<Complex64> {
    let mut out = v.clone();
    if n >= 0 {
        for _ in 0..n {
            out = w * out;
        }
    } else {
        let adj = w.adjoint();
        for _ in 0..(-n) {
            out = &adj * out;
        }
    }
    out
}

/// Normalized constant vector, the default cyclic vector for grid tests.
pub fn uniform_vector(reps: &RepMatrices, measure: &Measure) -> DVector<Complex64> {
    let n = reps.dim();
    let mut v = DVector::<Complex64>::zeros(n);
    for pt in 0..reps.points {
        let w = measure.weights[pt].sqrt();
        v[pt * reps.m] = Complex64::new(w, 0.0);
    }
    v
}

// --- JSON file format ------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpxJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for CpxJson {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<&CpxJson> for Complex64 {
    fn from(c: &CpxJson) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledJson {
    pub points: Vec<PointJson>,
    pub weights: Vec<f64>,
    pub rn1: Vec<f64>,
    pub rn2: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointJson {
    pub z1: CpxJson,
    pub z2: CpxJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ModeJson {
    #[serde(rename = "grid")]
    Grid { p: i64, q: i64 },
    #[serde(rename = "sampled")]
    Sampled(SampledJson),
}

/// On-disk representation spec: matrices stored row-major per point, points
/// ordered lexicographically (grid mode) or as listed (sampled mode).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepSpecFile {
    pub m: usize,
    pub mode: ModeJson,
    pub b1: Vec<Vec<CpxJson>>,
    pub b2: Vec<Vec<CpxJson>>,
}

impl RepSpecFile {
    pub fn to_spec(&self) -> Result<(RepSpec, AlgebraContext), CoreError> {
        let (measure, ctx) = match &self.mode {
            ModeJson::Grid { p, q } => {
                let ctx = AlgebraContext::rational(*p, *q)?;
                (Measure::rational_grid(*p, *q)?, ctx)
            }
            ModeJson::Sampled(s) => {
                let ctx = AlgebraContext::golden();
                let points = s
                    .points
                    .iter()
                    .map(|p| (Complex64::from(&p.z1), Complex64::from(&p.z2)))
                    .collect();
                (
                    Measure::sampled(&ctx, points, s.weights.clone(), s.rn1.clone(), s.rn2.clone())?,
                    ctx,
                )
            }
        };
        let parse_field = |field: &[Vec<CpxJson>], name: &str| -> Result<Vec<DMatrix<Complex64>>, CoreError> {
            if field.len() != measure.len() {
                return Err(CoreError::InvalidSpec {
                    reason: format!("{name} must have one matrix per point"),
                });
            }
            field
                .iter()
                .enumerate()
                .map(|(i, entries)| {
                    if entries.len() != self.m * self.m {
                        return Err(CoreError::InvalidSpec {
                            reason: format!("{name}[{i}] must have m*m = {} entries", self.m * self.m),
                        });
                    }
                    Ok(DMatrix::from_row_iterator(
                        self.m,
                        self.m,
                        entries.iter().map(Complex64::from),
                    ))
                })
                .collect()
        };
        let b1 = parse_field(&self.b1, "b1")?;
        let b2 = parse_field(&self.b2, "b2")?;
        let spec = RepSpec {
            m: self.m,
            measure,
            b1,
            b2,
        };
        Ok((spec, ctx))
    }

    pub fn from_spec(spec: &RepSpec, mode: ModeJson) -> Self {
        let dump = |field: &[DMatrix<Complex64>]| -> Vec<Vec<CpxJson>> {
            field
                .iter()
                .map(|m| {
                    let mut row_major = Vec::with_capacity(m.nrows() * m.ncols());
                    for r in 0..m.nrows() {
                        for c in 0..m.ncols() {
                            row_major.push(CpxJson::from(m[(r, c)]));
                        }
                    }
                    row_major
                })
                .collect()
        };
        Self {
            m: spec.m,
            mode,
            b1: dump(&spec.b1),
            b2: dump(&spec.b2),
        }
    }
}

/// Unitary-field file for gauge/equivalence checks: one row-major m×m
/// matrix per point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WTableFile {
    pub w: Vec<Vec<CpxJson>>,
}

impl WTableFile {
    pub fn to_matrices(&self, m: usize) -> Result<Vec<DMatrix<Complex64>>, CoreError> {
        self.w
            .iter()
            .enumerate()
            .map(|(i, entries)| {
                if entries.len() != m * m {
                    return Err(CoreError::InvalidSpec {
                        reason: format!("w[{i}] must have m*m = {} entries", m * m),
                    });
                }
                Ok(DMatrix::from_row_iterator(
                    m,
                    m,
                    entries.iter().map(Complex64::from),
                ))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_spec(p: i64, q: i64, m: usize) -> RepSpec {
        RepSpec::with_trivial_cocycles(m, Measure::rational_grid(p, q).unwrap())
    }

    #[test]
    fn trivial_cocycle_grid_rep_is_unitary_with_exact_relations() {
        let ctx = AlgebraContext::rational(2, 5).unwrap();
        let spec = grid_spec(2, 5, 1);
        let reps = build_rep(&spec).unwrap();
        assert!(reps.unitarity_residual() < 1e-10);
        // W3, W4 are pure permutation matrices here
        for w in [&reps.w[2], &reps.w[3]] {
            for v in w.iter() {
                assert!(v.norm() < 1e-15 || (v.norm() - 1.0).abs() < 1e-15);
            }
        }
        assert!(relations_residual(&reps, &ctx) < 1e-12);
    }

    #[test]
    fn scalar_cocycle_still_unitary_and_consistent() {
        let ctx = AlgebraContext::rational(1, 5).unwrap();
        let mut spec = grid_spec(1, 5, 1);
        // b₁(z) = z₁
        for (i, b) in spec.b1.iter_mut().enumerate() {
            b[(0, 0)] = spec.measure.points[i].0;
        }
        let reps = build_rep(&spec).unwrap();
        assert!(reps.unitarity_residual() < 1e-10);
        assert!(relations_residual(&reps, &ctx) < 1e-12);
    }

    #[test]
    fn constant_commuting_cocycles_at_multiplicity_two() {
        let ctx = AlgebraContext::rational(3, 7).unwrap();
        let mut spec = grid_spec(3, 7, 2);
        let phase = |t: f64| Complex64::new(t.cos(), t.sin());
        let b1 = DMatrix::from_diagonal(&DVector::from_vec(vec![phase(0.3), phase(-1.1)]));
        let b2 = DMatrix::from_diagonal(&DVector::from_vec(vec![phase(2.0), phase(0.7)]));
        for i in 0..spec.measure.len() {
            spec.b1[i] = b1.clone();
            spec.b2[i] = b2.clone();
        }
        let reps = build_rep(&spec).unwrap();
        assert!(reps.unitarity_residual() < 1e-10);
        assert!(relations_residual(&reps, &ctx) < 1e-12);
    }

    #[test]
    fn identity_matrices_fail_the_lambda_relation() {
        let ctx = AlgebraContext::rational(2, 5).unwrap();
        let n = 4;
        let eye = DMatrix::<Complex64>::identity(n, n);
        let reps = RepMatrices {
            w: [eye.clone(), eye.clone(), eye.clone(), eye],
            m: 1,
            points: n,
        };
        let residuals = relation_residuals(&reps, &ctx);
        let expected = (ctx.lambda() - Complex64::new(1.0, 0.0)).norm();
        assert!((residuals[4].1 - expected).abs() < 1e-12);
        assert!((residuals[5].1 - expected).abs() < 1e-12);
        for r in &residuals[..4] {
            assert!(r.1 < 1e-15);
        }
    }

    #[test]
    fn perturbed_matrices_are_detected() {
        let ctx = AlgebraContext::rational(2, 5).unwrap();
        let spec = grid_spec(2, 5, 1);
        let mut reps = build_rep(&spec).unwrap();
        // 1e-3 non-unitary noise on W3
        reps.w[2][(0, 0)] += Complex64::new(1e-3, 0.0);
        let res = relations_residual(&reps, &ctx);
        assert!(res >= 1e-4, "detector too weak: {res:.3e}");
    }

    #[test]
    fn non_unitary_cocycle_rejected() {
        let mut spec = grid_spec(2, 5, 1);
        spec.b1[3][(0, 0)] = Complex64::new(1.1, 0.0);
        assert!(matches!(
            build_rep(&spec),
            Err(CoreError::NonUnitaryCocycle {
                generator: 1,
                point: 3,
                ..
            })
        ));
    }

    #[test]
    fn cocycle_equivalence_identity_and_gauge() {
        let spec = grid_spec(2, 5, 2);
        let n = spec.measure.len();
        let eye = DMatrix::<Complex64>::identity(2, 2);
        let w_id = vec![eye; n];
        assert_eq!(cocycle_equiv_residual(&spec, &spec, &w_id).unwrap(), 0.0);

        // random-ish unitary field: diagonal phases varying over points
        let w: Vec<DMatrix<Complex64>> = (0..n)
            .map(|i| {
                let a = 0.37 * i as f64;
                let b = -0.91 * i as f64 + 0.2;
                DMatrix::from_diagonal(&DVector::from_vec(vec![
                    Complex64::new(a.cos(), a.sin()),
                    Complex64::new(b.cos(), b.sin()),
                ]))
            })
            .collect();
        let gauged = spec.gauge(&w).unwrap();
        let res = cocycle_equiv_residual(&spec, &gauged, &w).unwrap();
        assert!(res < 1e-12, "gauge residual {res:.3e}");
        // the gauged spec still builds a representation with exact relations
        let ctx = AlgebraContext::rational(2, 5).unwrap();
        let reps = build_rep(&gauged).unwrap();
        assert!(relations_residual(&reps, &ctx) < 1e-12);
    }

    #[test]
    fn flipped_sign_on_one_point_is_inequivalent_data() {
        let spec = grid_spec(2, 5, 1);
        let mut flipped = spec.clone();
        flipped.b1[7] = flipped.b1[7].map(|x| -x);
        let n = spec.measure.len();
        let w_id = vec![DMatrix::<Complex64>::identity(1, 1); n];
        let res = cocycle_equiv_residual(&spec, &flipped, &w_id).unwrap();
        assert!((res - 2.0).abs() < 1e-12);
    }

    #[test]
    fn measure_mismatch_detected() {
        let a = grid_spec(2, 5, 1);
        let b = grid_spec(2, 7, 1);
        let w_id = vec![DMatrix::<Complex64>::identity(1, 1); a.measure.len()];
        assert!(matches!(
            cocycle_equiv_residual(&a, &b, &w_id),
            Err(CoreError::MeasureMismatch { .. })
        ));
        let c = grid_spec(2, 5, 2);
        let w2 = vec![DMatrix::<Complex64>::identity(2, 2); c.measure.len()];
        assert!(matches!(
            cocycle_equiv_residual(&c, &a, &w2),
            Err(CoreError::MeasureMismatch { .. })
        ));
    }

    #[test]
    fn state_from_rep_basics() {
        let ctx = AlgebraContext::rational(2, 5).unwrap();
        let spec = grid_spec(2, 5, 1);
        let reps = build_rep(&spec).unwrap();
        let e = uniform_vector(&reps, &spec.measure);
        let table = state_from_rep(&reps, &ctx, &e, 1);
        // ψ(identity) = 1
        assert!((table[&[0, 0, 0, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // ψ(W₁ image) = mean of z₁ over the grid = 0
        assert!(table[&[1, 0, 0, 0]].norm() < 1e-12);
    }

    #[test]
    fn gauge_equivalent_specs_give_identical_state_tables() {
        let ctx = AlgebraContext::rational(2, 5).unwrap();
        let spec = grid_spec(2, 5, 1);
        let n = spec.measure.len();
        let w: Vec<DMatrix<Complex64>> = (0..n)
            .map(|i| {
                let a = 1.13 * i as f64 - 0.4;
                DMatrix::from_element(1, 1, Complex64::new(a.cos(), a.sin()))
            })
            .collect();
        let gauged = spec.gauge(&w).unwrap();
        let reps = build_rep(&spec).unwrap();
        let reps_g = build_rep(&gauged).unwrap();
        let e = uniform_vector(&reps, &spec.measure);
        // transport the cyclic vector by the pointwise intertwiner
        let mut e_g = e.clone();
        for pt in 0..n {
            e_g[pt] = w[pt][(0, 0)] * e[pt];
        }
        let t1 = state_from_rep(&reps, &ctx, &e, 1);
        let t2 = state_from_rep(&reps_g, &ctx, &e_g, 1);
        for (h, v) in &t1 {
            assert!((t2[h] - v).norm() < 1e-11, "mismatch at {h:?}");
        }
    }

    #[test]
    fn sampled_measure_on_orbit_works() {
        // a λ-orbit of length q in one coordinate is exactly a grid column
        let ctx = AlgebraContext::rational(1, 5).unwrap();
        let lambda = ctx.lambda();
        let mut points = Vec::new();
        let mut z = Complex64::new(1.0, 0.0);
        for _ in 0..5 {
            points.push((z, Complex64::new(1.0, 0.0)));
            z *= lambda;
        }
        // z₂-shift must also stay in support: z₂ = 1 is fixed only if λ̄·1
        // is in the list, which it is (the orbit in z₂ degenerates to the
        // same set only for the full grid) — use the product grid instead
        let mut grid_points = Vec::new();
        for &(z1, _) in &points {
            for &(z2, _) in &points {
                grid_points.push((z1, z2));
            }
        }
        let n = grid_points.len();
        let measure = Measure::sampled(
            &ctx,
            grid_points,
            vec![1.0 / n as f64; n],
            vec![1.0; n],
            vec![1.0; n],
        )
        .unwrap();
        let spec = RepSpec::with_trivial_cocycles(1, measure);
        let reps = build_rep(&spec).unwrap();
        assert!(reps.unitarity_residual() < 1e-10);
        assert!(relations_residual(&reps, &ctx) < 1e-11);
    }

    #[test]
    fn sampled_measure_missing_shift_image_fails() {
        let ctx = AlgebraContext::golden();
        let points = vec![(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))];
        let err = Measure::sampled(&ctx, points, vec![1.0], vec![1.0], vec![1.0]);
        assert!(matches!(err, Err(CoreError::NonQuasiInvariant { point: 0 })));
    }

    #[test]
    fn sampled_measure_chain_inconsistency_fails() {
        // valid orbit structure but a wrong ratio table
        let ctx = AlgebraContext::rational(1, 3).unwrap();
        let lambda = ctx.lambda();
        let mut pts = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let z1 = lambda.powi(i);
                let z2 = lambda.powi(j);
                pts.push((z1, z2));
            }
        }
        let n = pts.len();
        let mut rn1 = vec![1.0; n];
        rn1[0] = 2.0;
        let err = Measure::sampled(&ctx, pts, vec![1.0 / n as f64; n], rn1, vec![1.0; n]);
        assert!(matches!(err, Err(CoreError::InvalidSpec { .. })));
    }

    #[test]
    fn rep_spec_file_round_trip() {
        let spec = grid_spec(2, 5, 2);
        let file = RepSpecFile::from_spec(&spec, ModeJson::Grid { p: 2, q: 5 });
        let json = serde_json::to_string(&file).unwrap();
        let parsed: RepSpecFile = serde_json::from_str(&json).unwrap();
        let (spec2, ctx) = parsed.to_spec().unwrap();
        assert_eq!(spec2.m, 2);
        assert_eq!(spec2.measure.len(), 25);
        let reps = build_rep(&spec2).unwrap();
        assert!(relations_residual(&reps, &ctx) < 1e-12);
    }
}
