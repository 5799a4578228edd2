//! Numerical invariants from truncated operator representations of D_T:
//! heat traces ⟨ξ₀, e^{−tD_T} ξ₀⟩ and the range-projection trace
//! ⟨ξ₀, P_T ξ₀⟩ computed by two independent routes (spectral thresholding
//! and least squares).
//!
//! The truncation basis is the set of Z⁴ monomials with total degree
//! |h₁|+|h₂|+|h₃|+|h₄| ≤ cutoff, an orthonormal family in L²(τ⁽²⁾). The
//! operator is right multiplication by d_T, so every matrix entry is exact:
//!
//!   ⟨W(g), W(h) d_T⟩ = λ-phase · β_{g−h},
//!
//! a Toeplitz-type structure in the Z⁴ index. Truncation enters only through
//! the choice of basis box, which is why reports always carry the previous
//! cutoff alongside: the drift between cutoffs is the honest error bar.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::OnceLock;

use crate::biweyl::{bi_mono_adjoint_exp, bi_mono_mul_exp, BiIdx, BiWeylElement};
use crate::cpmap::CpMap;
use crate::error::CoreError;
use crate::linalg;
use crate::rn::{self, RnDerivative};
use crate::weyl::WeylElement;

/// Hard limit on the symmetrization residual; beyond it the spectral
/// routines refuse to interpret the matrix.
pub const HERMITIAN_TOL: f64 = 1e-6;

/// Eigenvalues in (−CLAMP_TOL, 0) are treated as zero in heat traces;
/// the untruncated operator is positive.
pub const CLAMP_TOL: f64 = 1e-8;

/// Default spectral threshold for the range projection.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Z⁴ monomial indices with total degree ≤ cutoff, in lexicographic order.
pub fn l1_ball(cutoff: i64) -> Vec<BiIdx> {
    let mut out = Vec::new();
    for a in -cutoff..=cutoff {
        for b in -cutoff..=cutoff {
            for c in -cutoff..=cutoff {
                for d in -cutoff..=cutoff {
                    if a.abs() + b.abs() + c.abs() + d.abs() <= cutoff {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Compression of right multiplication by d_T to the monomial ball.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    basis: Vec<BiIdx>,
    index: HashMap<BiIdx, usize>,
    matrix: DMatrix<Complex64>,
    herm_residual: f64,
    cutoff: i64,
    zero_pos: usize,
    tri: OnceLock<linalg::KrylovTridiagonal>,
}

impl TruncatedOperator {
    pub fn basis(&self) -> &[BiIdx] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Position of ξ₀ (the zero index) in the basis.
    pub fn zero_pos(&self) -> usize {
        self.zero_pos
    }

    /// Symmetrization residual of the raw entries.
    pub fn herm_residual(&self) -> f64 {
        self.herm_residual
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Restriction to a subset of basis indices (rows and columns).
    pub fn restrict(&self, keep: &[BiIdx]) -> Option<DMatrix<Complex64>> {
        let positions: Option<Vec<usize>> =
            keep.iter().map(|h| self.index.get(h).copied()).collect();
        let positions = positions?;
        let n = positions.len();
        let mut out = DMatrix::zeros(n, n);
        for (i, &pi) in positions.iter().enumerate() {
            for (j, &pj) in positions.iter().enumerate() {
                out[(i, j)] = self.matrix[(pi, pj)];
            }
        }
        Some(out)
    }

    fn check_hermitian(&self) -> Result<(), CoreError> {
        if self.herm_residual > HERMITIAN_TOL {
            return Err(CoreError::NotHermitian {
                residual: self.herm_residual,
                tol: HERMITIAN_TOL,
            });
        }
        Ok(())
    }

    /// Eigenvalues (ascending) and the spectral weights |⟨v_j, ξ₀⟩|² from a
    /// full dense eigendecomposition.
    pub fn spectral_data(&self) -> Result<(Vec<f64>, Vec<f64>), CoreError> {
        self.check_hermitian()?;
        let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
        let weights: Vec<f64> = (0..values.len())
            .map(|j| vectors[(self.zero_pos, j)].norm_sqr())
            .collect();
        Ok((values, weights))
    }

    /// Tridiagonal restriction to the ξ₀-cyclic subspace. Every ξ₀-local
    /// quantity (heat traces, projection traces) lives here exactly, at a
    /// fraction of the cost of a full eigendecomposition.
    pub fn xi0_tridiagonal(&self) -> Result<&linalg::KrylovTridiagonal, CoreError> {
        self.check_hermitian()?;
        Ok(self
            .tri
            .get_or_init(|| linalg::lanczos_from_basis_vector(&self.matrix, self.zero_pos)))
    }
}

/// Matrix of right multiplication by d_T on the monomial ball:
/// entry (g, h) = τ⁽²⁾(W(g)* · W(h) · d_T).
///
/// Fails with [`CoreError::WindowTooSmall`] when the derivative windows do
/// not cover some difference index the entries need.
pub fn build_matrix(d: &RnDerivative, cutoff: i64) -> Result<TruncatedOperator, CoreError> {
    let ctx = *d.ctx();
    let basis = l1_ball(cutoff);
    let n = basis.len();
    let index: HashMap<BiIdx, usize> = basis.iter().enumerate().map(|(i, &h)| (h, i)).collect();
    let zero_pos = index[&[0, 0, 0, 0]];
    let mut raw = DMatrix::<Complex64>::zeros(n, n);
    for (i, &g) in basis.iter().enumerate() {
        let (adj_e, neg_g) = bi_mono_adjoint_exp(g);
        for (j, &h) in basis.iter().enumerate() {
            let delta = [g[0] - h[0], g[1] - h[1], g[2] - h[2], g[3] - h[3]];
            if !d.covers(delta) {
                return Err(CoreError::WindowTooSmall {
                    index: delta.to_vec(),
                    magnitude: f64::NAN,
                });
            }
            let b = d.beta_coeff(delta);
            if b.norm() == 0.0 {
                continue;
            }
            // W(g)* W(h) = λ-phase · W(h−g); pairing against d keeps β_{g−h}
            let (mul_e, h_minus_g) = bi_mono_mul_exp(neg_g, h);
            let (pair_e, _) = bi_mono_mul_exp(h_minus_g, delta);
            raw[(i, j)] = ctx.lambda_pow(adj_e + mul_e + pair_e) * b;
        }
    }
    let (matrix, herm_residual) = linalg::hermitize(&raw);
    Ok(TruncatedOperator {
        basis,
        index,
        matrix,
        herm_residual,
        cutoff,
        zero_pos,
        tri: OnceLock::new(),
    })
}

/// Window radii wide enough that [`build_matrix`] at this cutoff covers all
/// difference indices.
pub fn windows_for_cutoff(t: &CpMap, cutoff: i64) -> (i64, i64) {
    let k_radius = 2 * cutoff;
    let z_radius = (4 * cutoff).max(2 * t.support_radius() + 2 * k_radius) + 2;
    (k_radius, z_radius)
}

/// Oracle derivative + truncation in one step.
pub fn truncated_for(t: &CpMap, cutoff: i64) -> Result<TruncatedOperator, CoreError> {
    let (k_radius, z_radius) = windows_for_cutoff(t, cutoff);
    let psi = crate::state::StateFunctional::new(t.clone());
    let d = rn::rn_oracle(&psi, k_radius, z_radius)?;
    build_matrix(&d, cutoff)
}

/// ⟨ξ₀, e^{−t·op} ξ₀⟩ for each t, via eigendecomposition of the
/// Hermitianized matrix. Eigenvalues in (−CLAMP_TOL, 0) are clamped to 0.
pub fn heat_trace(op: &TruncatedOperator, t_list: &[f64]) -> Result<Vec<f64>, CoreError> {
    let (values, weights) = op.xi0_tridiagonal()?.vector_measure();
    Ok(t_list
        .iter()
        .map(|&t| {
            values
                .iter()
                .zip(&weights)
                .map(|(&mu, &w)| {
                    let mu = if mu > -CLAMP_TOL && mu < 0.0 { 0.0 } else { mu };
                    w * (-t * mu).exp()
                })
                .sum()
        })
        .collect())
}

/// ⟨ξ₀, P ξ₀⟩ where P projects onto eigenspaces with eigenvalue > rank_tol.
pub fn projection_trace_spectral(
    op: &TruncatedOperator,
    rank_tol: f64,
) -> Result<f64, CoreError> {
    let (values, weights) = op.xi0_tridiagonal()?.vector_measure();
    Ok(values
        .iter()
        .zip(&weights)
        .filter(|(&mu, _)| mu > rank_tol)
        .map(|(_, &w)| w)
        .sum())
}

/// Outcome of the least-squares route.
#[derive(Debug, Clone, Copy)]
pub struct LsqOutcome {
    /// 1 − min_x ‖ξ₀ − M x‖².
    pub value: f64,
    /// Normal equations were numerically rank-deficient (solved by
    /// pseudo-inverse, reported rather than fatal).
    pub singular_system: bool,
    pub rank: usize,
}

/// Range-projection trace by least squares: 1 − min_b ‖ξ₀ − (D_T b) ξ₀‖²
/// over b in the truncated monomial span, solved through the normal
/// equations with a pseudo-inverse.
pub fn projection_trace_lsq_op(op: &TruncatedOperator, rank_tol: f64) -> LsqOutcome {
    // the Krylov space of ξ₀ is invariant, so the least-squares problem
    // restricts to the tridiagonal block without changing the optimum
    match op.xi0_tridiagonal() {
        Ok(tri) => {
            let (value, singular_system, rank) = tri.range_weight(rank_tol);
            LsqOutcome {
                value,
                singular_system,
                rank,
            }
        }
        Err(_) => {
            // fall back to the dense normal equations for non-Hermitian input
            let m = &op.matrix;
            let n = m.ncols();
            let mut e0 = DVector::<Complex64>::zeros(m.nrows());
            e0[op.zero_pos] = Complex64::new(1.0, 0.0);
            let normal = m.adjoint() * m;
            let rhs = m.adjoint() * &e0;
            let solve = linalg::pinv_solve_hermitian(&normal, &rhs, rank_tol);
            let residual = (&e0 - m * &solve.solution).norm_squared();
            LsqOutcome {
                value: 1.0 - residual,
                singular_system: solve.rank_deficient,
                rank: solve.rank.min(n),
            }
        }
    }
}

/// Least-squares route from the map itself at the given cutoff.
pub fn projection_trace_lsq(
    t: &CpMap,
    cutoff: i64,
    rank_tol: f64,
) -> Result<LsqOutcome, CoreError> {
    Ok(projection_trace_lsq_op(&truncated_for(t, cutoff)?, rank_tol))
}

/// Exact squared distance from ξ₀ to {(b · d) : b in the monomial ball},
/// with the image coefficients kept in full (no compression back to the
/// ball). Enlarging the ball can only shrink this distance.
pub fn range_distance_exact(d: &RnDerivative, cutoff: i64) -> f64 {
    let ctx = *d.ctx();
    let dd = d.to_biweyl();
    let basis = l1_ball(cutoff);
    // collect the union support of the image vectors
    let mut support: Vec<BiIdx> = Vec::new();
    let mut seen: HashMap<BiIdx, usize> = HashMap::new();
    let mut images = Vec::with_capacity(basis.len());
    for &h in &basis {
        let img = BiWeylElement::monomial(h, Complex64::new(1.0, 0.0)).mul(&dd, &ctx);
        for (&idx, _) in img.iter() {
            seen.entry(idx).or_insert_with(|| {
                support.push(idx);
                support.len() - 1
            });
        }
        images.push(img);
    }
    let rows = support.len().max(1);
    let mut a = DMatrix::<Complex64>::zeros(rows, basis.len());
    for (j, img) in images.iter().enumerate() {
        for (&idx, &c) in img.iter() {
            a[(seen[&idx], j)] = c;
        }
    }
    let mut b = DVector::<Complex64>::zeros(rows);
    if let Some(&row) = seen.get(&[0, 0, 0, 0]) {
        b[row] = Complex64::new(1.0, 0.0);
    }
    let solve = linalg::pinv_solve(&a, &b, 1e-12);
    let base = if seen.contains_key(&[0, 0, 0, 0]) {
        0.0
    } else {
        1.0
    };
    base + (&b - &a * solve.solution).norm_squared()
}

/// Invariant values of one map at one cutoff.
#[derive(Debug, Clone)]
pub struct InvariantValues {
    pub cutoff: i64,
    pub basis_size: usize,
    pub herm_residual: f64,
    pub heat: Vec<f64>,
    pub proj_spectral: f64,
    pub proj_lsq: LsqOutcome,
}

pub fn invariant_values(
    t: &CpMap,
    t_list: &[f64],
    cutoff: i64,
    rank_tol: f64,
) -> Result<InvariantValues, CoreError> {
    let op = truncated_for(t, cutoff)?;
    Ok(InvariantValues {
        cutoff,
        basis_size: op.dim(),
        herm_residual: op.herm_residual(),
        heat: heat_trace(&op, t_list)?,
        proj_spectral: projection_trace_spectral(&op, rank_tol)?,
        proj_lsq: projection_trace_lsq_op(&op, rank_tol),
    })
}

/// Side-by-side invariants of T and S = conjugate(T, u) at matched cutoff,
/// with the maximum absolute deviation over all reported numbers.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub original: InvariantValues,
    pub conjugated: InvariantValues,
    pub max_deviation: f64,
}

pub fn invariance_report(
    t: &CpMap,
    u: &WeylElement,
    t_list: &[f64],
    cutoff: i64,
    rank_tol: f64,
) -> Result<InvarianceReport, CoreError> {
    let s = t.conjugate(u)?;
    let original = invariant_values(t, t_list, cutoff, rank_tol)?;
    let conjugated = invariant_values(&s, t_list, cutoff, rank_tol)?;
    let mut dev: f64 = 0.0;
    for (a, b) in original.heat.iter().zip(&conjugated.heat) {
        dev = dev.max((a - b).abs());
    }
    dev = dev.max((original.proj_spectral - conjugated.proj_spectral).abs());
    dev = dev.max((original.proj_lsq.value - conjugated.proj_lsq.value).abs());
    Ok(InvarianceReport {
        original,
        conjugated,
        max_deviation: dev,
    })
}
