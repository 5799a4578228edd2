//! The Radon–Nikodym element d_T of ψ_T with respect to τ⁽²⁾, as
//! crossed-product components D_T^{(k)} over k ∈ Z².
//!
//! When ψ_T is absolutely continuous with respect to the trace there is a
//! (possibly unbounded) positive operator D_T acting by right multiplication
//! by an element d_T with ψ_T(b) = τ⁽²⁾(b · d_T). Two independent routes
//! compute its coefficients:
//!
//! * [`rn_oracle`] solves the defining identity directly. On the monomial
//!   basis W(h) = U_l^{h₁}V_l^{h₂}U_r^{h₃}V_r^{h₄} the pairing
//!   τ⁽²⁾(W(g)·W(h)) is a λ-phase times a Kronecker delta at h = −g, so each
//!   coefficient β_h of d_T is one phase-corrected division:
//!
//!     β_h = λ^{−h₁h₂ + h₃h₄} · ψ_T(W(−h)).
//!
//! * [`rn_component_closed`] evaluates the closed component formula for
//!   single-Kraus maps T(a) = R*aR (see below).
//!
//! # Crossed-product re-indexing
//!
//! Components are keyed by the crossed-product picture: the monomial
//! z₁^{m₁}z₂^{m₂}δ_k corresponds to the image of W₁^{m₁}W₂^{m₂}W₃^{k₁}W₄^{k₂}
//! under the generator dictionary of [`crate::biweyl`]. Expanding that image
//! with the reorder rules gives the bijection between Z⁴ monomial indices h
//! and crossed-product labels (k, m):
//!
//!   k = (h₂, h₃),
//!   m = (−h₁ − h₃,  −h₂ − h₄ − k₁ + k₂),
//!
//! with inverse h = (−m₁ − k₂, k₁, k₂, k₂ − 2k₁ − m₂), and the component
//! coefficients carry the λ-phase
//!
//!   D^{(k)}[m] = λ^{−k₂² + k₁k₂ + 2k₂m₂ − k₁m₁} · β_{h(k,m)}.
//!
//! This is the unique affine correspondence under which the oracle
//! reproduces the single-Kraus component formula
//!
//!   D^{(k)}(z) = Σ_{n,m} c_n · conj(c_{m₁+n₁, m₂+n₂+k₁−k₂})
//!                · λ^{N(k,n,m)} z₁^{m₁} z₂^{m₂},
//!   N(k,n,m) = 2k₂m₂ + k₁n₁ + k₂n₂ + k₁k₂ − k₂²,
//!
//! for every finitely supported R. It is locked by the R = U regression:
//! for that map both routes give the single monomial
//! λ^{k₂²−k₁k₂+k₁} z₂^{k₂−k₁}.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::biweyl::{bi_mono_mul_exp, BiIdx, BiWeylElement};
use crate::context::AlgebraContext;
use crate::cpmap::CpMap;
use crate::error::CoreError;
use crate::state::StateFunctional;
use crate::weyl::WeylElement;

/// Trigonometric-polynomial coefficients on T²: index (m₁, m₂) stands for
/// z₁^{m₁} z₂^{m₂}.
pub type TrigPoly = BTreeMap<(i64, i64), Complex64>;

/// Which route produced the component data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Oracle,
}

/// Crossed-product component labels of the Z⁴ index h.
pub fn reindex(h: BiIdx) -> ((i64, i64), (i64, i64)) {
    let k = (h[1], h[2]);
    let m = (-h[0] - h[2], -h[1] - h[3] - k.0 + k.1);
    (k, m)
}

/// Z⁴ index of the crossed-product label (k, m).
pub fn reindex_inverse(k: (i64, i64), m: (i64, i64)) -> BiIdx {
    [-m.0 - k.1, k.0, k.1, k.1 - 2 * k.0 - m.1]
}

/// λ-exponent relating β_{h(k,m)} to the component coefficient.
fn component_phase_exp(k: (i64, i64), m: (i64, i64)) -> i64 {
    -k.1 * k.1 + k.0 * k.1 + 2 * k.1 * m.1 - k.0 * m.0
}

/// Oracle coefficient of d_T at Z⁴ index h, from the defining identity.
pub fn beta(psi: &StateFunctional, h: BiIdx) -> Complex64 {
    let e = -h[0] * h[1] + h[2] * h[3];
    psi.ctx().lambda_pow(e) * psi.eval([-h[0], -h[1], -h[2], -h[3]])
}

/// Per-k trigonometric polynomials of d_T on finite index windows.
#[derive(Debug, Clone)]
pub struct RnDerivative {
    components: BTreeMap<(i64, i64), TrigPoly>,
    ctx: AlgebraContext,
    provenance: Provenance,
    k_radius: i64,
    z_radius: i64,
}

impl RnDerivative {
    pub fn ctx(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn k_radius(&self) -> i64 {
        self.k_radius
    }

    pub fn z_radius(&self) -> i64 {
        self.z_radius
    }

    /// Component D^{(k)}, empty when every coefficient pruned to zero.
    pub fn component(&self, k: (i64, i64)) -> TrigPoly {
        self.components.get(&k).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> &BTreeMap<(i64, i64), TrigPoly> {
        &self.components
    }

    /// True when the Z⁴ index lies inside the computed windows.
    pub fn covers(&self, h: BiIdx) -> bool {
        let (k, m) = reindex(h);
        k.0.abs() <= self.k_radius
            && k.1.abs() <= self.k_radius
            && m.0.abs() <= self.z_radius
            && m.1.abs() <= self.z_radius
    }

    /// Coefficient of d_T at the Z⁴ monomial index h (zero outside windows;
    /// use [`RnDerivative::covers`] to distinguish).
    pub fn beta_coeff(&self, h: BiIdx) -> Complex64 {
        let (k, m) = reindex(h);
        let c = self
            .components
            .get(&k)
            .and_then(|p| p.get(&m))
            .copied()
            .unwrap_or_default();
        self.ctx.lambda_pow(-component_phase_exp(k, m)) * c
    }

    /// d_T as a finitely supported element over the covered windows.
    pub fn to_biweyl(&self) -> BiWeylElement {
        let mut out = BiWeylElement::zero();
        for (&k, poly) in &self.components {
            for (&m, &c) in poly {
                let h = reindex_inverse(k, m);
                out.add_term(h, self.ctx.lambda_pow(-component_phase_exp(k, m)) * c);
            }
        }
        out
    }

    /// Rebuild component data from a coefficient element (inverse of
    /// [`RnDerivative::to_biweyl`] on covered windows).
    pub fn from_biweyl(
        d: &BiWeylElement,
        ctx: AlgebraContext,
        provenance: Provenance,
        k_radius: i64,
        z_radius: i64,
    ) -> Self {
        let mut components: BTreeMap<(i64, i64), TrigPoly> = BTreeMap::new();
        for (&h, &b) in d.iter() {
            let (k, m) = reindex(h);
            let c = ctx.lambda_pow(component_phase_exp(k, m)) * b;
            components.entry(k).or_default().insert(m, c);
        }
        Self {
            components,
            ctx,
            provenance,
            k_radius,
            z_radius,
        }
    }
}

/// z-window radius that contains every component coefficient of maps with
/// the given Kraus support radius, for all |kᵢ| ≤ k_radius.
pub fn default_z_radius(t: &CpMap, k_radius: i64) -> i64 {
    2 * t.support_radius() + 2 * k_radius + 2
}

/// Solve the defining identity ψ_T(g) = τ⁽²⁾(g · d_T) coefficient by
/// coefficient over the requested windows.
///
/// Each coefficient is local (one ψ-value), so enlarging the windows never
/// changes previously computed coefficients. Nonzero data on the z-window
/// boundary fails with [`CoreError::WindowTooSmall`].
pub fn rn_oracle(
    psi: &StateFunctional,
    k_radius: i64,
    z_radius: i64,
) -> Result<RnDerivative, CoreError> {
    let ctx = *psi.ctx();
    let mut components: BTreeMap<(i64, i64), TrigPoly> = BTreeMap::new();
    for k1 in -k_radius..=k_radius {
        for k2 in -k_radius..=k_radius {
            let k = (k1, k2);
            let mut poly = TrigPoly::new();
            for m1 in -z_radius..=z_radius {
                for m2 in -z_radius..=z_radius {
                    let m = (m1, m2);
                    let h = reindex_inverse(k, m);
                    let c = ctx.lambda_pow(component_phase_exp(k, m)) * beta(psi, h);
                    if c.norm() > 0.0 {
                        if m1.abs() == z_radius || m2.abs() == z_radius {
                            return Err(CoreError::WindowTooSmall {
                                index: vec![k1, k2, m1, m2],
                                magnitude: c.norm(),
                            });
                        }
                        poly.insert(m, c);
                    }
                }
            }
            if !poly.is_empty() {
                components.insert(k, poly);
            }
        }
    }
    Ok(RnDerivative {
        components,
        ctx,
        provenance: Provenance::Oracle,
        k_radius,
        z_radius,
    })
}

/// Oracle with the default window sizes for the map.
pub fn rn_oracle_for(t: &CpMap, k_radius: i64) -> Result<RnDerivative, CoreError> {
    let z_radius = default_z_radius(t, k_radius);
    rn_oracle(&StateFunctional::new(t.clone()), k_radius, z_radius)
}

/// Closed-form component D^{(k)} for a single-Kraus map T(a) = R*aR with
/// R = Σ c_n U^{n₁}V^{n₂}.
pub fn rn_component_closed(t: &CpMap, k: (i64, i64)) -> Result<TrigPoly, CoreError> {
    if t.kraus().len() != 1 {
        return Err(CoreError::MultiKraus {
            count: t.kraus().len(),
        });
    }
    let ctx = t.ctx();
    let r = &t.kraus()[0];
    let mut poly = TrigPoly::new();
    for (&n, &cn) in r.iter() {
        for (&s, &cs) in r.iter() {
            // s = (m₁+n₁, m₂+n₂+k₁−k₂) determines the monomial index m
            let m = (s.0 - n.0, s.1 - n.1 - k.0 + k.1);
            let exp = 2 * k.1 * m.1 + k.0 * n.0 + k.1 * n.1 + k.0 * k.1 - k.1 * k.1;
            let v = cn * cs.conj() * ctx.lambda_pow(exp);
            let entry = poly.entry(m).or_default();
            *entry += v;
            if entry.norm() < crate::weyl::PRUNE_THRESHOLD {
                poly.remove(&m);
            }
        }
    }
    Ok(poly)
}

/// Full closed-form derivative over the windows (single-Kraus maps only).
pub fn rn_closed_for(t: &CpMap, k_radius: i64) -> Result<RnDerivative, CoreError> {
    let z_radius = default_z_radius(t, k_radius);
    let mut components = BTreeMap::new();
    for k1 in -k_radius..=k_radius {
        for k2 in -k_radius..=k_radius {
            let poly = rn_component_closed(t, (k1, k2))?;
            if !poly.is_empty() {
                components.insert((k1, k2), poly);
            }
        }
    }
    Ok(RnDerivative {
        components,
        ctx: *t.ctx(),
        provenance: Provenance::ClosedForm,
        k_radius,
        z_radius,
    })
}

/// Covariance transform of the derivative under S(a) = T(u*au):
/// d_S = ũ d_T ũ* with ũ = u ⊗ 1.
///
/// Conjugation by a monomial unitary is diagonal on Z⁴ monomials, so the
/// component windows are preserved.
pub fn rn_conjugate(d: &RnDerivative, u: &WeylElement) -> Result<RnDerivative, CoreError> {
    let ctx = *d.ctx();
    let residual = u.unitarity_residual(&ctx);
    if residual >= crate::cpmap::UNITARY_TOL {
        return Err(CoreError::NonUnitary { residual });
    }
    let u_tilde = BiWeylElement::from_left(u);
    let u_tilde_star = u_tilde.adjoint(&ctx);
    let sandwich = u_tilde.mul(&d.to_biweyl(), &ctx).mul(&u_tilde_star, &ctx);
    Ok(RnDerivative::from_biweyl(
        &sandwich,
        ctx,
        d.provenance(),
        d.k_radius(),
        d.z_radius(),
    ))
}

/// Largest defining-identity residual |ψ_T(g) − τ⁽²⁾(W(g) · d_T)| over the
/// Z⁴ monomials g with |gᵢ| ≤ g_radius whose mirror the windows cover.
pub fn defining_identity_residual(
    psi: &StateFunctional,
    d: &RnDerivative,
    g_radius: i64,
) -> f64 {
    let ctx = *psi.ctx();
    let mut worst: f64 = 0.0;
    for a in -g_radius..=g_radius {
        for b in -g_radius..=g_radius {
            for c in -g_radius..=g_radius {
                for e in -g_radius..=g_radius {
                    let g = [a, b, c, e];
                    let minus_g = [-a, -b, -c, -e];
                    if !d.covers(minus_g) {
                        continue;
                    }
                    // τ⁽²⁾(W(g)·d) keeps only the coefficient of d at −g
                    let (phase, _) = bi_mono_mul_exp(g, minus_g);
                    let rhs = ctx.lambda_pow(phase) * d.beta_coeff(minus_g);
                    worst = worst.max((psi.eval(g) - rhs).norm());
                }
            }
        }
    }
    worst
}

/// Evaluate a trigonometric polynomial at (z₁, z₂) = (e^{iφ₁}, e^{iφ₂}).
pub fn eval_trig_poly(poly: &TrigPoly, phi1: f64, phi2: f64) -> Complex64 {
    poly.iter()
        .map(|(&(m1, m2), &c)| {
            let angle = phi1 * m1 as f64 + phi2 * m2 as f64;
            c * Complex64::new(angle.cos(), angle.sin())
        })
        .sum()
}

/// ‖d − d*‖ over the covered windows; zero for the derivative of a CP map.
pub fn self_adjointness_residual(d: &RnDerivative) -> f64 {
    let ctx = *d.ctx();
    let el = d.to_biweyl();
    (&el - &el.adjoint(&ctx)).coeff_norm()
}
