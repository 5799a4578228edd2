//! Completely positive maps in Kraus form, T(a) = Σᵢ Rᵢ* a Rᵢ, together
//! with the two equivalence transforms used throughout:
//! conjugation S(a) = T(u*au) and the two-sided twist S(a) = v*T(u*au)v.

use crate::context::AlgebraContext;
use crate::error::CoreError;
use crate::weyl::WeylElement;

/// Unitarity tolerance for the transform preconditions.
pub const UNITARY_TOL: f64 = 1e-10;

/// CP map given by a nonempty list of finitely supported Kraus operators.
///
/// No normalization is applied: non-unital Kraus data is accepted
/// everywhere, in which case the associated functional ψ_T is positive but
/// not a state.
#[derive(Debug, Clone, PartialEq)]
pub struct CpMap {
    kraus: Vec<WeylElement>,
    ctx: AlgebraContext,
}

impl CpMap {
    pub fn new(kraus: Vec<WeylElement>, ctx: AlgebraContext) -> Result<Self, CoreError> {
        if kraus.is_empty() {
            return Err(CoreError::InvalidSpec {
                reason: "Kraus list must be nonempty".into(),
            });
        }
        Ok(Self { kraus, ctx })
    }

    /// Single-Kraus map T(a) = R*aR.
    pub fn single(r: WeylElement, ctx: AlgebraContext) -> Self {
        Self {
            kraus: vec![r],
            ctx,
        }
    }

    /// The identity map, T(a) = a.
    pub fn identity(ctx: AlgebraContext) -> Self {
        Self::single(WeylElement::one(), ctx)
    }

    pub fn kraus(&self) -> &[WeylElement] {
        &self.kraus
    }

    pub fn ctx(&self) -> &AlgebraContext {
        &self.ctx
    }

    /// Largest support radius over the Kraus operators.
    pub fn support_radius(&self) -> i64 {
        self.kraus
            .iter()
            .map(WeylElement::support_radius)
            .max()
            .unwrap_or(0)
    }

    /// T(a) = Σᵢ Rᵢ* a Rᵢ.
    pub fn apply(&self, a: &WeylElement) -> WeylElement {
        let mut out = WeylElement::zero();
        for r in &self.kraus {
            let term = r.adjoint(&self.ctx).mul(a, &self.ctx).mul(r, &self.ctx);
            out = &out + &term;
        }
        out
    }

    /// ‖T(1) − 1‖ < tol in the coefficient norm.
    pub fn is_unital(&self, tol: f64) -> bool {
        self.unitality_residual() < tol
    }

    pub fn unitality_residual(&self) -> f64 {
        (&self.apply(&WeylElement::one()) - &WeylElement::one()).coeff_norm()
    }

    /// Conjugated map S(a) = T(u*au), realized on Kraus data as Rᵢ ↦ u·Rᵢ:
    /// Σ (uRᵢ)* a (uRᵢ) = Σ Rᵢ* u* a u Rᵢ.
    pub fn conjugate(&self, u: &WeylElement) -> Result<Self, CoreError> {
        check_unitary(u, &self.ctx)?;
        let kraus = self
            .kraus
            .iter()
            .map(|r| u.mul(r, &self.ctx))
            .collect();
        Ok(Self {
            kraus,
            ctx: self.ctx,
        })
    }

    /// Twisted map S(a) = v*T(u*au)v, realized as Rᵢ ↦ u·Rᵢ·v.
    pub fn twist(&self, u: &WeylElement, v: &WeylElement) -> Result<Self, CoreError> {
        check_unitary(u, &self.ctx)?;
        check_unitary(v, &self.ctx)?;
        let kraus = self
            .kraus
            .iter()
            .map(|r| u.mul(r, &self.ctx).mul(v, &self.ctx))
            .collect();
        Ok(Self {
            kraus,
            ctx: self.ctx,
        })
    }
}

fn check_unitary(u: &WeylElement, ctx: &AlgebraContext) -> Result<(), CoreError> {
    let residual = u.unitarity_residual(ctx);
    if residual >= UNITARY_TOL {
        return Err(CoreError::NonUnitary { residual });
    }
    Ok(())
}

/// Phase-scaled monomial unitary λ^e · U^pV^q.
pub fn monomial_unitary(p: i64, q: i64, phase_exp: i64, ctx: &AlgebraContext) -> WeylElement {
    WeylElement::monomial((p, q), ctx.lambda_pow(phase_exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn ctx() -> AlgebraContext {
        AlgebraContext::golden()
    }

    #[test]
    fn apply_conjugation_by_u() {
        // R = U, a = V: U^{-1} V U = λ^{-1} V
        let c = ctx();
        let t = CpMap::single(WeylElement::u(), c);
        let out = t.apply(&WeylElement::v());
        assert_eq!(out.num_terms(), 1);
        assert!((out.coeff((0, 1)) - c.lambda_pow(-1)).norm() < 1e-15);
    }

    #[test]
    fn apply_identity_map() {
        let c = ctx();
        let t = CpMap::identity(c);
        let a = WeylElement::from_terms([
            ((1, -2), C::new(0.5, 0.2)),
            ((0, 1), C::new(-1.0, 0.0)),
        ]);
        assert!((&t.apply(&a) - &a).coeff_norm() < 1e-14);
    }

    #[test]
    fn apply_unitary_kraus_to_identity() {
        let c = ctx();
        let t = CpMap::single(WeylElement::u(), c);
        let out = t.apply(&WeylElement::one());
        assert!((&out - &WeylElement::one()).coeff_norm() < 1e-14);
    }

    #[test]
    fn unitality_checks() {
        let c = ctx();
        assert!(CpMap::single(WeylElement::u(), c).is_unital(1e-10));

        let t = CpMap::single(&WeylElement::u() + &WeylElement::v(), c);
        assert!(!t.is_unital(1e-10));
        // T(1) = (U+V)*(U+V) = 2 + U^{-1}V + V^{-1}U
        let t1 = t.apply(&WeylElement::one());
        assert!((t1.coeff((0, 0)) - C::new(2.0, 0.0)).norm() < 1e-14);
        assert_eq!(t1.num_terms(), 3);
        assert!((t1.coeff((-1, 1)).norm() - 1.0).abs() < 1e-14);
        assert!((t1.coeff((1, -1)).norm() - 1.0).abs() < 1e-14);

        let inv_sqrt2 = C::new(1.0 / 2.0_f64.sqrt(), 0.0);
        let two_term = CpMap::new(
            vec![
                &WeylElement::u() * inv_sqrt2,
                &WeylElement::v() * inv_sqrt2,
            ],
            c,
        )
        .unwrap();
        assert!(two_term.is_unital(1e-10));
    }

    #[test]
    fn conjugate_examples() {
        let c = ctx();
        let id = CpMap::identity(c);
        let s = id.conjugate(&WeylElement::u()).unwrap();
        assert_eq!(s.kraus().len(), 1);
        assert!((s.kraus()[0].coeff((1, 0)) - C::new(1.0, 0.0)).norm() < 1e-15);

        // R = U conjugated by V: Kraus VU = λ^{-1} UV
        let t = CpMap::single(WeylElement::u(), c);
        let s = t.conjugate(&WeylElement::v()).unwrap();
        assert!((s.kraus()[0].coeff((1, 1)) - c.lambda_pow(-1)).norm() < 1e-15);

        // u = 1 leaves the map unchanged
        let s = t.conjugate(&WeylElement::one()).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn conjugate_rejects_non_unitary() {
        let c = ctx();
        let t = CpMap::identity(c);
        let bad = &WeylElement::u() + &WeylElement::v();
        assert!(matches!(
            t.conjugate(&bad),
            Err(CoreError::NonUnitary { .. })
        ));
    }

    #[test]
    fn twist_examples() {
        let c = ctx();
        let id = CpMap::identity(c);
        // u = v = 1
        let s = id.twist(&WeylElement::one(), &WeylElement::one()).unwrap();
        assert_eq!(s, id);
        // R = 1, u = U, v = V → Kraus UV
        let s = id.twist(&WeylElement::u(), &WeylElement::v()).unwrap();
        assert!((s.kraus()[0].coeff((1, 1)).norm() - 1.0).abs() < 1e-14);
        // v = u*: inner automorphism cancels on R = 1 up to phase
        let u = monomial_unitary(2, -1, 0, &c);
        let ustar = u.adjoint(&c);
        let s = id.twist(&u, &ustar).unwrap();
        assert_eq!(s.kraus()[0].num_terms(), 1);
        assert!((s.kraus()[0].coeff((0, 0)).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn conjugate_matches_transform_identity() {
        // apply(conjugate(T,u), a) = apply(T, u*au) on monomials
        let c = ctx();
        let t = CpMap::new(
            vec![
                &WeylElement::u() * C::new(0.6, 0.1),
                WeylElement::from_terms([
                    ((0, 1), C::new(0.4, 0.0)),
                    ((1, 1), C::new(-0.3, 0.7)),
                ]),
            ],
            c,
        )
        .unwrap();
        for (p, q, e) in [(1i64, 0i64, 0i64), (0, 1, 2), (2, -1, -1), (-1, 3, 5)] {
            let u = monomial_unitary(p, q, e, &c);
            let s = t.conjugate(&u).unwrap();
            for (m, n) in [(0i64, 0i64), (1, 0), (-1, 2), (3, -2)] {
                let a = WeylElement::monomial((m, n), C::new(1.0, 0.0));
                let lhs = s.apply(&a);
                let inner = u.adjoint(&c).mul(&a, &c).mul(&u, &c);
                let rhs = t.apply(&inner);
                assert!((&lhs - &rhs).coeff_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn positivity_on_squares() {
        let c = ctx();
        let t = CpMap::new(
            vec![
                WeylElement::from_terms([((1, 0), C::new(0.8, 0.0)), ((0, 1), C::new(0.0, 0.6))]),
            ],
            c,
        )
        .unwrap();
        let a = WeylElement::from_terms([
            ((1, 1), C::new(0.5, -0.2)),
            ((-1, 0), C::new(0.9, 0.4)),
        ]);
        let sq = a.adjoint(&c).mul(&a, &c);
        let val = t.apply(&sq).trace();
        assert!(val.re >= -1e-12);
        assert!(val.im.abs() < 1e-12);
    }
}
