//! Sparse Laurent arithmetic in the unital *-algebra generated by the two
//! unitaries U, V with UV = λVU.
//!
//! Elements are finitely supported coefficient maps Z² → ℂ over the
//! normal-ordered monomials U^{m₁}V^{m₂}. The canonical trace τ picks the
//! coefficient of the identity monomial; on monomials it satisfies
//! τ(x*x) = Σ|c_m|², so the monomials are an orthonormal basis of L²(τ).

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::context::AlgebraContext;

/// Coefficients with modulus below this are dropped after every ring
/// operation, keeping supports finite under floating-point noise.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Monomial exponent pair: (m₁, m₂) stands for U^{m₁}V^{m₂}.
pub type MonoIdx = (i64, i64);

/// Product of two normal-ordered monomials, with the phase kept as an exact
/// integer exponent of λ.
///
/// From UV = λVU one gets V^{b}U^{a} = λ^{−ab}U^{a}V^{b}, so
///
/// (U^{m₁}V^{m₂})(U^{n₁}V^{n₂}) = U^{m₁}(V^{m₂}U^{n₁})V^{n₂}
///                              = λ^{−m₂n₁} U^{m₁+n₁}V^{m₂+n₂}.
pub fn mono_mul_exp(m: MonoIdx, n: MonoIdx) -> (i64, MonoIdx) {
    (-m.1 * n.0, (m.0 + n.0, m.1 + n.1))
}

/// Product of two monomials with the phase evaluated in `ctx`.
pub fn mono_mul(m: MonoIdx, n: MonoIdx, ctx: &AlgebraContext) -> (Complex64, MonoIdx) {
    let (e, idx) = mono_mul_exp(m, n);
    (ctx.lambda_pow(e), idx)
}

/// Adjoint of a monomial: (U^{m}V^{n})* = V^{−n}U^{−m} = λ^{−mn}U^{−m}V^{−n}.
pub fn mono_adjoint_exp(m: MonoIdx) -> (i64, MonoIdx) {
    (-m.0 * m.1, (-m.0, -m.1))
}

/// Finitely supported element Σ c_m U^{m₁}V^{m₂} of the rotation algebra.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeylElement {
    coeffs: BTreeMap<MonoIdx, Complex64>,
}

impl WeylElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial((0, 0), Complex64::new(1.0, 0.0))
    }

    /// U^{m₁}V^{m₂} with coefficient `c`.
    pub fn monomial(m: MonoIdx, c: Complex64) -> Self {
        let mut coeffs = BTreeMap::new();
        if c.norm() >= PRUNE_THRESHOLD {
            coeffs.insert(m, c);
        }
        Self { coeffs }
    }

    /// The generator U.
    pub fn u() -> Self {
        Self::monomial((1, 0), Complex64::new(1.0, 0.0))
    }

    /// The generator V.
    pub fn v() -> Self {
        Self::monomial((0, 1), Complex64::new(1.0, 0.0))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (MonoIdx, Complex64)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn coeff(&self, m: MonoIdx) -> Complex64 {
        self.coeffs.get(&m).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MonoIdx, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = MonoIdx> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, m: MonoIdx, c: Complex64) {
        let entry = self.coeffs.entry(m).or_default();
        *entry += c;
        if entry.norm() < PRUNE_THRESHOLD {
            self.coeffs.remove(&m);
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.iter().map(|(&m, &a)| (m, a * c)))
    }

    /// ℓ² norm of the coefficient vector; equals the L²(τ) norm of the
    /// element since the monomials are orthonormal.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest |m₁|, |m₂| over the support.
    pub fn support_radius(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|&(a, b)| a.abs().max(b.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Product by bilinear extension of [`mono_mul`].
    pub fn mul(&self, other: &Self, ctx: &AlgebraContext) -> Self {
        let mut out = Self::zero();
        for (&m, &a) in &self.coeffs {
            for (&n, &b) in &other.coeffs {
                let (e, idx) = mono_mul_exp(m, n);
                out.add_term(idx, a * b * ctx.lambda_pow(e));
            }
        }
        out
    }

    /// Star operation, extended additively from the monomial adjoint.
    /// Applying it twice restores the element exactly.
    pub fn adjoint(&self, ctx: &AlgebraContext) -> Self {
        let mut out = Self::zero();
        for (&m, &a) in &self.coeffs {
            let (e, idx) = mono_adjoint_exp(m);
            out.add_term(idx, a.conj() * ctx.lambda_pow(e));
        }
        out
    }

    /// Canonical trace: the coefficient of the identity monomial.
    pub fn trace(&self) -> Complex64 {
        self.coeff((0, 0))
    }

    /// ‖u*u − 1‖ in the coefficient norm; zero for phase-scaled monomials.
    pub fn unitarity_residual(&self, ctx: &AlgebraContext) -> f64 {
        let prod = self.adjoint(ctx).mul(self, ctx);
        prod.sub(&Self::one()).coeff_norm()
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, &c) in &other.coeffs {
            out.add_term(m, -c);
        }
        out
    }
}

impl Add for &WeylElement {
    type Output = WeylElement;
    fn add(self, rhs: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (&m, &c) in &rhs.coeffs {
            out.add_term(m, c);
        }
        out
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;
    fn sub(self, rhs: &WeylElement) -> WeylElement {
        self.sub(rhs)
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &WeylElement {
    type Output = WeylElement;
    fn mul(self, rhs: Complex64) -> WeylElement {
        self.scale(rhs)
    }
}
