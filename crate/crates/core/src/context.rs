use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::CoreError;

/// Rotation parameter θ of the algebra, with the derived phase λ = e^{2πiθ}.
///
/// Coefficient arithmetic keeps λ-phases as integer exponents for as long as
/// possible (see [`AlgebraContext::lambda_pow`]); a context only converts an
/// exponent to a complex number at evaluation time, so long products do not
/// accumulate rounding drift.
///
/// In rational mode θ is replaced by p/q (coprime, 0 < p < q). Exponents are
/// then reduced mod q before evaluation, which makes λ^q = 1 hold to machine
/// precision and lets grid-based representation checks close exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraContext {
    theta: f64,
    rational: Option<(i64, i64)>,
}

/// (√5 − 1)/2, the default strongly irrational rotation parameter for tests.
pub const GOLDEN_THETA: f64 = 0.618_033_988_749_894_9;

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a.abs()
}

impl AlgebraContext {
    /// Context for an irrational rotation parameter θ ∈ (0, 1).
    pub fn new(theta: f64) -> Result<Self, CoreError> {
        if !(0.0..1.0).contains(&theta) || theta == 0.0 {
            return Err(CoreError::InvalidSpec {
                reason: format!("theta must lie in (0,1), got {theta}"),
            });
        }
        Ok(Self {
            theta,
            rational: None,
        })
    }

    /// Context with θ = p/q for exact root-of-unity arithmetic.
    pub fn rational(p: i64, q: i64) -> Result<Self, CoreError> {
        if q <= 0 || p <= 0 || p >= q {
            return Err(CoreError::InvalidSpec {
                reason: format!("rational mode requires 0 < p < q, got ({p},{q})"),
            });
        }
        if gcd(p, q) != 1 {
            return Err(CoreError::InvalidSpec {
                reason: format!("rational mode requires coprime (p,q), got ({p},{q})"),
            });
        }
        Ok(Self {
            theta: p as f64 / q as f64,
            rational: Some((p, q)),
        })
    }

    /// Golden-ratio test context.
    pub fn golden() -> Self {
        Self {
            theta: GOLDEN_THETA,
            rational: None,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// (p, q) when the context is in rational mode.
    pub fn rational_mode(&self) -> Option<(i64, i64)> {
        self.rational
    }

    /// λ = e^{2πiθ}.
    pub fn lambda(&self) -> Complex64 {
        self.lambda_pow(1)
    }

    /// λ^n evaluated from the reduced angle, not by repeated multiplication.
    ///
    /// Rational mode reduces the exponent mod q first, so the result is a
    /// q-th root of unity up to one sin/cos rounding.
    pub fn lambda_pow(&self, n: i64) -> Complex64 {
        let angle = match self.rational {
            Some((p, q)) => {
                let r = (n % q) * p % q;
                TAU * (r as f64) / (q as f64)
            }
            None => {
                let frac = (self.theta * n as f64).rem_euclid(1.0);
                TAU * frac
            }
        };
        Complex64::new(angle.cos(), angle.sin())
    }
}
