//! Computational toolkit for normal completely positive maps on the
//! hyperfinite II₁ factor realized on the irrational rotation algebra.
//!
//! The rotation algebra A_θ is generated by two unitaries U, V with
//! UV = λVU, λ = e^{2πiθ}. A CP map T(a) = Σᵢ Rᵢ* a Rᵢ with finitely
//! supported Kraus operators Rᵢ induces a functional
//! ψ_T(a ⊗ a′) = ⟨1, T(a) a′ 1⟩ on the algebra generated by the left and
//! right multiplication operators U_l, V_l, U_r, V_r. Everything in this
//! crate is a finite, exact computation on that data:
//!
//! * [`weyl`] — sparse Laurent arithmetic in the span of U^mV^n with the
//!   canonical trace;
//! * [`biweyl`] — the four-generator algebra of left/right multiplications,
//!   its trace τ⁽²⁾ and the crossed-product generators W₁..W₄;
//! * [`cpmap`] — Kraus-form CP maps and the equivalence transforms
//!   S(a) = T(u*au) and S(a) = v*T(u*au)v;
//! * [`state`] — ψ_T evaluation, the Fourier measures μ_T^k with the
//!   extendibility certificate, and state → map reconstruction;
//! * [`rn`] — the Radon–Nikodym element d_T of ψ_T relative to τ⁽²⁾:
//!   closed-form crossed-product components and an independent
//!   linear-solve oracle;
//! * [`invariants`] — truncated-operator numerics: heat traces
//!   τ⁽²⁾(e^{−tD_T}) and range-projection traces by two routes;
//! * [`reps`] — uniform-multiplicity irreducible representations on
//!   measures over T², relation and cocycle-equivalence residuals;
//! * [`gns`] — truncated GNS construction for ψ_T and a commutant-dimension
//!   purity probe.

pub mod biweyl;
pub mod context;
pub mod cpmap;
pub mod error;
pub mod gns;
pub mod invariants;
pub mod linalg;
pub mod reps;
pub mod rn;
pub mod state;
pub mod weyl;

pub use context::AlgebraContext;
pub use cpmap::CpMap;
pub use error::CoreError;
