//! Numerical representation theory of the quantum group `U_q(su(2))`, its
//! function algebra `O_q(SU(2))`, the Podleś coideal `O_q(S_t^2)` with its
//! stabilizer `U_q(k_t)`, and the Drinfeld double coideal
//! `U_q(sl(2,R)_t) = D(O_q(S_t^2), U_q(k_t))`.
//!
//! Everything is finite-dimensional: the dual `𝒰` is a product of matrix
//! algebras indexed by spins, elements of `O_q(SU(2))` are finite sums of
//! matrix coefficients, and infinite objects (the stabilizer `I`, the GNS
//! spaces) are truncated with explicit margins.
//!
//! The module layout follows the layering of the theory:
//!
//! * [`qnum`]: q-integers, Pochhammer symbols, the parameter context.
//! * [`uqsu2`]: spin representations, Clebsch–Gordan, antipodes.
//! * [`coeffalg`]: `O_q(SU(2))` as coefficient matrices, Haar state.
//! * [`coideal`]: `B_t`, `Φ_C`, the stabilizer `I` and the sphere `B`.
//! * [`relint`]: relatively invariant integrals on `I`.
//! * [`report`], [`sample`]: check outcomes and seeded random inputs.
//! * [`double`]: the double coideal, `φ_D`, the regular representation.
//! * [`cli`]: verification suites and machine-readable reports.

pub mod cli;
pub mod coeffalg;
pub mod coideal;
pub mod double;
mod error;
pub mod qnum;
pub mod relint;
pub mod report;
pub mod sample;
pub mod uqsu2;

pub use coeffalg::{CoeffAlgebra, CoeffElement, DualElement};
pub use coideal::{Coideal, StabElement};
pub use double::{DoubleAlgebra, DoubleElement};
pub use error::{Error, Result};
pub use qnum::{CMatrix, CVector, QContext, Scalar};
pub use relint::{GCharacter, InvariantIntegral};
pub use uqsu2::{Spin, SpinRep, Uqsu2};
