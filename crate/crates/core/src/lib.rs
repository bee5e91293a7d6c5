//! Quaternionic Möbius arithmetic and Jørgensen-type discreteness tests.
//!
//! The crate is layered bottom-up:
//!
//! * [`quat`]: quaternion arithmetic, similarity and argument.
//! * [`qmat`]: 2×2 quaternionic matrices, the Dieudonné determinant, the
//!   Kellerhals inverse and the Foreman / Parker–Short invariants.
//! * [`moebius`]: the action `Z ↦ (aZ + b)(cZ + d)⁻¹` on `H ∪ {∞}` and the
//!   classification of triangular normal forms.
//! * [`ineq`]: the inequality evaluators. Each returns a [`ineq::TestReport`]
//!   whose verdict is either an obstruction to discreteness, an equality
//!   (extremal) case, or inconclusive.
//! * [`dynamics`]: the Shimizu–Leutbecher sequence `S₀ = S`,
//!   `S_{n+1} = S_n T S_n⁻¹` with per-step statistics.
//! * [`cli`]: the `qjorg` command-line front end.
//!
//! None of the tests certify discreteness. They are necessary conditions.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod ineq;
pub mod moebius;
pub mod qmat;
pub mod quat;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use moebius::{ExtQuaternion, IsometryClass};
pub use qmat::{InvariantSet, MatH2};
pub use quat::Quaternion;
