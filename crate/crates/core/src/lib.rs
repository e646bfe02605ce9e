//! Interval exchange transformations composed with circle rotations.
//!
//! The crate builds the one-parameter family
//! `S_α = T_k ∘ R_{c_k α} ∘ … ∘ T_1 ∘ R_{c_1 α}`, the stacked-rectangle
//! translation surfaces whose directional first-return maps realize it, and
//! finite-orbit diagnostics for unique ergodicity (discrepancy, Birkhoff
//! sums, deviation exponents, Keane's distinct-orbit condition, Boshernitzan
//! partition gaps).
//!
//! Arithmetic is generic over [`numerics::Scalar`]: exact rationals for
//! algebraic identities and `P`-bit fixed point for irrational parameters.

pub mod dynamics;
pub mod exec;
pub mod experiment;
pub mod iet;
pub mod io;
pub mod numerics;
pub mod surface;
