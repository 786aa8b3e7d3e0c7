//! Exact symbolic computation of Lie-algebra and BRST-type cohomologies in the
//! small algebra of connection one-forms, ghosts, curvatures and covariant
//! ghost derivatives.
//!
//! The crate is organized bottom-up:
//!
//! * [`liealg`] — finite-dimensional real Lie algebras given by exact rational
//!   structure constants, with validation, Killing forms, semidirect splits
//!   and the three-dimensional deformation family.
//! * [`gca`] — the free graded-commutative algebra on a typed generator set,
//!   with Koszul-sign normalization and deterministic slice enumeration.
//! * [`deriv`] — graded derivations: the differentials and contracting
//!   operators acting on the small algebra, graded commutators, nilpotency.
//! * [`linalg`] — sparse exact rational linear algebra: fraction-free forward
//!   elimination, kernels, solves and incremental echelon spans.
//! * [`cohom`] — differentials as matrices on finite graded slices; kernels,
//!   images, cohomology bases with representatives and coboundary witnesses.
//! * [`hs`] — the Hochschild–Serre decomposition for semidirect sums with a
//!   semisimple quotient, and its dimension-wise crosscheck.
//! * [`descent`] — descent equations: one-step lifts, obstructions, the
//!   sigma/tau splitting, transgression ladders and the lift-depth table.
//!
//! All arithmetic is exact: coefficients are arbitrary-precision rationals
//! and every reported identity holds on the nose, never up to tolerance.

pub mod cohom;
pub mod deriv;
pub mod descent;
pub mod gca;
pub mod hs;
pub mod liealg;
pub mod linalg;
pub mod rational;

pub use rational::Q;
