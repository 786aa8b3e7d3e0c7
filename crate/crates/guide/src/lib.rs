//! Runs every code block of the book as a documentation test.
//!
//! mdBook cannot execute snippets against local crates, so each chapter
//! is included here verbatim; `cargo test --doc -p guide` compiles and
//! runs them, keeping the book and the library in lockstep.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/lie-algebras.md")]
pub mod lie_algebras {}

#[doc = include_str!("../../../book/src/graded-algebra.md")]
pub mod graded_algebra {}

#[doc = include_str!("../../../book/src/derivations.md")]
pub mod derivations {}

#[doc = include_str!("../../../book/src/cohomology.md")]
pub mod cohomology {}

#[doc = include_str!("../../../book/src/hochschild-serre.md")]
pub mod hochschild_serre {}

#[doc = include_str!("../../../book/src/descent.md")]
pub mod descent {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
