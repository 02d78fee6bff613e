//! Operator-algebra machinery at matrix scale.
//!
//! The full matrix algebra Mₙ with its normalized trace is the finite-scale
//! model of a finite factor. This crate implements the pieces of that model
//! that make sense numerically:
//!
//! * [`matcore`] — dense complex matrices and the factorizations everything
//!   else is built on (SVD, polar, complex Schur with eigenvalue reordering,
//!   pseudoinverse, tolerance-aware rank).
//! * [`regring`] — the regular-ring layer: supports, rank metric, singular
//!   value function, Peirce decomposition, idempotent normalization, and the
//!   explicit invertible normalizers `x·a = l(x)`, `b·x = r(x)`.
//! * [`fkdet`] — Fuglede–Kadison determinant, Brown measures, spectral-region
//!   (Haagerup–Schultz) projections, and the determinant/measure identities
//!   connecting them.
//! * [`maps`] — linear and conjugate-linear operators on Mₙ as first-class
//!   values, canonical forms `Φ(x) = a·J(x)·b`, and the preservation checkers
//!   (rank isometry, determinant, multiplicativity).
//! * [`decomp`] — the classification engine: certify a bijective map as a
//!   rank-metric isometry or determinant preserver and recover its canonical
//!   form.
//!
//! The crate is `no_std` (alloc required); IO, serialization, generators and
//! the CLI live in the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod decomp;
pub mod error;
pub mod fkdet;
pub mod maps;
pub mod matcore;
pub mod regring;

pub use error::Error;
pub use matcore::CMatrix;
