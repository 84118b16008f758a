//! Computational harmonic analysis on the d-torus: quasiconcave majorants and
//! their discretizing sequences, trigonometric polynomials in coefficient
//! space, moduli of smoothness, dominating-function constructions with
//! coefficient-wise domination, and a decision procedure for when Lipschitz
//! classes embed into the Wiener spaces `A_p` of p-absolutely convergent
//! Fourier series.
//!
//! The crate is organized around five subsystems:
//!
//! - [`majorant`] — r-quasiconcave weight functions, validation,
//!   discretizing sequences, and concave-majorant weight representations.
//! - [`trigpoly`] — dense coefficient boxes on `[-N,N]^d`, multiplier
//!   operators (derivatives, finite differences, de la Vallée-Poussin means),
//!   grid evaluation, and sup/C^s norms.
//! - [`smoothness`] — moduli of smoothness in L² and sup norm, the three
//!   equivalent Lipschitz functionals, Bernstein ratio checks.
//! - [`kkdl`] — randomized coefficient flattening and the block construction
//!   of a continuous dominating function with equivalent moduli.
//! - [`embedding`] — the three-case embedding classifier with
//!   cross-checking best-constant estimators and sharpness witnesses.
//!
//! All operations are pure functions of their inputs; values are immutable
//! after construction and safe to share across threads.

// Guards of the form `!(x > c)` are deliberate: they reject NaN parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embedding;
pub mod error;
pub mod kkdl;
pub mod majorant;
pub mod smoothness;
pub mod synth;
pub mod trigpoly;

pub use error::{Error, Result};
pub use majorant::{DiscretizingSequence, Majorant, WeightRepresentation};
pub use trigpoly::{ShellProfile, TrigPoly};
