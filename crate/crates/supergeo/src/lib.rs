//! Computable Riemannian supergeometry.
//!
//! This crate makes the basic objects of Riemannian geometry on super
//! coordinate patches ℝ^{n|m} — and the algebraic side of the theory on Lie
//! superalgebras — available as concrete, testable computations:
//!
//! * [`grassmann`] — exact arithmetic in Grassmann algebras and for
//!   superfunctions (sums of Grassmann monomials with coefficient functions
//!   of the even coordinates), including left odd derivatives and
//!   multiplicative inverses.
//! * [`superalgebra`] — Lie superalgebras given by structure constants
//!   and/or matrix realizations: the `gl`, `sl`, `psl`, `osp`, `u(n|m)` and
//!   `d(2,1;α)` families, supertraces, Killing forms, scalar superproducts,
//!   involutions with eigenspace splittings, and Harish-Chandra pair checks.
//! * [`chartgeom`] — graded metrics on coordinate patches, the graded Koszul
//!   formula for the Levi-Civita connection, curvature tensors, and residual
//!   checks (torsion, metricity, curvature symmetries, Killing fields).
//! * [`geodesics`] — fixed-step Runge-Kutta integration of the supergeodesic
//!   equations, parallel transport along supercurves, and covariant
//!   derivatives of fields along curves.
//! * [`catalog`] — a registry of symmetric-superspace constructions that can
//!   be verified end to end, plus an instructive non-example.
//!
//! The command-line companion crate `supergeo-cli` exposes these operations
//! as subcommands over JSON and CSV files.

pub mod catalog;
pub mod chartgeom;
pub mod error;
pub mod geodesics;
pub mod grassmann;
pub mod linalg;
pub mod superalgebra;

pub use error::{Error, Result};
