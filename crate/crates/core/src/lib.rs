//! Exact-arithmetic workbench for block combinatorics and graded sheaf calculus.
//!
//! The crate is organized bottom-up:
//!
//! * [`qlin`] — exact rational linear algebra (dense matrices, incremental
//!   solvers, nullspaces) plus integer polynomials in one variable and
//!   truncated Hilbert series.
//! * [`mpoly`] — multivariate polynomials over the rationals.
//! * [`rootdata`] — Cartan matrices, root systems, Weyl groups, involutions,
//!   fixed subgroups, invariant degrees.
//! * [`blockdata`] — abstract block data (parameters, statuses, cross action,
//!   Cayley transforms), validation, dual blocks, and the stabilizer groups
//!   `W_M`, `W'_M` and the component group `S = W_M / W'_M`.
//! * [`hecke`] — the Hecke module over a block, KLV polynomials, `u = 1`
//!   intertwining operators, and the duality matrix identity.
//! * [`gradedalg`] — invariant rings, the block-variety coordinate ring as a
//!   free module with commuting degree-2 operators, graded module Hom spaces,
//!   Hilbert series, and Krull–Schmidt decomposition.
//! * [`blockvariety`] — component sheaves, wall functors, Bott–Samelson
//!   objects, canonical indecomposables, characters, Ext algebras, and the
//!   equivariant wrapper.
//! * [`report`] — structured reports shared by the library and the CLI.

pub mod blockdata;
pub mod blockvariety;
pub mod error;
pub mod gradedalg;
pub mod hecke;
pub mod mpoly;
pub mod qlin;
pub mod report;
pub mod rootdata;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
