//! Numerical verification kernel for Askey-Wilson algebras: rank-1
//! representations and q-Racah overlaps, the embedding into `U_q(sl2)` and
//! its tensor products, and the rank-2 algebra with its bivariate
//! polynomials. Every routine is generic over [`qcore::Real`] and runs in
//! double or double-double arithmetic.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aw3;
pub mod error;
pub mod linalg;
pub mod qcore;
pub mod qracah;
pub mod rank2;
pub mod report;
pub mod suite;
pub mod tables;
pub mod uqsl2;
