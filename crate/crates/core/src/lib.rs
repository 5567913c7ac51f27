//! Desk-scale laboratory for weighted multiple ergodic averages.
//!
//! The crate is organised by subsystem:
//!
//! - [`seqcore`]: bounded sequences on `N^d`, box windows, finite correlation
//!   and uniformity estimators, exact Gowers norms on `Z_N^d`.
//! - [`nil`]: torus, skew-product and Heisenberg nilmanifolds, nilsequence
//!   evaluation, Haar integration and equidistribution reports.
//! - [`dynsys`]: commuting unipotent-affine torus systems, the weighted
//!   multiple average engine, correlation sequences and Host–Kra seminorms.
//! - [`arith`]: sieves, multiplicative functions, `S_{a,b}` sets, pretentious
//!   distance partial sums, aperiodicity scans and Kátai correlations.
//! - [`hardy`]: Hardy-field weights, Taylor localization, level sets and
//!   Fejér sandwiches.
//! - [`decomp`]: structured-plus-error fits against nilsequence dictionaries.
//!
//! All reductions go through [`sum`], which fixes chunking and combination
//! order so results are bit-identical for any rayon thread count.

pub mod arith;
pub mod budget;
pub mod dd;
pub mod decomp;
pub mod dynsys;
pub mod error;
pub mod hardy;
pub mod nil;
pub mod phase;
pub mod seqcore;
pub mod sum;

pub use budget::Limits;
pub use error::{Error, ErrorClass};
pub use num_complex::Complex64;
