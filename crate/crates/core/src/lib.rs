//! Combinatorial p-modulus and conformal-dimension experiments on finite
//! circle-tree models of hyperbolic group boundaries.
//!
//! The crate is organised around five pieces:
//!
//! - [`gog`]: graph-of-groups decompositions, truncated Bass-Serre trees,
//!   cylinders and the tree of cylinders, and the conformal-dimension /
//!   attainment decision procedures over tagged inputs.
//! - [`geometry`]: the exact length-metric geometry of iterated circle
//!   gluings (the analytic layer: circle trees, arc coordinates, portal
//!   distances).
//! - [`space`]: discretised model spaces (weighted graphs with limit-set
//!   tags), metric estimate measurements and porosity scans.
//! - [`cover`]: scale covers on separated nets, their intersection nerves,
//!   and curve-family resolution.
//! - [`modulus`]: combinatorial p-modulus by constraint generation with a
//!   shortest-path violation oracle, a dense brute-force solver, and
//!   critical-exponent estimation.
//! - [`weights`]: the explicit weight-function construction on circle-tree
//!   spaces, its calibration, and the max-norm / admissibility / volume
//!   verifications, plus the simplified annulus recursion.

pub mod cover;
pub mod error;
pub mod geometry;
pub mod gog;
pub mod modulus;
pub mod space;
pub mod weights;

pub use error::Error;
