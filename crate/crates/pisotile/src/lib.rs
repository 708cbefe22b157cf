//! Beta-numeration for quadratic Pisot numbers, unit or not.
//!
//! Everything is exact: elements of Q(beta) are pairs of arbitrary-precision
//! rationals on the basis (1, beta), comparisons are integer sign
//! computations, and the headline quantity gamma(beta) -- the threshold below
//! which every rational with denominator coprime to N(beta) has a purely
//! periodic beta-expansion -- comes out as an exact field element with a
//! machine-checked certificate.
//!
//! The crate is organized around the pipeline
//!
//! 1. [`qfield`]: exact arithmetic, conjugation, norm, floor in Q(beta);
//! 2. [`numeration`]: the beta-transformation, greedy expansions, Parry
//!    admissibility, pure-periodicity orbit tests, arithmetic criteria;
//! 3. [`graphs`]: the admissibility automaton and the boundary graph of
//!    tile intersections, with DOT/JSON export;
//! 4. [`gamma`]: exact attractor hulls of graph-directed IFS value sets by
//!    policy iteration, branch-and-bound infima, and gamma(beta) itself;
//! 5. [`tiles`]: embeddings of beta-integers into R x Z_p via Hensel-lifted
//!    roots and the Monna map, emitting tile point clouds as CSV.
//!
//! [`text`] holds the small deterministic parsers and formatters shared by
//! the CLI and the fuzz targets.

pub mod error;
pub mod gamma;
pub mod graphs;
pub mod numeration;
pub mod qfield;
pub mod text;
pub mod tiles;

pub use error::Error;
pub use qfield::{Coeffs, ParryData, PisotQuad, QuadElem, Rational};
