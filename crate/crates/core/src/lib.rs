//! Lexicographic max-min optimization: progressive filling with tolerance,
//! exponential-loss minimization, and a harness of stability counterexamples.

// `!(x > 0.0)` is how parameter checks reject NaN along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csv;
pub mod error;
pub mod expmin;
pub mod filling;
pub mod lab;
pub mod lexcore;
pub mod setrep;

pub use error::{Error, Result};
pub use lexcore::{
    distortion, distortion_full, lex_cmp, lex_ge, lexmax_finite, linf_bound, sigma,
    sort_components, IndexSet, Point, SortedView,
};
pub use setrep::{CurvedSet3, FiniteSet, GroundSet, PolyPath, VPolytope};
