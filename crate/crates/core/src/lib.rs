//! Numerical tools for the half-line transforms
//!
//! ```text
//! F[f](x) = sup_{t>0} f(xt)/(t+1),    G[f](x) = inf_{t>0} f(xt)(1 + 1/t)
//! ```
//!
//! whose composition `GF` returns the smallest majorant of `f` in the class
//! of nonnegative nondecreasing concave functions (or, for nonpositive `f`,
//! of nonpositive nonincreasing concave functions with an asymptote through
//! the origin). The crate provides
//!
//! - [`function`]: sampled functions with exact tail/head metadata,
//! - [`transforms`]: `F`, `G`, `GF`, `FG` and left supporting lines,
//! - [`envelope`]: the same hulls built geometrically, as an independent check,
//! - [`fg`]: hyperbolic-arc chord condition for `FG[f] = f`,
//! - [`cone`]: the budgeted LP value pair on the nonnegative orthant,
//! - [`norms`]: energy-constrained operator norm curves of real matrices,
//! - [`cli`]: the `halfline` command line driver.

pub mod cli;
pub mod cone;
pub mod csv;
pub mod envelope;
pub mod error;
pub mod fg;
pub mod function;
pub mod linalg;
pub mod norms;
pub mod tolerance;
pub mod transforms;
pub mod verify;

pub use envelope::{
    a_hull, b_hull, class_hull, classify, concave_majorant, is_in_class_a, is_in_class_b,
    Breakpoint, HullClass, HullDecomposition,
};
pub use error::{Error, Result};
pub use function::{
    check_linear_growth, make_log_grid, sample, Builtin, FunctionSpec, HalfLineGrid, Line,
    SampledFunction, SpecKind,
};
pub use tolerance::Tolerance;
pub use transforms::{
    compose_fg, compose_gf, left_support_gap, left_support_line, transform_f, transform_g,
    GValue,
};
