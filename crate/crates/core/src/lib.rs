//! Functional calibration by matching a physical curve to a computer-model
//! surface.
//!
//! Model points are grouped into one layer per physical input, a shortest
//! source-to-sink path through the layers picks one anchor per layer, and
//! a Gaussian process through the anchors gives the calibration function
//! `theta = f(x)`. Physical responses are then predicted as `y_c(x, f(x))`.

pub mod calibrate;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod gp;
pub mod graph;
pub mod rng;
pub mod shortest_path;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/shortest-path.md")]
    mod shortest_path {}
    #[doc = include_str!("../../../book/src/gaussian-process.md")]
    mod gaussian_process {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/results.md")]
    mod results {}
}
