//! Finite metric spaces and the ultrametrization operator.
//!
//! * [`metric`]: spaces, axiom validation, l1 / l-infinity products, fair
//!   product tables.
//! * [`generators`]: seeded instance generators.
//! * [`ultra`]: the subdominant ultrametric `U(X)` via minimum spanning trees.
//! * [`chain`]: connectivity by chains of bounded step.
//! * [`gh`]: correspondences, distortion and exact Gromov–Hausdorff distance.
//! * [`kuratowski`]: sup-norm embedding and sampled segment spaces.
//! * [`io`], [`cli`]: file formats and the `ultragh` command.
//!
//! With the default `parallel` feature the inner loops run on rayon; every
//! entry point that parallelizes also has a `_with` variant taking an
//! [`Exec`] policy so both paths can be compared.

#![allow(clippy::needless_range_loop)]

pub mod chain;
pub mod cli;
pub mod error;
pub mod exec;
pub mod generators;
pub mod gh;
pub mod io;
pub mod kuratowski;
pub mod metric;
pub mod ultra;

pub use error::{Error, Result};
pub use exec::Exec;
pub use gh::{Correspondence, GhLimits, GhResult};
pub use metric::{FiniteMetricSpace, ProductMetricTable, ValidationReport};
pub use ultra::UltrametricSpace;
