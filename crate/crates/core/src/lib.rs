//! Random walks in random scenery.
//!
//! The scenery is an i.i.d. field `omega` on `Z^d`; the walk `S` is independent
//! of it. The library samples both, tabulates local times `N_n(x)` and the
//! intersection functionals built from them, computes the limiting variances
//! of `Z_n = sum_{k=1}^n omega(S_k)` and runs quenched Monte Carlo experiments
//! that compare the normalized sums against their Gaussian limits.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod limits;
pub mod occupation;
pub mod rng;
pub mod scenery;
pub mod site;
pub mod stats;
pub mod walks;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use harness::{ExperimentReport, ExperimentSpec};
pub use occupation::{ExpectedLocalTimeTable, OccupationTable};
pub use scenery::{SceneryLaw, SiteField};
pub use site::Site;
pub use walks::{IncrementLaw, Path, Theorem};
