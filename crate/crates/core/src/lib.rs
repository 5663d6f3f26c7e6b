//! Sample means of time series under dynamic time warping.
//!
//! A sample mean minimizes the Fréchet function
//! `F(z) = (1/N) Σ dtw(z, x_k)²` over candidate series `z`. The crate
//! provides three solvers: a batch subgradient method ([`sg_mean`]), the
//! majorize-minimize fixed-point iteration commonly known as DBA
//! ([`mm_mean`]), and a stochastic subgradient method ([`ssg_mean`]). It also
//! ships checks for the necessary and sufficient local optimality
//! conditions, an exhaustive global-mean oracle for tiny inputs, dataset
//! readers, and a harness for multi-trial solver comparisons.
//!
//! With the default `parallel` feature, per-series work inside the solvers
//! and independent harness trials run on rayon. Results are identical with
//! and without the feature because reductions always happen in index order.

pub mod dataset;
pub mod dtw;
pub mod error;
pub mod exec;
pub mod frechet;
pub mod harness;
pub mod optimality;
pub mod path;
pub mod series;
pub mod solvers;

pub use dtw::{dtw, dtw_squared, DtwResult};
pub use error::{Error, Result};
pub use frechet::{frechet_variation, Variation};
pub use optimality::{certify_local_min, check_necessary, global_mean_oracle, Certificate, OptimalityReport};
pub use path::{AlignmentSummary, Configuration, WarpingPath};
pub use series::{Sample, TimeSeries};
pub use solvers::{
    mm_mean, seeded_rng, sg_mean, solve, ssg_mean, Algorithm, InitStrategy, MeanResult, SolverOptions,
};
