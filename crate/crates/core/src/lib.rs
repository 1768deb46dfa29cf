//! Trefftz-basis field fitting: harmonic and Fourier-Bessel expansions whose
//! coefficients are found by a truncated-SVD projection, plus a SIREN
//! baseline and the benchmark harness that compares the two.

pub mod basis;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod model;
pub mod report;
pub mod rng;
pub mod siren;
pub mod special;
pub mod tsvd;

pub use basis::{evaluate_basis, BasisMode, BasisSpec, FeatureMatrix, SamplePoints};
pub use error::{Error, Result};
pub use model::{fit, FittedModel};
pub use tsvd::{tsvd_lstsq, LstsqSolution, TruncationPolicy};
