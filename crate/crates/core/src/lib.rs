//! Spectral statistics of random submatrices.
//!
//! Given a fixed matrix `M` of order `n`, this crate samples `k x k` principal
//! submatrices (or `k x n` row submatrices) uniformly at random, computes their
//! empirical spectral distributions, and measures how tightly those
//! distributions concentrate around their mean in Kolmogorov distance. Exact
//! enumeration oracles, closed-form concentration bounds, and the
//! random-transpositions walk on the symmetric group are provided so every
//! quantitative ingredient can be checked numerically.
//!
//! Module map:
//!
//! * [`linalg`]: dense matrices and a cyclic Jacobi eigensolver.
//! * [`spectra`]: step CDFs, sup-norm distance, two-sample KS test.
//! * [`ensembles`]: named matrices, random test matrices, matrix files.
//! * [`sampling`]: uniform k-subsets, submatrix extraction, seed derivation.
//! * [`montecarlo`]: Monte Carlo estimates and the tail/mean bounds.
//! * [`walk`]: the random-transpositions chain on `S_n`.
//! * [`oracle`]: exhaustive enumeration and hypergeometric closed forms.
//! * [`cli`]: the `subspec` command-line tool.

pub mod cli;
pub mod ensembles;
mod error;
pub mod format;
pub mod linalg;
pub mod montecarlo;
pub mod oracle;
pub mod sampling;
pub mod spectra;
pub mod walk;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Field, Spectrum};
pub use montecarlo::{EstimateReport, Mode, TailCurve};
pub use oracle::ExactDistribution;
pub use sampling::{SeedPlan, SubsetSample};
pub use spectra::{KsResult, StepCdf};
pub use walk::{FunctionOnSn, PermIndex, WalkReport};
