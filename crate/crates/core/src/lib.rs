//! Semiparametric estimation of fractional cointegrating subspaces.
//!
//! The averaged periodogram of tapered, differenced observations is
//! eigen-decomposed; contiguous groups of its eigenvectors estimate the
//! cointegrating subspaces, and Gaussian semiparametric estimates on the
//! residual series identify the subspaces and drive a conservative test for
//! fractional cointegration. A simulator of the common-components model
//! provides ground truth for Monte Carlo checks.

pub mod analysis;
pub mod eigsub;
pub mod error;
pub mod gse;
pub mod inference;
pub mod io;
pub mod kv;
pub mod linalg;
pub mod model_sim;
pub mod montecarlo;
pub mod optimize;
pub mod report;
pub mod rng;
pub mod spectral;

pub use analysis::{run_analysis, AnalysisConfig, InputKind};
pub use eigsub::{
    eig_sym_desc, group_eigenvectors, residual_series, subspace_sin_theta, EigenDecomposition,
    SubspacePartition,
};
pub use error::{Error, ErrorKind, Result, Stage};
pub use gse::{gse_estimate, gse_objective, phi_p, GseConfig, MemoryEstimate};
pub use inference::{cointegration_test, identify_partition, IdentificationRule, TestResult};
pub use model_sim::{frac_noise, simulate_model, true_subspace_bases, Mixing, SimSpec, TrueBases};
pub use montecarlo::{run_monte_carlo, McSpec, McSummary};
pub use report::CointegrationReport;
pub use spectral::{
    averaged_periodogram, difference, tapered_dft, univariate_tapered_periodogram,
    AveragedPeriodogram, SeriesMatrix, TaperSpec,
};
