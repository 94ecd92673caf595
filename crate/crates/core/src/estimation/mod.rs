//! Estimators shared by the policies and the data pipeline.

pub mod logistic;
pub mod noise;
pub mod svm;

pub use logistic::{logistic_fit, logistic_objective, LogisticFit, LogisticOptions};
pub use noise::{
    difference_quotient_pdf, estimate_noise, grid_estimates, smooth_and_symmetrize, windowed_cdf, GridPoint, GridSpec,
    SmoothedNoiseEstimate, SmoothingOptions, WindowEstimate, WindowedCdf,
};
pub use svm::{svm_fit, svm_objective, SvmFit, SvmOptions};
