pub mod baselines;
pub mod dip;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod loan;
pub mod market;
pub mod plb;
pub mod policy;
pub mod rng;
pub mod scalar;

pub use error::{PricingError, Result};

/// Double-precision aliases for the scalar-generic kernels.
pub type Ridge = plb::RidgeState<f64>;
pub type Action = plb::SparseAction<f64>;
pub type Grid = dip::DiscretizationGrid<f64>;
pub type Candidates = dip::CandidateSet<f64>;
