//! Comparison policies: maximum-likelihood pricing under an assumed logistic
//! noise law (known, or known up to location and scale), and uniform random
//! pricing.

mod random;
mod rmlp;

pub use random::RandomPolicy;
pub use rmlp::{rmlp_estimate, rmlp_price, RmlpConfig, RmlpEstimate, RmlpFamily, RmlpPolicy};
