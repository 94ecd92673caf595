//! Auto-loan application data: pricing by net present value, feature
//! scaling, ground-truth fitting and replay.

mod data;
mod replay;
mod synthetic;

pub use data::{compute_price, filter_state, read_records, write_records, FeatureScaler, LoanRecord, DEFAULT_RATE};
pub use replay::{fit_ground_truth, subsample, LoanFitOptions, ReplayEnvironment};
pub use synthetic::{synthetic_loans, SyntheticLoanModel};
