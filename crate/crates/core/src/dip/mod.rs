//! The discretized-UCB pricing policy: doubling episodes, a classifier-based
//! estimate of `θ0` per episode, and optimistic pricing over a grid of
//! candidate prices.

pub mod grid;
pub mod inner_a;
pub mod policy;
pub mod projection;
pub mod schedule;

pub use grid::{candidate_set, discretization_count, discretize, inner_b_select, CandidateSet, DiscretizationGrid};
pub use inner_a::{augmented_rows, inner_a_estimate, Classifier, ThetaEstimate};
pub use policy::{DipConfig, DipPolicy, UcbEngine};
pub use projection::l1_project;
pub use schedule::{build_schedule, EpisodeSchedule};
