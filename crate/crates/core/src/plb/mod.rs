//! Perturbed linear bandits with single-nonzero actions and the M-LinUCB
//! learner.

pub mod adversary;
pub mod bench;
pub mod beta;
pub mod ridge;

pub use adversary::{adversary_step, AdversaryState};
pub use bench::{
    plb_bench, plb_regret, run_plb, write_plb_csv, BetaRule, MLinUcb, PlbInstance, PlbPolicy, PlbRound, PlbRow,
    UniformPlb,
};
pub use beta::{beta_star, beta_tilde};
pub use ridge::{mlinucb_select, RidgeState, SparseAction};
