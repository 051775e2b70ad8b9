//! Optimizers.
//!
//! Every optimizer follows one contract: given the evaluated data, propose
//! the next point. [`run_optimizer`] drives that contract with a Latin
//! hypercube initial design and an exact evaluation budget. Inside a run all
//! optimizers work on the unit cube; points are mapped to the problem box
//! only for evaluation.

pub mod bo;
pub mod cobyla;
pub mod dycors;
pub mod quadratic_tr;
mod runner;
pub mod search;
pub mod trust_region;

pub use bo::{lcb, propose_bo, propose_cbo, AcquisitionConfig};
pub use cobyla::{cobyla_step, Simplex};
pub use dycors::{dycors_step, DycorsState};
pub use quadratic_tr::{cobyqa_step, cuatro_step, lsqm_step, Step};
pub use runner::{run_optimizer, run_optimizer_with, Algorithm, OptimizerConfig};
pub use trust_region::{trust_region_update, MeritConfig, RadiusConfig, TrustRegionState};
