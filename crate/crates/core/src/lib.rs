//! Online conformal controllers for coverage-constrained selection.
//!
//! Every controller here is the same unprojected update
//! `value += eta_t * (phi - Y_t)` applied to a different quantity: a bandit
//! dual, a score threshold, a probing budget or an inventory level.

pub mod bandit;
pub mod combi;
pub mod control;
pub mod env;
pub mod error;
pub mod metrics;
pub mod oracles;
pub mod rng;
pub mod threshold;
pub mod trace;

pub use control::{aci_update, coverage_bound, telescoping_check, ControllerState, StepSchedule, ValidityLedger};
pub use error::{AciError, Result};
pub use trace::{Action, Extras, TraceRecord};
