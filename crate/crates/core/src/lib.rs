//! Matching engine for hospital/residents instances with lower quotas.
//!
//! A feasible matching gives every hospital a load between its lower and
//! upper quota. Such instances need not admit a stable feasible matching,
//! but a matching popular within the feasible set always exists. This
//! crate computes two flavors of it, both by reducing to a plain
//! hospital/residents instance and running deferred acceptance:
//!
//! * [`reduction::solve_max_popular`] — a maximum-cardinality matching
//!   popular among all feasible matchings;
//! * [`reduction::solve_popular_max`] — a matching popular among the
//!   maximum-cardinality feasible matchings.
//!
//! The [`popularity`] module holds the voting machinery that defines
//! popularity, plus enumeration-backed certifiers for small instances;
//! [`bruteforce`] carries independent reference implementations used by
//! the test suites.

pub mod bruteforce;
mod flow;
pub mod format;
pub mod generate;
pub mod hr;
pub mod instance;
pub mod popularity;
pub mod reduction;

pub use instance::{HrInstance, HrlqInstance, Matching};
