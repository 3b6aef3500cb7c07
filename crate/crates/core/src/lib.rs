//! Bi-objective permutation flowshop scheduling: minimise total flowtime and
//! the energy machines burn while on standby.
//!
//! The crate is organised bottom-up:
//!
//! * [`instance`] - problem data, Taillard/native file formats, generators.
//! * [`objectives`] - completion/standby recurrences, flowtime and energy, plus
//!   an event-driven simulation used as an independent check.
//! * [`pareto`] - dominance, fast non-dominated sorting, crowding distance.
//! * [`localsearch`] - swap / reversion / insertion neighbourhoods and the
//!   variable neighbourhood descent applied to rank-1 solutions.
//! * [`nsga2`] - the generational loop with elite retention and the
//!   local-search hook.
//! * [`tuning`] - L16 orthogonal-array experiments and response tables.
//! * [`harness`] - benchmark campaigns, extreme points, CSV/JSON output.
//! * [`cli`] - the `eflow` command line.

pub mod cli;
pub mod error;
pub mod harness;
pub mod instance;
pub mod localsearch;
pub mod nsga2;
pub mod objectives;
pub mod pareto;
pub mod tuning;

pub use error::{Error, Result};
pub use instance::{Instance, Permutation};
pub use nsga2::{evolve, RunConfig};
pub use objectives::{evaluate, Evaluator, Objectives};
pub use pareto::{dominates, Individual};
