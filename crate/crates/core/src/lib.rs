//! Contract completeness checking.
//!
//! Generates specification drivers from an abstract data type and decides,
//! by exhaustive search over a bounded abstract state space, whether a
//! contracted class's postconditions are strong enough to make every driver
//! valid.

pub mod adt;
pub mod checker;
pub mod cli;
pub mod contract;
pub mod drivers;
pub mod dsl;
pub mod report;
