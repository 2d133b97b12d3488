//! Fault-tolerant supervisory control of distributed discrete event systems.
//!
//! The crate provides a deterministic finite-automaton kernel (composition,
//! projection, suffix quotient, completion, complement, satisfaction),
//! supervisor synthesis under partial observation, actuator- and
//! sensor-fault tolerance analysis with safe diagnosers, an assume-guarantee
//! coordination layer with counterexample-guided refinement, and a scenario
//! pipeline that drives everything from declarative JSON files.

pub mod actuator;
pub mod alphabet;
pub mod automaton;
pub mod coordination;
pub mod dot;
pub mod error;
pub mod fault;
pub mod fixtures;
pub mod json;
pub mod scenario;
pub mod sensor;
pub mod staging;
pub mod synthesis;

pub use alphabet::{Alphabet, EventDecl, EventId};
pub use automaton::{Automaton, Semantics, StateId, Trace, Verdict};
pub use error::{Error, Result};
pub use fault::FaultConfig;
pub use synthesis::{closed_loop, inf_c, supremal_supervisor, Supervisor};
