//! Streaming square-root-space simulation of deterministic multitape
//! Turing machines.
//!
//! The [`run`] module is the linear-space reference; [`holo`] replays the
//! same run block by block over a balanced tree of time blocks while a
//! [`ledger`] meters every cell it holds.

pub mod boundary;
pub mod config;
pub mod encoding;
pub mod format;
pub mod holo;
pub mod ledger;
pub mod machine;
pub mod replay;
pub mod run;
pub mod samples;
pub mod scaling;
pub mod spacetime;
pub mod tree;
pub mod varint;
pub mod witness;

pub use config::{step, Configuration, Span, Tape};
pub use format::{parse_machine, serialize_machine, ParseError};
pub use machine::{MachineBuilder, MachineError, MachineSpec, Move, StateId, Symbol};
pub use run::{run, HaltCause, RunRecord};
