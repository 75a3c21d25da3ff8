//! Clone sets in elections: detection, axiomatic recognition, PQ-tree
//! decomposition, profile synthesis, and decloning toward single-peaked or
//! single-crossing profiles.

pub mod axioms;
pub mod cli;
pub mod clones;
pub mod election;
pub mod error;
pub mod pqtree;
pub mod set;
pub mod single_crossing;
pub mod single_peaked;
pub mod synthesis;
pub mod util;

pub use election::{declone, parse_profile, peaks, reverse_order, CandidateId, DecloneResult, LinearOrder, Profile};
pub use error::{Error, Result};
pub use set::{CandidateSet, SetFamily};
