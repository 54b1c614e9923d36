//! Polynomial invariants of multi-party Dirac spinor states under local
//! spinor transformations.

pub mod analysis;
pub mod catalog;
pub mod clifford;
pub mod contraction;
pub mod enumeration;
pub mod error;
pub mod examples;
pub mod formula;
pub mod oracles;
pub mod reductions;
pub mod report;
pub mod rng;
pub mod states;

pub use clifford::{gamma_basis, GroupId, XTag};
pub use contraction::{evaluate, evaluate_batch, InvariantDescriptor, Pair, SlotRef};
pub use error::{Error, Result};
pub use states::MultiSpinorState;
