//! Exact sum-product energy experiments over the rationals and prime fields.
//!
//! Sets are [`FiniteSet`]s over a [`GroundField`]; everything is counted
//! exactly and only bound comparisons go through truncated high-precision
//! decimals ([`precise`]).

pub mod bsg;
pub mod cli;
pub mod decompose;
pub mod energy;
pub mod error;
pub mod family;
pub mod field;
pub mod fpgrowth;
pub mod incidence;
pub mod kernel;
pub mod precise;
pub mod report;
pub mod set;
pub mod setfile;

pub use energy::{energy, energy_bruteforce, rep_function, self_energy, EnergyLaw, EnergyValue, RepFunction};
pub use error::{Error, Result};
pub use family::FamilySpec;
pub use field::{FieldElem, FieldKind, GroundField};
pub use set::{FiniteSet, Law};
