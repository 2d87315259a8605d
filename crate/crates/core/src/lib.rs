//! Exact coset-ring means, Neumann cover checks, witness sets and degrees of
//! commutativity for finite groups, crystallographic groups `ℤⁿ ⋊ Q` and
//! central extensions of abelian groups by an alternating pairing.

pub mod coset;
pub mod coset_ring;
pub mod dc;
pub mod error;
pub mod exec;
pub mod group;
pub mod lattice;
pub mod mean;
pub mod rational;
pub mod subgroup;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use group::{Element, ExtendedIndex, GroupHandle, GroupKind};
pub use rational::Rational;
