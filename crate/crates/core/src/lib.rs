//! Computational additive combinatorics: sumsets and the structured-set
//! closure over the integers, affine witness recovery for small-doubling
//! subsets of `Z x G`, weakly structured sets in ordered groups, and an
//! exhaustive sweep engine that checks each inverse theorem against
//! brute-force instances.

pub mod error;
pub mod groups;
pub mod nonabelian;
pub mod sets;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use groups::{GroupElement, GroupSpec, ProductPoint};
pub use nonabelian::{GroupSubset, StrategyRegistry, WeakStructureCertificate, WeakStructureStrategy};
pub use sets::{APDescription, IntSet, NormalizationMap, SumsetStats};
pub use structure::{ClosureTrace, StructureCertificate};
pub use verify::{CheckerRegistry, Instance, TheoremChecker, TheoremId, VerificationReport};
