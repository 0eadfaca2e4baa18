//! Finite groups of mining-pool update maps.
//!
//! `n` nodes are spread over `r` mining pools. A [`PoolUpdate`] gives every
//! node a permutation of the pool indices; under per-node composition these
//! updates form a group of order `(r!)^n`. The crate builds that group and
//! exposes the machinery to study it: order arithmetic (Sylow, Lagrange,
//! Cauchy, Stirling), exhaustive subgroup search on small instances, the
//! regular representation, and a churn simulator that folds node-switch
//! traces into group elements.

pub mod error;
pub mod group;
pub mod order;
pub mod perm;
pub mod representation;
pub mod subgroup;
pub mod trace;

pub use error::{Error, ErrorCategory, Result};
pub use group::{
    enumerate_group, make_pool_permutation, random_element, Configuration, GroupParams, PoolPermutation, PoolUpdate,
};
pub use order::{NormalityVerdict, OrderFactorization, SylowForm};
pub use perm::Permutation;
pub use representation::{IsoVerdict, MultiplicationTable};
pub use subgroup::{CosetPartition, CosetSide, Subgroup, DEFAULT_CAP};
pub use trace::{SwitchEvent, Trace};
