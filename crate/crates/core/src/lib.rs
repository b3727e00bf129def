//! Exact computations with finite permutation groups and their rational
//! representation theory: group algebras with the star involution and
//! their idempotent calculus, permutation-module relations with local
//! witnesses, regulator constants as square classes, winding-number plans
//! for idempotents, and the branched-cover character formula with its
//! inverse.
//!
//! All arithmetic is exact. The linear-algebra substrate is generic over
//! an exact field scalar ([`Scalar`]); the two instantiations used here
//! are the rationals ([`Rat`]) and prime fields ([`Fq`]).

pub mod algebra;
pub mod descriptor;
pub mod error;
pub mod group;
pub mod linalg;
pub mod named;
pub mod perm;
pub mod random;
pub mod regulator;
pub mod relations;
pub mod repmod;
pub mod scalar;
pub mod suite;
pub mod surfaces;

pub use error::{Error, Result};
pub use group::{PermGroup, Subgroup};
pub use linalg::{Matrix, QMatrix};
pub use perm::Permutation;
pub use scalar::{Fq, Rat, Scalar};

#[cfg(test)]
mod concurrency {
    // everything exposed is immutable after construction and safe to read
    // from multiple threads
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::group::PermGroup>();
        assert_send_sync::<crate::group::Subgroup>();
        assert_send_sync::<crate::algebra::Algebra>();
        assert_send_sync::<crate::algebra::AlgebraElement>();
        assert_send_sync::<crate::repmod::Representation>();
        assert_send_sync::<crate::repmod::Character>();
        assert_send_sync::<crate::relations::Relation>();
        assert_send_sync::<crate::regulator::SquareClass>();
    }
}
