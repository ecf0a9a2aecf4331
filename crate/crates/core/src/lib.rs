//! Weighted zero-sum invariants over `C_n^r`.
//!
//! The crate computes the constants `η_A`, `g_A` and `s_A` of the group
//! `C_n^r` for a weight set `A` (by default `{-1, 1}`) by exhaustive search,
//! generates the explicit extremal sequence families, checks them, and
//! evaluates the closed-form bounds known for these constants.
//!
//! - [`group`]: arithmetic over `C_n^r`, sequences and their text format.
//! - [`zerosum`]: weighted zero-sum search, witnesses and the brute-force oracle.
//! - [`invariants`]: extremal search and the relations between the constants.
//! - [`constructions`]: sequence families and their verifier.
//! - [`bounds`]: closed-form bounds and the merged bound table.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod group;
pub mod invariants;
pub mod zerosum;

pub use error::{Error, Result};
pub use group::{parse_sequence, serialize_sequence, GroupElement, GroupParams, Sequence, WeightSet};
pub use zerosum::{ConditionKind, Pick, Witness};

/// The guide's chapters, compiled so their examples run as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/groups.md")]
    pub mod groups {}
    #[doc = include_str!("../../../book/src/zero-sums.md")]
    pub mod zero_sums {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    pub mod invariants {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    pub mod constructions {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
