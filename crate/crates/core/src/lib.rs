//! Exponential families on homogeneous spaces `X = G/H`.
//!
//! A family is built from a group pair `(G, H)`, a finite-dimensional
//! representation `V` of `G` and an `H`-fixed vector `v₀ ∈ V`. Its members are
//! the measures `c_θ exp(-<φ, x·v₀>) χ(x) dμ(x)` for `θ = (φ, χ)` in the
//! dual of `V` times the group `Ω₀(G, H)` of positive characters trivial on `H`.
//!
//! - [`construction`] holds the generic machinery,
//! - [`families`] the catalog with closed-form normalizers, samplers and fitting,
//! - [`verify`] independent numerical checks of all of the above.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod construction;
pub mod error;
pub mod families;
pub mod group;
pub mod linalg;
pub mod random;
pub mod space;
pub mod special;
pub mod verify;

#[doc(hidden)]
pub mod cli;

pub use construction::{
    character_eval, omega0_basis, CharacterBasis, Construction, MeasureSpec, NaturalParameter,
    RepresentationDescriptor, SufficientStatistic,
};
pub use error::{Error, Result};
pub use families::{Classical, FamilySpec, FamilyTag};
pub use group::{GroupElement, GroupPair};
pub use space::{act, Point, SpaceTag};
pub use verify::{IntegratorSpec, Scheme, VerificationReport};
