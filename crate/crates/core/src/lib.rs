//! Rotation systems of complete graphs and the flag-algebra machinery used to
//! bound the density of non-crossing `K4`s in good drawings of `K_n`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over immutable values; IO, parallel drivers and the command line
//! live in the companion `rotsys` crate.
//!
//! Module map:
//!
//! * [`rotation`]: rotation systems, induced subsystems, inverses, the text line format.
//! * [`canon`]: canonical keys (isomorphism), rooted keys for flags, packed codes.
//! * [`density`]: exact substructure densities.
//! * [`catalog`]: seed catalogs and extension by one vertex with 5-subsystem filtering.
//! * [`crossing`]: crossing counts and the closed-form bound arithmetic.
//! * [`flag`]: types, flags and flag bases.
//! * [`pair_density`]: exact flag-pair density matrices.
//! * [`sdp`]: the assembled semidefinite program.
//! * [`certificate`]: exact verification of rational PSD certificates.

#![no_std]

extern crate alloc;

pub mod canon;
pub mod catalog;
pub mod certificate;
pub mod combinatorics;
pub mod crossing;
pub mod density;
pub mod error;
pub mod flag;
pub mod pair_density;
pub mod rational;
pub mod rotation;
pub mod sdp;

pub use canon::{canonical_form, is_isomorphic, CanonicalKey};
pub use catalog::{Catalog, Class, Labeled5Lookup};
pub use certificate::{Certificate, Factorization, VerifiedBound};
pub use crossing::CrossingSummary;
pub use density::density;
pub use error::{Error, Result};
pub use flag::{Flag, FlagBasis, TypeConfig, TypeSpec};
pub use pair_density::PairDensityMatrix;
pub use rational::Rational;
pub use rotation::{RotationSystem, Vertex, MAX_VERTICES};
pub use sdp::SdpProblem;
