//! Numerical model of the geometric stability manifold of a smooth projective
//! complex surface.
//!
//! Points are coordinates `(λ, H, D, β, α)`. The crate brackets the
//! generalized Le Potier function `Φ(H, D, β)`, certifies membership in the
//! region `Φ(H, D, β) < α`, and produces explicit contraction paths through it.

pub mod chern;
pub mod contraction;
pub mod error;
pub mod io;
pub mod lattice;
pub mod lepotier;
pub mod lp;
pub mod rational;
pub mod region;
pub mod signature;

pub use chern::ChernCharacter;
pub use error::{Error, Result, Violation};
pub use lattice::{
    validate_surface, AmpleSpec, Applicability, DivisorClass, StableCharacter, Surface, SurfaceData,
};
pub use lepotier::{Convention, EnumerationBox, PhiBracket};
pub use rational::{Extended, Rational};
pub use region::{BaseCoordinate, GeoPoint, Lambda, Membership, Verdict};
