//! Static perfect-fluid spacetimes with translation-invariant, conformally
//! flat spatial slices.
//!
//! The spatial metric is `g = δ/φ²` for a pseudo-Euclidean `δ` with signature
//! entries `ε_i = ±1`, and every profile depends on position only through
//! `ξ = α·x` for a fixed direction `α`. The static metric `ĝ = g − f² dt²`
//! is a perfect-fluid solution exactly when the lapse `f` solves a single
//! linear second-order equation in `ξ` driven by the conformal factor `φ`.
//!
//! The crate is organized around that reduction:
//!
//! - [`geometry`]: closed-form curvature, Christoffel symbols, Hessians and
//!   traces of the conformally flat slice, plus the [`SpacetimeSpec`] bundle.
//! - [`ode`]: an adaptive Dormand-Prince 5(4) integrator with dense output
//!   and event detection used by every numerical layer.
//! - [`reduction`]: the master lapse equation, its numerical solution, the
//!   fluid fields `μ` and `ρ`, and the associated Riccati phase portrait.
//! - [`catalog`]: closed-form example families with their printed values and
//!   known errata.
//! - [`verifier`]: a finite-difference curvature oracle and perfect-fluid
//!   decomposition that check a candidate spacetime without reusing the
//!   closed forms.
//! - [`geodesics`]: geodesic integration and randomized completeness probes
//!   of the static metric.
//!
//! Everything is generic over the scalar type through [`Real`]; the aliases
//! below fix `f64` for the common case.

pub mod catalog;
pub mod geodesics;
pub mod geometry;
pub mod ode;
pub mod real;
pub mod reduction;
pub mod verifier;

pub use geometry::{
    CausalCharacter, Direction, FnProfile, GeometryError, Jet2, Profile, Signature, SpacetimeSpec,
};
pub use real::{real, Real};

/// Default scalar type used by the CLI and the f64 aliases.
pub type Scalar = f64;

/// [`Direction`] over `f64`.
pub type DirectionF64 = Direction<f64>;
/// [`SpacetimeSpec`] over `f64`.
pub type SpacetimeSpecF64 = SpacetimeSpec<f64>;
/// [`Jet2`] over `f64`.
pub type Jet2F64 = Jet2<f64>;
