//! Bipartite entanglement measures and monogamy audits for multipartite
//! qudit states.
//!
//! The crate covers
//!
//! * dense linear algebra on flattened tensor-product spaces ([`qlinalg`]):
//!   partial traces and transposes, Schmidt and spectral decompositions;
//! * state families ([`states`]): generalized W-class states, their partially
//!   coherent superpositions with the vacuum, phase damping, and the standard
//!   CKW counterexamples;
//! * closed-form measures ([`measures`]): pure-state concurrence and
//!   negativity, PPT negativity, the two-qubit spin-flip concurrence;
//! * convex roofs ([`convexroof`]): a multi-start optimizer over pure-state
//!   decompositions for the convex-roof extended negativity, its assistance
//!   dual, and the concurrence roof;
//! * monogamy audits ([`monogamy`]) with explicit bound semantics, and
//!   report emission ([`report`]).
//!
//! Parties are numbered from 0 and flattened with party 0 slowest. Every
//! numeric routine is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the precision.

pub mod convexroof;
pub mod error;
pub mod measures;
pub mod monogamy;
pub mod qlinalg;
pub mod report;
pub mod scalar;
pub mod specfile;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PureState64 = qlinalg::PureState<f64>;
pub type PureState32 = qlinalg::PureState<f32>;
pub type DensityOperator64 = qlinalg::DensityOperator<f64>;
pub type DensityOperator32 = qlinalg::DensityOperator<f32>;
pub type WClassSpec64 = states::WClassSpec<f64>;
pub type WClassSpec32 = states::WClassSpec<f32>;
pub type PcsSpec64 = states::PcsSpec<f64>;
pub type PcsSpec32 = states::PcsSpec<f32>;
pub type OptResult64 = convexroof::OptResult<f64>;
pub type OptResult32 = convexroof::OptResult<f32>;
pub type AuditReport64 = monogamy::AuditReport<f64>;
pub type AuditReport32 = monogamy::AuditReport<f32>;
