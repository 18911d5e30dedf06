//! Numerical pseudo-Finsler geometry on a coordinate chart.
//!
//! The engine takes a user-supplied Lagrangian `L(x, v)` — smooth, positively
//! 2-homogeneous in `v` on a conic set of admissible vectors, with
//! nondegenerate fundamental tensor — and computes the associated geometric
//! apparatus numerically:
//!
//! - fundamental and Cartan tensors ([`metric`]),
//! - spray, nonlinear connection and Chern-connection Christoffel symbols,
//!   plus covariant derivatives along curves ([`connection`]),
//! - geodesics, the exponential map and parallel transport ([`geodesic`]),
//! - the Jacobi operator by two independent routes and flag curvature
//!   ([`curvature`]),
//! - energy, first/second variation, criticality and the two-endmanifold
//!   index form ([`variation`]),
//! - submanifold normals and both second fundamental forms ([`submanifold`]),
//! - Jacobi fields, conjugate and focal points ([`jacobi`]),
//! - a named-check validation suite over the built-in catalog ([`validate`]).
//!
//! All derivatives are taken by truncated Taylor (jet) arithmetic ([`jets`]);
//! finite differences appear only as independent test oracles ([`fd`]).

pub mod catalog;
pub mod connection;
pub mod curvature;
pub mod curve;
pub mod error;
pub mod fd;
pub mod geodesic;
pub mod jacobi;
pub mod jets;
pub mod metric;
pub mod ode;
pub mod quadrature;
pub mod spline;
pub mod submanifold;
pub mod validate;
pub mod variation;

pub use error::{Error, Result};
pub use jets::{Dir, Jet, JetShape, Lagrangian, Scalar};
pub use metric::{CartanTensor, FundamentalTensor, MetricDefinition};

/// Linear-algebra scalar used throughout.
pub type Real = f64;
