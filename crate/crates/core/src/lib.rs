//! Local multiplicities of compactified Jacobians and of their theta
//! divisors at points of nodal curves.
//!
//! Near a sheaf that fails to be locally free at `n` nodes, the compactified
//! Jacobian is analytically a product of `n` nodes `u_i v_i = 0` with a
//! smooth factor. This crate provides exact computations on that model:
//!
//! * truncated power series and the standard local model ([`powerseries`],
//!   [`localmodel`]);
//! * Hilbert–Samuel multiplicities and orders, by a linear-algebra oracle
//!   and by the branch decomposition ([`multiplicity`]);
//! * test arcs and contact orders ([`arcs`]);
//! * sheaves on rational nodal curves, `h^0`, and theta invariants
//!   ([`curve`]);
//! * families over `K[t]/(t^{N+1})` and the order of `Θ` along them
//!   ([`family`]).
//!
//! Everything is generic over an exact [`Field`]; the aliases below fix the
//! rationals with arbitrary precision.

pub mod arcs;
pub mod curve;
pub mod error;
pub mod family;
pub mod field;
pub mod linalg;
pub mod localmodel;
pub mod multiplicity;
pub mod parse;
pub mod powerseries;
pub mod random;
pub mod smith;
pub mod univariate;

pub use error::{Error, Result};
pub use field::Field;
pub use localmodel::{BranchIndex, LocalModel, ModelElement, NodeChoice};
pub use powerseries::{Monomial, PowerSeries, Vars};
pub use univariate::TruncSeries;

/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;

pub type QSeries = PowerSeries<Rational>;
pub type QTruncSeries = TruncSeries<Rational>;
pub type QModelElement = ModelElement<Rational>;
pub type QRingSpec = multiplicity::RingSpec<Rational>;
pub type QCurve = curve::RationalNodalCurve<Rational>;
pub type QSheaf = curve::TfSheaf<Rational>;
pub type QFamily = family::SheafFamily<Rational>;
pub type QMatrix = linalg::Matrix<Rational>;
