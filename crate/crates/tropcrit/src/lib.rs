//! Solver for the unique positive critical point of a complete positive
//! Laurent polynomial over generalized Puiseux series.
//!
//! The pipeline has three layers:
//!
//! 1. the exact tropical critical point `d_crit`, computed by a recursion on
//!    Newton data over arbitrary-precision rationals ([`recursion`]);
//! 2. the leading coefficient `d_coeff`, a nested strictly convex
//!    minimization solved by damped Newton ([`lift::solve_coeff`]);
//! 3. the higher-order series `w_crit`, produced by a lifting recursion that
//!    drives the valuation of the gradient past the requested order
//!    ([`lift::solve_critical`]).
//!
//! On top of the solver sit toric-divisor analysis, moment-polytope fiber
//! points and mutation-invariance verification ([`apps`]).

pub mod apps;
pub mod corpus;
pub mod error;
pub mod lift;
pub mod puiseux;
pub mod ratgeom;
pub mod recursion;
pub mod tropical;

pub use error::{Error, Result};
pub use lift::{solve_critical, solve_critical_with, CritResult, SolveOptions};
pub use puiseux::{ExtRat, PuiseuxSeries, TorusPoint};
pub use ratgeom::{Rat, RatVector, Subspace};
pub use recursion::{canonical_point, CanonicalPoint};
pub use tropical::{trop_eval, trop_max, LaurentPoly};
