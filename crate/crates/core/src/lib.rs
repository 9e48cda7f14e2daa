//! Numerical laboratory for the Schwarzian derivative and the univalence
//! classes it controls.
//!
//! * [`jets`]: forward-mode third-order complex jets.
//! * [`expr`]: the expression language for analytic functions.
//! * [`series`]: truncated Laurent and Taylor series.
//! * [`constants`]: the scalar constants and hypotheses.
//! * [`classify`]: grid classifiers for the geometric classes.
//! * [`ode`]: radial integration of `w'' + p w = 0`.
//! * [`verify`]: the built-in check battery.

pub mod classify;
pub mod constants;
pub mod expr;
pub mod jets;
pub mod ode;
pub mod series;
pub mod verify;
