//! Numerical reconstruction of the extremal metric for the first Laplace
//! eigenvalue on the Klein bottle, with the checks and parameter sweep that
//! support its uniqueness.

pub mod acceptance;
pub mod extremal;
pub mod geometry;
pub mod odeint;
pub mod quad;
pub mod specfun;
pub mod sturm;
pub mod sweep;
pub mod systems;
