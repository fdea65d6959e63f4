//! Numerical laboratory for the quaternionic Monge-Ampere equation on flat
//! quaternionic tori and balls.
//!
//! * [`hypercomplex`]: flat `I, J, K`, hermitian and hyperhermitian forms,
//!   Pfaffians and the volume constant `c(n)`.
//! * [`comparison`]: `J`-pullback, hyperhermitian parts and the
//!   determinant comparison between complex and quaternionic Hessians.
//! * [`operators`]: eigenvalues of hyperhermitian pencils and admissible
//!   operators `f(lambda)` with their structural checks.
//! * [`solver`]: spectral Newton solver for `f(lambda(phi)) = e^{F + b}` on
//!   the torus `H^n / Z^{4n}`.
//! * [`gp`]: the auxiliary complex Monge-Ampere comparison on balls.
//! * [`probe`]: right-hand-side families, entropy norms and the sweep driver.

pub mod comparison;
mod error;
pub mod gp;
pub mod hypercomplex;
pub mod operators;
pub mod probe;
pub mod quaternion;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
