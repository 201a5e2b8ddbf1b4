//! Exact and high-precision computation of Jacobi-Stirling numbers of the
//! second kind, with the Legendre (`gamma = 1`) and Chebyshev (`gamma = 1/2`)
//! specializations.
//!
//! * [`triangle`], [`formulas`]: exact triangles and every closed-form sum.
//! * [`poly`], [`sturm`]: generating polynomials, root certificates, unimodality.
//! * [`laplace`], [`zeta`]: Laplace-integral closed forms, Eisenstein sums and
//!   saddle-point coefficients.
//! * [`edgeworth`]: local limit expansions for Bernoulli row sums.
//! * [`clt`]: centering constants and normal approximations for the
//!   modified Legendre-Stirling numbers.
//! * [`verify`]: the invariant suites behind `lslab verify`.

pub mod clt;
pub mod edgeworth;
pub mod error;
pub mod export;
pub mod formulas;
pub mod gamma;
pub mod hp;
pub mod laplace;
pub mod poly;
pub mod sturm;
pub mod triangle;
pub mod verify;
pub mod zeta;

pub use error::{LabError, Result};
pub use gamma::GammaParam;
