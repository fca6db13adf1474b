//! Numerical toolkit for twisted Fock spaces, the Weyl transform and the
//! heat semigroup calculus attached to the Heisenberg group.
//!
//! The crate is organized bottom-up:
//!
//! * [`indices`], [`hermite`], [`basis`]: graded Hermite bookkeeping and
//!   pointwise evaluation.
//! * [`quad`], [`linalg`]: Gauss quadrature in Lebesgue form and dense
//!   complex matrix routines (exponential, solves, norms).
//! * [`spectral`]: ladder, oscillator and spectral-multiplier matrices.
//! * [`weyl`]: the projective representation at real and complexified phase
//!   points, Weyl transforms of functions, twisted convolution and the
//!   symplectic Fourier transform.
//! * [`kernels`]: heat kernels, Gaussian weights, reproducing kernels and
//!   Laguerre functions.
//! * [`fock`]: twisted Fock spaces, the Bargmann-type transform, the
//!   Gauss map from operators to holomorphic functions and its adjoint.
//! * [`conv`]: convolution-type operators on Fock spaces, their algebraic
//!   counterparts, boundedness diagnostics and the degenerate-component
//!   machinery.
//!
//! Everything numerical is generic over the real scalar through
//! [`scalar::Scalar`]; `f64` carries the quantitative guarantees and `f32`
//! compiles for smoke testing. The aliases below fix `f64` for ordinary use.

pub mod basis;
pub mod conv;
pub mod error;
pub mod fock;
pub mod hermite;
pub mod indices;
pub mod kernels;
pub mod linalg;
pub mod quad;
pub mod scalar;
pub mod spectral;
pub mod weyl;

pub use error::{FockError, Result};
pub use indices::MultiIndex;
pub use scalar::Scalar;

/// Complex number at the default precision.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix at the default precision.
pub type Matrix64 = basis::CMatrix<f64>;
/// Hermite basis at the default precision.
pub type Basis64 = basis::HermiteBasis<f64>;
/// Quadrature grid at the default precision.
pub type Grid64 = quad::QuadratureGrid<f64>;
