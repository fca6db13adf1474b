//! Scalar abstraction: the toolkit is generic over the real floating type.
//!
//! `f64` is the precision every default tolerance in the test suite assumes;
//! `f32` builds and runs but is only suitable for smoke tests at small
//! truncation orders (the Gauss-Hermite weight computation overflows `f32`
//! beyond roughly 40 nodes per axis).

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar type the library is generic over.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Debug + Display + Sum + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type C<S> = Complex<S>;

/// Converts an `f64` literal into `S`. Panics only if `S` cannot represent
/// any approximation of the value, which no IEEE float type triggers.
#[inline]
pub fn fp<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 constant must convert to scalar type")
}

/// Converts a `usize` into `S` exactly for all sizes that occur here.
#[inline]
pub fn fu<S: Scalar>(k: usize) -> S {
    S::from_usize(k).expect("usize must convert to scalar type")
}

/// Purely real complex value.
#[inline]
pub fn cr<S: Scalar>(re: S) -> C<S> {
    Complex::new(re, S::zero())
}

/// Purely imaginary complex value.
#[inline]
pub fn ci<S: Scalar>(im: S) -> C<S> {
    Complex::new(S::zero(), im)
}
