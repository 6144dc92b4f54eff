//! The floating-point scalar the whole crate is generic over.

use std::fmt;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type for all numerics in this crate: `f32` or `f64`.
///
/// Complex arithmetic is always `Complex<S>` for some `S: Scalar`. The
/// tolerances baked into the default options assume `f64`; with `f32` they
/// must be relaxed by the caller.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Embeds an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Complex unit `i`.
    fn i() -> Complex<Self> {
        Complex::new(Self::zero(), Self::one())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number with both components finite.
pub fn is_finite_c<S: Scalar>(z: &Complex<S>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
