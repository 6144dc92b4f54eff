//! Numerical toolkit for polynomials whose coefficients coincide with their
//! zeros (Ulam polynomials).
//!
//! The crate is organized around five pieces:
//!
//! * [`poly`] — complex polynomial arithmetic, elementary symmetric
//!   polynomials and a simultaneous root finder;
//! * [`ulam`] — the coefficients-to-zeros map, its fixed-point residual
//!   systems, Newton polishing and algebraic identity checks;
//! * [`homotopy`] — total-degree homotopy continuation that enumerates all
//!   fixed points and reproduces the solution counts by inclusion-exclusion;
//! * [`hypergeom`] — coefficient recurrences for eigenpolynomials of
//!   hypergeometric-type operators and the rigidity check that forces the
//!   trivial family `x^N`;
//! * [`dynamics`] — the solvable zero-relaxation flow whose asymptotically
//!   stable equilibria are the zeros of Ulam polynomials.
//!
//! All numerics are generic over the floating-point scalar through
//! [`Scalar`]; the `*64` aliases fix `f64`, which is what the command-line
//! driver and the acceptance suite use.

pub mod dynamics;
pub mod homotopy;
pub mod hypergeom;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod ulam;

mod error;

pub use error::{Error, Result};
pub use scalar::Scalar;

use num_complex::Complex;

/// Double-precision complex number, the default scalar of the toolkit.
pub type C64 = Complex<f64>;
/// Ordered complex vector over `f64`.
pub type CVec64 = poly::CVec<f64>;
/// Monic polynomial over `f64`.
pub type MonicPoly64 = poly::MonicPoly<f64>;
/// Dense complex matrix over `f64`.
pub type CMatrix64 = linalg::CMatrix<f64>;
/// Polished fixed-point record over `f64`.
pub type FixedPointRecord64 = ulam::FixedPointRecord<f64>;
/// Homotopy solution set over `f64`.
pub type SolutionSet64 = homotopy::SolutionSet<f64>;
