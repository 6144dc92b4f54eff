//! Complex polynomial arithmetic: elementary symmetric polynomials, monic
//! polynomials keyed by their non-leading coefficients, Horner evaluation and
//! a simultaneous (Aberth–Ehrlich) root finder.
//!
//! A degree-`N` monic polynomial is stored as the vector `c_1..c_N` with
//! `c_j` multiplying `x^(N-j)`; the leading coefficient is implicitly one.

use num_complex::Complex;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::scalar::is_finite_c;
use crate::{Error, Result, Scalar};

/// Ordered vector of complex numbers (coefficients, roots or residuals).
///
/// Construction validates that every component is finite; the entries are
/// immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec<S: Scalar>(Vec<Complex<S>>);

impl<S: Scalar> CVec<S> {
    pub fn new(entries: Vec<Complex<S>>) -> Result<Self> {
        if entries.iter().all(is_finite_c) {
            Ok(Self(entries))
        } else {
            Err(Error::NonFinite)
        }
    }

    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex::new(S::zero(), S::zero()); len])
    }

    /// Builds a vector from `(re, im)` pairs given as `f64`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self(
            pairs
                .iter()
                .map(|&(re, im)| Complex::new(S::of(re), S::of(im)))
                .collect(),
        )
    }

    /// Builds a real vector from `f64` values.
    pub fn from_reals(values: &[f64]) -> Self {
        Self(
            values
                .iter()
                .map(|&re| Complex::new(S::of(re), S::zero()))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[Complex<S>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest component modulus (max-norm); zero for the empty vector.
    pub fn max_norm(&self) -> S {
        self.0
            .iter()
            .map(|z| z.norm())
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Euclidean norm over all components.
    pub fn l2_norm(&self) -> S {
        self.0
            .iter()
            .map(|z| z.norm_sqr())
            .fold(S::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Euclidean distance to another vector of the same length.
    pub fn l2_dist(&self, other: &Self) -> S {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .fold(S::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Max-norm distance to another vector of the same length.
    pub fn max_dist(&self, other: &Self) -> S {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Smallest pairwise distance between components; `None` when fewer than
    /// two entries.
    pub fn min_pairwise_gap(&self) -> Option<S> {
        if self.len() < 2 {
            return None;
        }
        let mut min = S::infinity();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                min = min.min((self.0[i] - self.0[j]).norm());
            }
        }
        Some(min)
    }

    /// Entries sorted lexicographically by `(re, im)`. Used to canonicalize
    /// unordered root sets before comparison.
    pub fn sorted_lex(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        Self(v)
    }
}

impl<S: Scalar> std::ops::Deref for CVec<S> {
    type Target = [Complex<S>];

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<S: Scalar> std::ops::Index<usize> for CVec<S> {
    type Output = Complex<S>;

    fn index(&self, i: usize) -> &Complex<S> {
        &self.0[i]
    }
}

/// Serializes as a sequence of `[re, im]` pairs.
impl<S: Scalar + Serialize> Serialize for CVec<S> {
    fn serialize<T: Serializer>(&self, serializer: T) -> std::result::Result<T::Ok, T::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for z in &self.0 {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

/// All elementary symmetric polynomials `e_0..e_n` of the given entries,
/// computed by the iterative Vieta recurrence (multiplying out one linear
/// factor at a time).
pub fn elem_sym_all<S: Scalar>(entries: &[Complex<S>]) -> Vec<Complex<S>> {
    let zero = Complex::new(S::zero(), S::zero());
    let one = Complex::new(S::one(), S::zero());
    let mut e = vec![zero; entries.len() + 1];
    e[0] = one;
    for (k, c) in entries.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] = e[j] + *c * e[j - 1];
        }
    }
    e
}

/// `j`-th elementary symmetric polynomial of the entries of `c`, with
/// `elem_sym(c, 0) = 1` by convention.
pub fn elem_sym<S: Scalar>(c: &CVec<S>, j: usize) -> Result<Complex<S>> {
    if j > c.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: c.len(),
        });
    }
    Ok(elem_sym_all(c.entries())[j])
}

/// `e_0..e_{n-1}` of the entries with index `skip` removed.
pub(crate) fn elem_sym_all_excluding<S: Scalar>(
    entries: &[Complex<S>],
    skip: usize,
) -> Vec<Complex<S>> {
    let reduced: Vec<_> = entries
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, z)| *z)
        .collect();
    elem_sym_all(&reduced)
}

/// Monic polynomial of positive degree `N`, stored by its `N` non-leading
/// coefficients `c_1..c_N` (`c_j` multiplies `x^(N-j)`).
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPoly<S: Scalar> {
    coeffs: CVec<S>,
}

impl<S: Scalar> MonicPoly<S> {
    pub fn new(coeffs: CVec<S>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { coeffs })
    }

    /// The pure power `x^n`.
    pub fn pure_power(n: usize) -> Result<Self> {
        Self::new(CVec::zeros(n))
    }

    /// The monic polynomial with the given zeros: `prod (x - r_n)`, so that
    /// `c_j = (-1)^j e_j(roots)`.
    pub fn from_roots(roots: &CVec<S>) -> Result<Self> {
        let e = elem_sym_all(roots.entries());
        let mut coeffs = Vec::with_capacity(roots.len());
        let mut sign = -S::one();
        for ej in e.iter().skip(1) {
            coeffs.push(ej.scale(sign));
            sign = -sign;
        }
        Self::new(CVec::new(coeffs)?)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &CVec<S> {
        &self.coeffs
    }

    /// Horner evaluation of `z^N + sum c_m z^(N-m)`.
    pub fn eval(&self, z: Complex<S>) -> Complex<S> {
        let mut acc = Complex::new(S::one(), S::zero());
        for c in self.coeffs.entries() {
            acc = acc * z + c;
        }
        acc
    }

    /// Evaluates the polynomial and its first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex<S>) -> (Complex<S>, Complex<S>) {
        let mut acc = Complex::new(S::one(), S::zero());
        let mut dacc = Complex::new(S::zero(), S::zero());
        for c in self.coeffs.entries() {
            dacc = dacc * z + acc;
            acc = acc * z + c;
        }
        (acc, dacc)
    }

    /// Coefficient list of the derivative, a non-monic polynomial of degree
    /// `N-1` returned in descending powers: `[N, (N-1)c_1, ..., 1*c_{N-1}]`.
    pub fn derivative(&self) -> CVec<S> {
        let n = self.degree();
        let mut out = Vec::with_capacity(n);
        out.push(Complex::new(S::of(n as f64), S::zero()));
        for (m, c) in self.coeffs.entries().iter().take(n - 1).enumerate() {
            // coefficient of x^(N-m-1) is c_{m+1}; its derivative weight is N-m-1
            out.push(c.scale(S::of((n - m - 1) as f64)));
        }
        CVec::new(out).expect("derivative of finite coefficients is finite")
    }

    /// All `N` roots with multiplicity, in unspecified order, each meeting
    /// the backward-error criterion at tolerance `tol` (or a correction of
    /// that size). Aberth–Ehrlich simultaneous iteration started from
    /// perturbed roots of unity scaled by the Cauchy bound `1 + max |c_j|`.
    pub fn roots(&self, tol: S) -> Result<CVec<S>> {
        let n = self.degree();
        let zero = Complex::new(S::zero(), S::zero());

        // Cauchy-style inclusion radius.
        let radius = S::one() + self.coeffs.max_norm();
        let tau = S::of(2.0) * S::PI();
        let offset = S::of(0.45);
        let mut z: Vec<Complex<S>> = (0..n)
            .map(|k| {
                let theta = tau * S::of(k as f64) / S::of(n as f64) + offset;
                Complex::from_polar(radius, theta)
            })
            .collect();

        let max_sweeps = 500;
        for _ in 0..max_sweeps {
            let mut all_done = true;
            for i in 0..n {
                let (p, dp) = self.eval_with_derivative(z[i]);
                // Backward-error scale: sum |c_m| |z|^(N-m) including the
                // leading term.
                let az = z[i].norm();
                let mut scale = S::one();
                for c in self.coeffs.entries() {
                    scale = scale * az + c.norm();
                }
                if p == zero || p.norm() <= tol * scale {
                    continue;
                }
                let newton = if dp == zero {
                    // Exactly critical point: nudge off it.
                    Complex::new(S::of(1e-6) * (S::one() + az), S::of(1e-6))
                } else {
                    p / dp
                };
                let mut repulsion = zero;
                for j in 0..n {
                    if j != i {
                        let mut d = z[i] - z[j];
                        if d == zero {
                            d = Complex::new(S::of(1e-12) * (S::one() + az), S::zero());
                        }
                        repulsion = repulsion + d.inv();
                    }
                }
                let denom = Complex::new(S::one(), S::zero()) - newton * repulsion;
                let correction = if denom == zero { newton } else { newton / denom };
                z[i] = z[i] - correction;
                if correction.norm() > tol * (S::one() + z[i].norm()) {
                    all_done = false;
                }
            }
            if all_done {
                return CVec::new(z);
            }
        }
        Err(Error::RootsNonConvergence(max_sweeps))
    }
}

/// Horner evaluation of a dense polynomial given in descending powers
/// (leading coefficient first). Empty input evaluates to zero.
pub(crate) fn dense_eval<S: Scalar>(coeffs: &[Complex<S>], z: Complex<S>) -> Complex<S> {
    let mut acc = Complex::new(S::zero(), S::zero());
    for c in coeffs {
        acc = acc * z + c;
    }
    acc
}

/// Derivative of a dense polynomial in descending powers.
pub(crate) fn dense_derivative<S: Scalar>(coeffs: &[Complex<S>]) -> Vec<Complex<S>> {
    let deg = coeffs.len().saturating_sub(1);
    coeffs
        .iter()
        .take(deg)
        .enumerate()
        .map(|(k, c)| c.scale(S::of((deg - k) as f64)))
        .collect()
}
