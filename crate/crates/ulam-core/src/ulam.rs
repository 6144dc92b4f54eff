//! The coefficients-to-zeros map on monic polynomials, its fixed-point
//! residual systems with analytic Jacobians, Newton polishing, the algebraic
//! identity checks satisfied at fixed points, equivalent-system verification
//! and orbit iteration.

use num_complex::Complex;
use serde::Serialize;

use crate::linalg::CMatrix;
use crate::poly::{dense_derivative, dense_eval, elem_sym_all, elem_sym_all_excluding, CVec, MonicPoly};
use crate::{Error, Result, Scalar};

/// Modulus threshold below which a component counts as structurally zero.
pub fn zero_threshold<S: Scalar>() -> S {
    S::of(1e-8)
}

/// Default residual tolerance for Newton polishing.
pub fn polish_tolerance<S: Scalar>() -> S {
    S::of(1e-12)
}

/// Default tolerance for identity and equivalence checks on polished points.
pub fn identity_tolerance<S: Scalar>() -> S {
    S::of(1e-8)
}

/// Applies the coefficients-to-zeros map: the result is the coefficient
/// vector of `prod (x - c_n)`, i.e. `((-1)^j e_j(c))` for `j = 1..N`.
pub fn ulam_map<S: Scalar>(c: &CVec<S>) -> CVec<S> {
    let e = elem_sym_all(c.entries());
    let mut out = Vec::with_capacity(c.len());
    let mut sign = -S::one();
    for ej in e.iter().skip(1) {
        out.push(ej.scale(sign));
        sign = -sign;
    }
    CVec::new(out).expect("map of finite input is finite")
}

/// Which square residual system describes the fixed points.
///
/// `Full` is the direct fixed-point system `alpha_j = e_j(c) - (-1)^j c_j`
/// for `j = 1..N`. `Tilde` keeps `alpha_1..alpha_{N-1}` and replaces the last
/// equation by the deflated product condition
/// `alpha~_N = e_{N-1}(c_1..c_{N-1}) - (-1)^N`, which carves out the
/// solutions with `c_N != 0` (plus possibly some with `c_N = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualSystem {
    Full,
    Tilde,
}

impl ResidualSystem {
    /// Component degrees of the system on `C^n`.
    /// `Full`: `1, 2, ..., n`; `Tilde`: `1, 2, ..., n-1, n-1`.
    pub fn degrees(&self, n: usize) -> Vec<usize> {
        match self {
            ResidualSystem::Full => (1..=n).collect(),
            ResidualSystem::Tilde => {
                let mut d: Vec<usize> = (1..n).collect();
                d.push(n - 1);
                d
            }
        }
    }

    /// Product of the component degrees: the number of homotopy paths.
    pub fn bezout_number(&self, n: usize) -> u64 {
        self.degrees(n).iter().map(|&d| d as u64).product()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        let min = match self {
            ResidualSystem::Full => 1,
            ResidualSystem::Tilde => 2,
        };
        if n < min {
            return Err(Error::DimensionMismatch {
                expected: min,
                got: n,
            });
        }
        Ok(())
    }
}

/// Residual vector of the chosen system at `c`.
pub fn residual<S: Scalar>(c: &CVec<S>, sys: ResidualSystem) -> Result<CVec<S>> {
    let n = c.len();
    sys.check_dim(n)?;
    let e = elem_sym_all(c.entries());
    let mut out = Vec::with_capacity(n);
    let mut sign = -S::one();
    let full_rows = match sys {
        ResidualSystem::Full => n,
        ResidualSystem::Tilde => n - 1,
    };
    for j in 1..=full_rows {
        out.push(e[j] - c[j - 1].scale(sign));
        sign = -sign;
    }
    if sys == ResidualSystem::Tilde {
        // sign now equals (-1)^N
        let head = elem_sym_all(&c.entries()[..n - 1]);
        out.push(head[n - 1] - Complex::new(sign, S::zero()));
    }
    CVec::new(out)
}

/// Analytic Jacobian of [`residual`] at `c`, using
/// `d e_j / d c_i = e_{j-1}` of `c` with entry `i` removed.
pub fn jacobian<S: Scalar>(c: &CVec<S>, sys: ResidualSystem) -> Result<CMatrix<S>> {
    let n = c.len();
    sys.check_dim(n)?;
    let mut jac = CMatrix::zeros(n, n);
    let full_rows = match sys {
        ResidualSystem::Full => n,
        ResidualSystem::Tilde => n - 1,
    };
    for i in 0..n {
        let ex = elem_sym_all_excluding(c.entries(), i);
        for j in 1..=full_rows {
            jac[(j - 1, i)] = ex[j - 1];
        }
    }
    for j in 1..=full_rows {
        let sign = if j % 2 == 0 { S::one() } else { -S::one() };
        jac[(j - 1, j - 1)] = jac[(j - 1, j - 1)] - Complex::new(sign, S::zero());
    }
    if sys == ResidualSystem::Tilde {
        let head = &c.entries()[..n - 1];
        for i in 0..n - 1 {
            let ex = elem_sym_all_excluding(head, i);
            jac[(n - 1, i)] = ex[n - 2];
        }
        // last equation does not involve c_N: column stays zero
    }
    Ok(jac)
}

/// Hessian of residual row `row` contracted with the vector `v`:
/// `(H v)_{s} = sum_m d^2 alpha_row / (d c_s d c_m) v_m`.
/// Second partials of `e_j` are `e_{j-2}` of the entries with both indices
/// removed (zero on the diagonal).
#[allow(clippy::needless_range_loop)]
pub(crate) fn hessian_times<S: Scalar>(
    c: &CVec<S>,
    sys: ResidualSystem,
    row: usize,
    v: &[Complex<S>],
) -> Vec<Complex<S>> {
    let n = c.len();
    let zero = Complex::new(S::zero(), S::zero());
    let mut out = vec![zero; n];
    let tilde_row = sys == ResidualSystem::Tilde && row == n - 1;
    let (entries, e_order): (&[Complex<S>], usize) = if tilde_row {
        (&c.entries()[..n - 1], n - 1)
    } else {
        (c.entries(), row + 1)
    };
    if e_order < 2 {
        return out;
    }
    let m = entries.len();
    for s in 0..m {
        let mut acc = zero;
        for t in 0..m {
            if t == s {
                continue;
            }
            let reduced: Vec<Complex<S>> = entries
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != s && *i != t)
                .map(|(_, z)| *z)
                .collect();
            let e = elem_sym_all(&reduced);
            acc = acc + e[e_order - 2] * v[t];
        }
        out[s] = acc;
    }
    out
}

/// A polished solution point with its structural flags.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct FixedPointRecord<S: Scalar> {
    /// Solution point in `C^N`.
    pub point: CVec<S>,
    /// Max-norm of the residual system evaluated at `point`.
    pub residual: S,
    /// Number of homotopy endpoints merged into this record.
    pub cluster_size: usize,
    /// Number of trailing components with modulus below [`zero_threshold`].
    pub zero_tail: usize,
    /// All imaginary parts below [`zero_threshold`].
    pub is_real: bool,
}

impl<S: Scalar> FixedPointRecord<S> {
    /// Builds a record (cluster size 1) from a point, computing the residual
    /// and the structural flags.
    pub fn from_point(point: CVec<S>, sys: ResidualSystem) -> Result<Self> {
        let res = residual(&point, sys)?.max_norm();
        let thr = zero_threshold::<S>();
        let zero_tail = point
            .entries()
            .iter()
            .rev()
            .take_while(|z| z.norm() < thr)
            .count();
        let is_real = point.entries().iter().all(|z| z.im.abs() < thr);
        Ok(Self {
            point,
            residual: res,
            cluster_size: 1,
            zero_tail,
            is_real,
        })
    }

    /// True when every zero component is only followed by zero components.
    pub fn has_zero_tail_property(&self) -> bool {
        let thr = zero_threshold::<S>();
        let mut seen_zero = false;
        for z in self.point.entries() {
            let is_zero = z.norm() < thr;
            if seen_zero && !is_zero {
                return false;
            }
            seen_zero = seen_zero || is_zero;
        }
        true
    }

    /// True when every component modulus exceeds the zero threshold.
    pub fn all_nonzero(&self) -> bool {
        self.zero_tail == 0 && self.has_zero_tail_property()
    }
}

/// Newton iteration on the chosen residual system from `c0`.
///
/// Iterates until the update stalls at rounding level or `max_iter` is
/// reached, then returns the iterate with the smallest residual max-norm,
/// provided it meets `tol`. A singular Jacobian before any iterate meets
/// `tol` signals a solution of multiplicity larger than one.
pub fn newton_polish<S: Scalar>(
    c0: &CVec<S>,
    sys: ResidualSystem,
    tol: S,
    max_iter: usize,
) -> Result<FixedPointRecord<S>> {
    let mut x = c0.clone();
    let mut best_norm = residual(&x, sys)?.max_norm();
    let mut best = x.clone();
    let step_floor = S::epsilon() * S::of(4.0);

    for _ in 0..max_iter {
        let r = residual(&x, sys)?;
        let rn = r.max_norm();
        if rn < best_norm {
            best_norm = rn;
            best = x.clone();
        }
        let jac = jacobian(&x, sys)?;
        let neg_r: Vec<Complex<S>> = r.entries().iter().map(|z| -z).collect();
        let delta = match jac.solve(&neg_r) {
            Ok(d) => d,
            Err(Error::SingularJacobian) => {
                if best_norm <= tol {
                    return FixedPointRecord::from_point(best, sys);
                }
                return Err(Error::SingularJacobian);
            }
            Err(e) => return Err(e),
        };
        let entries: Vec<Complex<S>> = x
            .entries()
            .iter()
            .zip(delta.iter())
            .map(|(a, d)| a + d)
            .collect();
        let step: S = delta
            .iter()
            .map(|d| d.norm())
            .fold(S::zero(), |a, b| a.max(b));
        x = CVec::new(entries).map_err(|_| Error::MaxIterations(max_iter))?;
        if step <= step_floor * (S::one() + x.max_norm()) {
            break;
        }
    }
    let rn = residual(&x, sys)?.max_norm();
    if rn < best_norm {
        best_norm = rn;
        best = x;
    }
    if best_norm <= tol {
        FixedPointRecord::from_point(best, sys)
    } else {
        Err(Error::MaxIterations(max_iter))
    }
}

/// Max absolute defects of the four fixed-point identities at a claimed
/// fixed point. The derivative-based identities require pairwise-distinct
/// components and are reported as `None` (skipped) otherwise.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct IdentityReport<S: Scalar> {
    /// Max-norm of the direct fixed-point residual at the point.
    pub fixed_point_defect: S,
    /// Whether the point meets the fixed-point precondition at the given
    /// tolerance.
    pub claimed_fixed_point: bool,
    /// `p(g_n) = 0`: the components are zeros of the polynomial they define.
    pub value_at_zeros: S,
    /// `p'(g_n) = prod_{m != n} (g_n - g_m)`; skipped at repeated components.
    pub derivative_product: Option<S>,
    /// `p''(g_n) = 2 sum_{m != n} prod_{k != n,m} (g_n - g_k)`; skipped at
    /// repeated components.
    pub second_derivative_sum: Option<S>,
    /// `p(g_n) = 0` after substituting each coefficient by `(-1)^m e_m(g)`.
    pub vieta_substitution: S,
    /// True when the derivative identities were skipped.
    pub skipped_repeated_components: bool,
}

impl<S: Scalar> IdentityReport<S> {
    /// Largest defect over the identities that were evaluated.
    pub fn max_defect(&self) -> S {
        let mut m = self.value_at_zeros.max(self.vieta_substitution);
        if let Some(d) = self.derivative_product {
            m = m.max(d);
        }
        if let Some(d) = self.second_derivative_sum {
            m = m.max(d);
        }
        m
    }

    pub fn pass(&self, tol: S) -> bool {
        self.max_defect() <= tol
    }
}

/// Evaluates the four identities satisfied by the zeros of a fixed point
/// `gamma` and reports the max absolute defect of each.
pub fn verify_identities<S: Scalar>(gamma: &CVec<S>, tol: S) -> Result<IdentityReport<S>> {
    let n = gamma.len();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    let fixed_point_defect = residual(gamma, ResidualSystem::Full)?.max_norm();
    let p = MonicPoly::new(gamma.clone())?;
    let distinct = gamma
        .min_pairwise_gap()
        .is_none_or(|g| g > zero_threshold::<S>());

    // p(g_n) = 0
    let value_at_zeros = gamma
        .entries()
        .iter()
        .map(|&g| p.eval(g).norm())
        .fold(S::zero(), |a, b| a.max(b));

    // coefficients replaced by (-1)^m e_m(gamma)
    let q = MonicPoly::new(ulam_map(gamma))?;
    let vieta_substitution = gamma
        .entries()
        .iter()
        .map(|&g| q.eval(g).norm())
        .fold(S::zero(), |a, b| a.max(b));

    let (derivative_product, second_derivative_sum) = if distinct {
        // dense coefficient list [1, c_1, ..., c_N] and its second derivative
        let full: Vec<Complex<S>> = std::iter::once(Complex::new(S::one(), S::zero()))
            .chain(gamma.entries().iter().copied())
            .collect();
        let second = dense_derivative(&dense_derivative(&full));

        let mut d1 = S::zero();
        let mut d2 = S::zero();
        for (idx, &g) in gamma.entries().iter().enumerate() {
            let (_, dp) = p.eval_with_derivative(g);
            let mut prod = Complex::new(S::one(), S::zero());
            for (m, &gm) in gamma.entries().iter().enumerate() {
                if m != idx {
                    prod = prod * (g - gm);
                }
            }
            d1 = d1.max((dp - prod).norm());

            // p''(g_n) against the double-sum product form
            let lhs = dense_eval(&second, g);
            let mut rhs = Complex::new(S::zero(), S::zero());
            for m in 0..n {
                if m == idx {
                    continue;
                }
                let mut prod = Complex::new(S::one(), S::zero());
                for k in 0..n {
                    if k != idx && k != m {
                        prod = prod * (g - gamma[k]);
                    }
                }
                rhs = rhs + prod;
            }
            rhs = rhs.scale(S::of(2.0));
            d2 = d2.max((lhs - rhs).norm());
        }
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };

    Ok(IdentityReport {
        fixed_point_defect,
        claimed_fixed_point: fixed_point_defect <= tol,
        value_at_zeros,
        derivative_product,
        second_derivative_sum,
        vieta_substitution,
        skipped_repeated_components: !distinct,
    })
}

/// Which interpolation-based system stands in for the fixed-point system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivVariant {
    /// Match of the two monic forms at `N` pairwise-distinct nodes.
    ValueNodes,
    /// Match of the value at the first node and of the derivative at nodes
    /// `2..N`, which must be pairwise distinct.
    DerivativeNodes,
}

/// Checks whether the interpolation system chosen by `variant` holds at
/// `(c, t)` within `tol`. Both variants are equivalent to `c` being a fixed
/// point, provided the node-distinctness preconditions hold.
pub fn verify_equivalent_system<S: Scalar>(
    c: &CVec<S>,
    t: &CVec<S>,
    variant: EquivVariant,
    tol: S,
) -> Result<bool> {
    let n = c.len();
    if t.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: t.len(),
        });
    }
    let gap_ok = |nodes: &[Complex<S>]| -> bool {
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if nodes[i] == nodes[j] {
                    return false;
                }
            }
        }
        true
    };
    let q = MonicPoly::new(c.clone())?;

    // prod (x - c_m) at a node
    let root_form = |x: Complex<S>| -> Complex<S> {
        let mut prod = Complex::new(S::one(), S::zero());
        for &cm in c.entries() {
            prod = prod * (x - cm);
        }
        prod
    };

    match variant {
        EquivVariant::ValueNodes => {
            if !gap_ok(t.entries()) {
                return Err(Error::RepeatedNodes);
            }
            for &node in t.entries() {
                if (q.eval(node) - root_form(node)).norm() > tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        EquivVariant::DerivativeNodes => {
            if n < 1 || !gap_ok(&t.entries()[1..]) {
                return Err(Error::RepeatedNodes);
            }
            if (q.eval(t[0]) - root_form(t[0])).norm() > tol {
                return Ok(false);
            }
            for &node in &t.entries()[1..] {
                let (_, dq) = q.eval_with_derivative(node);
                // derivative of the product form: sum over n of the product
                // with factor n omitted
                let mut dr = Complex::new(S::zero(), S::zero());
                for skip in 0..n {
                    let mut prod = Complex::new(S::one(), S::zero());
                    for (m, &cm) in c.entries().iter().enumerate() {
                        if m != skip {
                            prod = prod * (node - cm);
                        }
                    }
                    dr = dr + prod;
                }
                if (dq - dr).norm() > tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Checks the zero-padding facts about a fixed point `gamma`:
/// (a) appending `n` zeros yields a fixed point in dimension `N + n`, and
/// (b) within `gamma` itself every zero component is followed only by zeros.
pub fn pad_check<S: Scalar>(gamma: &CVec<S>, n: usize, tol: S) -> Result<bool> {
    let mut padded = gamma.entries().to_vec();
    padded.extend(std::iter::repeat_n(Complex::new(S::zero(), S::zero()), n));
    let padded = CVec::new(padded)?;
    let a = residual(&padded, ResidualSystem::Full)?.max_norm() <= tol;
    let b = FixedPointRecord::from_point(gamma.clone(), ResidualSystem::Full)?
        .has_zero_tail_property();
    Ok(a && b)
}

/// Orbit of repeated applications of the map, with cycle-candidate detection.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct Orbit<S: Scalar> {
    /// Visited states `c0, psi(c0), psi^2(c0), ...`.
    pub states: Vec<CVec<S>>,
    /// Indices `(first, revisit)` of the first detected revisit within the
    /// revisit tolerance, if any.
    pub cycle: Option<(usize, usize)>,
}

/// Iterates the map from `c0` for up to `steps` applications, stopping early
/// at the first revisit of an earlier state (max-norm within `1e-9`).
/// Components exceeding modulus `1e12` abort with an overflow error.
pub fn iterate_map<S: Scalar>(c0: &CVec<S>, steps: usize) -> Result<Orbit<S>> {
    let revisit_tol = S::of(1e-9);
    let escape = S::of(1e12);
    let mut states = vec![c0.clone()];
    let mut cycle = None;

    for k in 1..=steps {
        let next = ulam_map(states.last().unwrap());
        if next.max_norm() > escape {
            return Err(Error::Overflow(1e12));
        }
        for (j, prev) in states.iter().enumerate() {
            if prev.max_dist(&next) <= revisit_tol {
                cycle = Some((j, k));
                break;
            }
        }
        states.push(next);
        if cycle.is_some() {
            break;
        }
    }
    Ok(Orbit { states, cycle })
}
