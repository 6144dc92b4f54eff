//! The solvable zero-relaxation flow. For a fixed point `gamma` with
//! pairwise-distinct components, the zeros `zeta(t)` of a time-deformed
//! monic polynomial obey
//!
//! ```text
//! zeta_n' = -[prod_{l != n} (zeta_n - zeta_l)]^{-1} p(zeta_n),
//! ```
//!
//! where `p` is the polynomial with coefficient vector `gamma`. With the
//! deformation constants fixed to `a = 0`, `b_m = c_m(0) - gamma_m`, the
//! coefficient flow is exactly `c_m(t) = gamma_m + b_m e^(-t)`, which gives
//! a closed-form oracle for the integrator: relax the coefficients, re-root
//! the polynomial, and keep the labeling continuous. The linearization at
//! `gamma` is minus the identity, so every such equilibrium is
//! asymptotically stable.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::CMatrix;
use crate::poly::{CVec, MonicPoly};
use crate::ulam::{residual, ResidualSystem};
use crate::{Error, Result, Scalar};

/// Minimum pairwise gap below which the flow is considered collided.
pub fn collision_guard<S: Scalar>() -> S {
    S::of(1e-10)
}

/// Deformation constants of the coefficient flow: `a` is fixed to zero and
/// `b_m = c_m(0) - gamma_m`, so the coefficients relax exponentially onto
/// `gamma`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct FlowParams<S: Scalar> {
    pub a: Complex<S>,
    pub b: CVec<S>,
}

impl<S: Scalar> FlowParams<S> {
    /// Constants for the trajectory started at `zeta0`.
    pub fn from_initial(zeta0: &CVec<S>, gamma: &CVec<S>) -> Result<Self> {
        let c0 = MonicPoly::from_roots(zeta0)?;
        let b: Vec<Complex<S>> = c0
            .coeffs()
            .entries()
            .iter()
            .zip(gamma.entries())
            .map(|(c, g)| c - g)
            .collect();
        Ok(Self {
            a: Complex::new(S::zero(), S::zero()),
            b: CVec::new(b)?,
        })
    }
}

fn require_distinct<S: Scalar>(v: &CVec<S>, what: &'static str) -> Result<()> {
    if let Some(gap) = v.min_pairwise_gap() {
        if gap <= collision_guard::<S>() {
            return Err(match what {
                "state" => Error::Collision,
                _ => Error::Inadmissible("components must be pairwise distinct"),
            });
        }
    }
    Ok(())
}

/// Right-hand side of the flow at state `zeta` for the equilibrium data
/// `gamma`. Fails with [`Error::Collision`] when two components are closer
/// than the guard.
pub fn flow_rhs<S: Scalar>(zeta: &CVec<S>, gamma: &CVec<S>) -> Result<CVec<S>> {
    require_distinct(zeta, "state")?;
    let p = MonicPoly::new(gamma.clone())?;
    let mut out = Vec::with_capacity(zeta.len());
    for (n, &zn) in zeta.entries().iter().enumerate() {
        let mut prod = Complex::new(S::one(), S::zero());
        for (l, &zl) in zeta.entries().iter().enumerate() {
            if l != n {
                prod = prod * (zn - zl);
            }
        }
        out.push(-p.eval(zn) / prod);
    }
    CVec::new(out)
}

/// Time-stamped trajectory of the flow.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct FlowTrajectory<S: Scalar> {
    pub times: Vec<S>,
    pub states: Vec<CVec<S>>,
    /// Equilibrium data defining the flow.
    pub gamma: CVec<S>,
    /// True when the integration stopped early at the collision guard.
    pub collision_flag: bool,
}

impl<S: Scalar> FlowTrajectory<S> {
    pub fn final_state(&self) -> &CVec<S> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn rk4_step<S: Scalar>(state: &CVec<S>, gamma: &CVec<S>, dt: S) -> Result<CVec<S>> {
    let advance = |base: &CVec<S>, k: &CVec<S>, w: S| -> Result<CVec<S>> {
        CVec::new(
            base.entries()
                .iter()
                .zip(k.entries())
                .map(|(x, d)| x + d.scale(w))
                .collect(),
        )
    };
    let half = dt * S::of(0.5);
    let k1 = flow_rhs(state, gamma)?;
    let k2 = flow_rhs(&advance(state, &k1, half)?, gamma)?;
    let k3 = flow_rhs(&advance(state, &k2, half)?, gamma)?;
    let k4 = flow_rhs(&advance(state, &k3, dt)?, gamma)?;
    let sixth = dt / S::of(6.0);
    CVec::new(
        state
            .entries()
            .iter()
            .zip(k1.entries())
            .zip(k2.entries().iter().zip(k3.entries()))
            .zip(k4.entries())
            .map(|(((x, a), (b, c)), d)| {
                x + (a + b.scale(S::of(2.0)) + c.scale(S::of(2.0)) + d).scale(sixth)
            })
            .collect(),
    )
}

fn check_flow_inputs<S: Scalar>(zeta0: &CVec<S>, gamma: &CVec<S>) -> Result<()> {
    if zeta0.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            expected: gamma.len(),
            got: zeta0.len(),
        });
    }
    // only distinct-component equilibria are admitted
    require_distinct(gamma, "gamma")?;
    require_distinct(zeta0, "state")?;
    Ok(())
}

/// Classical fixed-step fourth-order integration of the flow from `zeta0`
/// over `[0, t_end]`. The trajectory truncates with `collision_flag` when
/// the pairwise-distance guard trips mid-integration.
pub fn integrate<S: Scalar>(
    zeta0: &CVec<S>,
    gamma: &CVec<S>,
    t_end: S,
    dt: S,
) -> Result<FlowTrajectory<S>> {
    check_flow_inputs(zeta0, gamma)?;
    let steps = (t_end / dt).round().to_usize().unwrap_or(0);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(S::zero());
    states.push(zeta0.clone());
    let mut collision = false;

    for k in 1..=steps {
        match rk4_step(states.last().unwrap(), gamma, dt) {
            Ok(next) => {
                if next
                    .min_pairwise_gap()
                    .is_some_and(|g| g <= collision_guard::<S>())
                {
                    collision = true;
                    break;
                }
                times.push(dt * S::of(k as f64));
                states.push(next);
            }
            Err(Error::Collision) => {
                collision = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(FlowTrajectory {
        times,
        states,
        gamma: gamma.clone(),
        collision_flag: collision,
    })
}

/// State of the closed-form solution at one time, with the pairing
/// diagnostics of the labeling walk.
#[derive(Debug, Clone)]
pub struct OracleSample<S: Scalar> {
    pub state: CVec<S>,
    /// Number of pairing decisions that were ambiguous at the `1e-12`
    /// resolution and fell back to index order.
    pub ambiguous_pairings: usize,
}

/// Greedy nearest-neighbor assignment of `roots` to the labels of `prev`.
fn pair_to_previous<S: Scalar>(
    prev: &CVec<S>,
    roots: &CVec<S>,
) -> (Vec<Complex<S>>, usize) {
    let n = prev.len();
    let ambiguity = S::of(1e-12);
    let mut pairs: Vec<(S, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            pairs.push(((prev[i] - roots[k]).norm(), i, k));
        }
    }
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut label_done = vec![false; n];
    let mut root_done = vec![false; n];
    let mut out = vec![Complex::new(S::zero(), S::zero()); n];
    let mut ambiguous = 0usize;
    let mut assigned = 0usize;
    for (idx, &(d, i, k)) in pairs.iter().enumerate() {
        if label_done[i] || root_done[k] {
            continue;
        }
        // a competing unassigned candidate at indistinguishable distance
        if let Some(&(d2, _, _)) = pairs[idx + 1..]
            .iter()
            .find(|&&(_, i2, k2)| !label_done[i2] && !root_done[k2] && (i2 == i || k2 == k))
        {
            if (d2 - d).abs() < ambiguity {
                ambiguous += 1;
            }
        }
        label_done[i] = true;
        root_done[k] = true;
        out[i] = roots[k];
        assigned += 1;
        if assigned == n {
            break;
        }
    }
    (out, ambiguous)
}

/// Closed-form solution at time `t`: relax the coefficients of the monic
/// polynomial with zeros `zeta0` exponentially onto `gamma`, extract the
/// zeros, and carry the labeling forward along a time walk so components
/// stay continuously identified.
pub fn oracle<S: Scalar>(zeta0: &CVec<S>, gamma: &CVec<S>, t: S) -> Result<OracleSample<S>> {
    check_flow_inputs(zeta0, gamma)?;
    let params = FlowParams::from_initial(zeta0, gamma)?;
    let substep = S::of(0.05);
    let steps = (t / substep).ceil().to_usize().unwrap_or(0).max(1);
    let root_tol = S::of(1e-12);

    let mut prev = zeta0.clone();
    let mut ambiguous = 0usize;
    for k in 1..=steps {
        let tk = t * S::of(k as f64) / S::of(steps as f64);
        let decay = (-tk).exp();
        let coeffs: Vec<Complex<S>> = gamma
            .entries()
            .iter()
            .zip(params.b.entries())
            .map(|(g, b)| g + b.scale(decay))
            .collect();
        let p = MonicPoly::new(CVec::new(coeffs)?)?;
        let roots = p.roots(root_tol)?;
        let (labeled, amb) = pair_to_previous(&prev, &roots);
        ambiguous += amb;
        prev = CVec::new(labeled)?;
    }
    Ok(OracleSample {
        state: prev,
        ambiguous_pairings: ambiguous,
    })
}

/// Analytic Jacobian of the flow right-hand side at an arbitrary
/// non-collided state.
pub fn flow_jacobian<S: Scalar>(zeta: &CVec<S>, gamma: &CVec<S>) -> Result<CMatrix<S>> {
    require_distinct(zeta, "state")?;
    let n = zeta.len();
    let p = MonicPoly::new(gamma.clone())?;
    let f = flow_rhs(zeta, gamma)?;
    let mut jac = CMatrix::zeros(n, n);
    for (i, &zi) in zeta.entries().iter().enumerate() {
        let (_, dp) = p.eval_with_derivative(zi);
        let mut prod = Complex::new(S::one(), S::zero());
        let mut inv_gap_sum = Complex::new(S::zero(), S::zero());
        for (l, &zl) in zeta.entries().iter().enumerate() {
            if l != i {
                prod = prod * (zi - zl);
                inv_gap_sum = inv_gap_sum + (zi - zl).inv();
            }
        }
        jac[(i, i)] = -dp / prod - f[i] * inv_gap_sum;
        for (m, &zm) in zeta.entries().iter().enumerate() {
            if m != i {
                jac[(i, m)] = f[i] * (zi - zm).inv();
            }
        }
    }
    Ok(jac)
}

/// Jacobian of the flow at an admissible equilibrium together with its
/// distance from minus the identity (which it equals analytically).
#[derive(Debug, Clone)]
pub struct EquilibriumJacobian<S: Scalar> {
    pub matrix: CMatrix<S>,
    pub deviation_from_neg_identity: S,
}

/// Evaluates the flow Jacobian at a fixed point `gamma` with
/// pairwise-distinct components and measures its deviation from `-I`.
/// The point must satisfy the fixed-point residual to `1e-9`.
pub fn jacobian_at_equilibrium<S: Scalar>(gamma: &CVec<S>) -> Result<EquilibriumJacobian<S>> {
    require_distinct(gamma, "gamma")?;
    let defect = residual(gamma, ResidualSystem::Full)?.max_norm();
    if defect > S::of(1e-9) {
        return Err(Error::Inadmissible("not a fixed point at 1e-9"));
    }
    let matrix = flow_jacobian(gamma, gamma)?;
    let n = gamma.len();
    let mut neg_identity = CMatrix::zeros(n, n);
    for i in 0..n {
        neg_identity[(i, i)] = Complex::new(-S::one(), S::zero());
    }
    let deviation = matrix.max_abs_diff(&neg_identity);
    Ok(EquilibriumJacobian {
        matrix,
        deviation_from_neg_identity: deviation,
    })
}

/// Outcome of the random-perturbation stability probe.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct StabilityReport<S: Scalar> {
    pub trials: usize,
    /// Trials whose final state matched the equilibrium component-wise
    /// within `1e-6`.
    pub converged: usize,
    /// Trials truncated by the collision guard.
    pub collisions: usize,
    /// Worst final component-wise distance over completed trials.
    pub max_final_error: S,
    pub radius: S,
    pub horizon: S,
}

/// Integrates `trials` random perturbations of `gamma` (each component
/// displaced by at most `radius`) to `t = 25` and counts how many return to
/// `gamma` under the same labeling within `1e-6`.
pub fn stability_probe<S: Scalar>(
    gamma: &CVec<S>,
    radius: S,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport<S>> {
    require_distinct(gamma, "gamma")?;
    let horizon = S::of(25.0);
    let dt = S::of(1e-3);
    let target = S::of(1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut converged = 0usize;
    let mut collisions = 0usize;
    let mut worst = S::zero();

    for _ in 0..trials {
        let entries: Vec<Complex<S>> = gamma
            .entries()
            .iter()
            .map(|g| {
                let r = radius * S::of(rng.gen::<f64>().sqrt());
                let phi = S::of(rng.gen::<f64>() * std::f64::consts::TAU);
                g + Complex::from_polar(r, phi)
            })
            .collect();
        let zeta0 = CVec::new(entries)?;

        // storage-free stepping; only the final state matters
        let steps = (horizon / dt).round().to_usize().unwrap_or(0);
        let mut state = zeta0;
        let mut collided = false;
        for _ in 0..steps {
            match rk4_step(&state, gamma, dt) {
                Ok(next) => state = next,
                Err(Error::Collision) => {
                    collided = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if collided {
            collisions += 1;
            continue;
        }
        let err = state.max_dist(gamma);
        worst = worst.max(err);
        if err <= target {
            converged += 1;
        }
    }

    Ok(StabilityReport {
        trials,
        converged,
        collisions,
        max_final_error: worst,
        radius,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn cv(pairs: &[(f64, f64)]) -> CVec<f64> {
        CVec::from_pairs(pairs)
    }

    #[test]
    fn rhs_vanishes_at_equilibrium_and_permutations() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let f = flow_rhs(&gamma, &gamma).unwrap();
        assert!(f.max_norm() < 1e-14);
        let sigma = cv(&[(-2.0, 0.0), (1.0, 0.0)]);
        let f = flow_rhs(&sigma, &gamma).unwrap();
        assert!(f.max_norm() < 1e-14);
    }

    #[test]
    fn rhs_hand_computed_values() {
        // gamma = (1,-2), zeta = (0,3): f = (-2/3, -10/3)
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let zeta = cv(&[(0.0, 0.0), (3.0, 0.0)]);
        let f = flow_rhs(&zeta, &gamma).unwrap();
        assert!((f[0] - Complex64::new(-2.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((f[1] - Complex64::new(-10.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn collision_detected() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let zeta = cv(&[(0.5, 0.0), (0.5, 1e-12)]);
        assert!(matches!(flow_rhs(&zeta, &gamma), Err(Error::Collision)));
    }

    #[test]
    fn repeated_equilibrium_rejected() {
        let gamma = cv(&[(1.0, 0.0), (-1.0, 0.0), (-1.0, 0.0)]);
        let zeta = cv(&[(1.1, 0.0), (-0.9, 0.1), (-1.1, -0.1)]);
        assert!(matches!(
            integrate(&zeta, &gamma, 1.0, 1e-3),
            Err(Error::Inadmissible(_))
        ));
    }

    #[test]
    fn equilibrium_trajectory_is_constant() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let traj = integrate(&gamma, &gamma, 2.0, 1e-3).unwrap();
        assert!(!traj.collision_flag);
        assert!(traj.final_state().max_dist(&gamma) < 1e-12);
    }

    #[test]
    fn perturbed_start_relaxes_to_equilibrium() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let zeta0 = cv(&[(1.1, 0.0), (-1.9, 0.0)]);
        let traj = integrate(&zeta0, &gamma, 20.0, 1e-3).unwrap();
        assert!(traj.final_state().max_dist(&gamma) < 1e-6);
    }

    #[test]
    fn oracle_round_trips_at_time_zero() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let zeta0 = cv(&[(1.1, 0.0), (-1.9, 0.0)]);
        let s = oracle(&zeta0, &gamma, 0.0).unwrap();
        assert!(s.state.max_dist(&zeta0) < 1e-10);
    }

    #[test]
    fn oracle_limits_onto_equilibrium() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let zeta0 = cv(&[(1.1, 0.0), (-1.9, 0.0)]);
        let s = oracle(&zeta0, &gamma, 30.0).unwrap();
        assert!(s.state.max_dist(&gamma) < 1e-10);
    }

    #[test]
    fn oracle_matches_integrator_midway() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let zeta0 = cv(&[(1.1, 0.0), (-1.9, 0.0)]);
        let traj = integrate(&zeta0, &gamma, 1.0, 1e-3).unwrap();
        let s = oracle(&zeta0, &gamma, 1.0).unwrap();
        assert!(s.state.max_dist(traj.final_state()) < 1e-6);
    }

    #[test]
    fn equilibrium_jacobian_is_negative_identity() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let j = jacobian_at_equilibrium(&gamma).unwrap();
        assert!(j.deviation_from_neg_identity < 1e-8);
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let zeta = cv(&[(0.4, 0.3), (-1.2, -0.5)]);
        let jac = flow_jacobian(&zeta, &gamma).unwrap();
        let h = 1e-6;
        for m in 0..2 {
            let mut plus = zeta.entries().to_vec();
            let mut minus = zeta.entries().to_vec();
            plus[m] += Complex64::new(h, 0.0);
            minus[m] -= Complex64::new(h, 0.0);
            let fp = flow_rhs(&CVec::new(plus).unwrap(), &gamma).unwrap();
            let fm = flow_rhs(&CVec::new(minus).unwrap(), &gamma).unwrap();
            for i in 0..2 {
                let fd = (fp[i] - fm[i]) / Complex64::new(2.0 * h, 0.0);
                assert!(
                    (jac[(i, m)] - fd).norm() < 1e-6,
                    "entry ({i},{m}): {} vs {}",
                    jac[(i, m)],
                    fd
                );
            }
        }
    }

    #[test]
    fn zero_radius_probe_trivially_converges() {
        let gamma = cv(&[(1.0, 0.0), (-2.0, 0.0)]);
        let rep = stability_probe(&gamma, 0.0, 3, 1).unwrap();
        assert_eq!(rep.converged, 3);
        assert_eq!(rep.collisions, 0);
    }
}
