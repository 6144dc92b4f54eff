//! Total-degree homotopy continuation over `C^N`.
//!
//! Every fixed-point system tracked here is deformed from a decoupled start
//! system `x_j^(d_j) = r_j` whose solutions are scaled roots of unity. The
//! convex homotopy `H(x, t) = gamma * t * S(x) + (1 - t) * F(x)` is followed
//! from `t = 1` to `t = 0` with an Euler predictor and a Newton corrector;
//! the unit-modulus constant `gamma` keeps intermediate systems nonsingular
//! with probability one. Endpoints are Newton-polished against the target
//! system, deduplicated by clustering, and the cluster sizes expose solution
//! multiplicities.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::CMatrix;
use crate::poly::CVec;
use crate::ulam::{
    self, hessian_times, newton_polish, polish_tolerance, zero_threshold, FixedPointRecord,
    ResidualSystem,
};
use crate::{Error, Result, Scalar};

/// Tracking limits and thresholds for one homotopy run.
#[derive(Debug, Clone)]
pub struct TrackOptions<S: Scalar> {
    /// Initial continuation step in `t`.
    pub step_init: S,
    /// Smallest step before a path is declared failed.
    pub step_min: S,
    /// Largest step the controller may grow back to.
    pub step_max: S,
    /// Endpoint norm beyond which a path is classified at infinity.
    pub escape_norm: S,
    /// Residual target of the Newton corrector along the path.
    pub corrector_tol: S,
    /// Corrector iterations per step.
    pub corrector_iters: usize,
    /// Total accepted/rejected step budget per path.
    pub max_steps: usize,
    /// Residual target of the endpoint polish.
    pub polish_tol: S,
    /// Newton budget of the endpoint polish.
    pub polish_iters: usize,
}

impl<S: Scalar> Default for TrackOptions<S> {
    fn default() -> Self {
        Self {
            step_init: S::of(0.05),
            step_min: S::of(1e-14),
            step_max: S::of(0.2),
            escape_norm: S::of(1e8),
            corrector_tol: S::of(1e-10),
            corrector_iters: 4,
            max_steps: 10_000,
            polish_tol: polish_tolerance::<S>(),
            polish_iters: 60,
        }
    }
}

impl<S: Scalar> TrackOptions<S> {
    /// Retry profile: halved step bounds, same floors and budgets.
    fn halved(&self) -> Self {
        let mut o = self.clone();
        o.step_init = self.step_init * S::of(0.5);
        o.step_max = self.step_max * S::of(0.5);
        o
    }
}

/// How a tracked path ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    /// Endpoint polished to the target residual.
    Converged,
    /// Endpoint norm exceeded the escape threshold.
    AtInfinity,
    /// Step size underflowed or the step budget ran out.
    Failed,
}

/// Outcome of one tracked path.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct PathResult<S: Scalar> {
    pub start: CVec<S>,
    pub endpoint: CVec<S>,
    pub status: PathStatus,
    pub steps: usize,
    pub min_step: S,
}

/// The decoupled start system `x_j^(d_j) = r_j` with fixed nonzero
/// constants, solved exactly by scaled roots of unity.
#[derive(Debug, Clone)]
pub struct StartSystem<S: Scalar> {
    degrees: Vec<usize>,
    constants: Vec<Complex<S>>,
}

impl<S: Scalar> StartSystem<S> {
    /// Draws the constants from the given RNG: unit-circle points scaled
    /// into `[0.5, 1.5]`.
    pub fn random(degrees: Vec<usize>, rng: &mut impl Rng) -> Self {
        assert!(degrees.iter().all(|&d| d >= 1), "degrees must be >= 1");
        let constants = degrees
            .iter()
            .map(|_| {
                let modulus = S::of(0.5 + rng.gen::<f64>());
                let phase = S::of(rng.gen::<f64>() * std::f64::consts::TAU);
                Complex::from_polar(modulus, phase)
            })
            .collect();
        Self { degrees, constants }
    }

    /// All `prod d_j` start points: Cartesian products of the `d_j`-th roots
    /// of the constants.
    pub fn start_points(&self) -> Vec<CVec<S>> {
        let roots_per_var: Vec<Vec<Complex<S>>> = self
            .degrees
            .iter()
            .zip(self.constants.iter())
            .map(|(&d, r)| {
                let (modulus, phase) = r.to_polar();
                let root_mod = modulus.powf(S::one() / S::of(d as f64));
                (0..d)
                    .map(|k| {
                        let theta = (phase + S::of(k as f64) * S::of(std::f64::consts::TAU))
                            / S::of(d as f64);
                        Complex::from_polar(root_mod, theta)
                    })
                    .collect()
            })
            .collect();

        let total: usize = self.degrees.iter().product();
        let mut points = Vec::with_capacity(total);
        let mut index = vec![0usize; self.degrees.len()];
        for _ in 0..total {
            let entries: Vec<Complex<S>> = index
                .iter()
                .enumerate()
                .map(|(j, &k)| roots_per_var[j][k])
                .collect();
            points.push(CVec::new(entries).expect("roots of unity are finite"));
            // odometer increment
            for (slot, &d) in index.iter_mut().zip(self.degrees.iter()) {
                *slot += 1;
                if *slot < d {
                    break;
                }
                *slot = 0;
            }
        }
        points
    }

    fn eval(&self, x: &CVec<S>) -> Vec<Complex<S>> {
        self.degrees
            .iter()
            .zip(self.constants.iter())
            .enumerate()
            .map(|(j, (&d, r))| x[j].powu(d as u32) - r)
            .collect()
    }

    /// Diagonal Jacobian `d_j x_j^(d_j - 1)`.
    fn jacobian(&self, x: &CVec<S>) -> CMatrix<S> {
        let n = self.degrees.len();
        let mut m = CMatrix::zeros(n, n);
        for (j, &d) in self.degrees.iter().enumerate() {
            m[(j, j)] = x[j].powu((d - 1) as u32).scale(S::of(d as f64));
        }
        m
    }
}

/// All solutions of the start system for the given degrees, deterministic in
/// the seed.
pub fn start_system<S: Scalar>(degrees: &[usize], seed: u64) -> Vec<CVec<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StartSystem::random(degrees.to_vec(), &mut rng).start_points()
}

/// Unit-modulus homotopy constant with phase bounded away from the real
/// axis.
fn random_gamma<S: Scalar>(rng: &mut impl Rng) -> Complex<S> {
    loop {
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let dist = (theta % std::f64::consts::PI)
            .min(std::f64::consts::PI - (theta % std::f64::consts::PI));
        if dist > 0.1 {
            return Complex::from_polar(S::one(), S::of(theta));
        }
    }
}

/// Path tracker for one target system deformed from one start system.
pub struct Tracker<S: Scalar> {
    sys: ResidualSystem,
    start: StartSystem<S>,
    gamma: Complex<S>,
    opts: TrackOptions<S>,
}

impl<S: Scalar> Tracker<S> {
    pub fn new(
        sys: ResidualSystem,
        start: StartSystem<S>,
        gamma: Complex<S>,
        opts: TrackOptions<S>,
    ) -> Self {
        Self {
            sys,
            start,
            gamma,
            opts,
        }
    }

    fn homotopy_residual(&self, x: &CVec<S>, t: S) -> Result<Vec<Complex<S>>> {
        let f = ulam::residual(x, self.sys)?;
        let s = self.start.eval(x);
        let gt = self.gamma.scale(t);
        let omt = S::one() - t;
        Ok(f.entries()
            .iter()
            .zip(s.iter())
            .map(|(fi, si)| gt * si + fi.scale(omt))
            .collect())
    }

    /// Residual max-norm with each component normalized by its degree scale
    /// `(1 + |x|)^(d_j)`, so the corrector target stays meaningful on the
    /// large-norm excursions the paths make.
    fn scaled_residual_norm(&self, r: &[Complex<S>], x: &CVec<S>) -> S {
        let base = S::one() + x.max_norm();
        let mut scale = S::one();
        let mut worst = S::zero();
        let mut last_deg = 0usize;
        for (ri, &d) in r.iter().zip(self.start.degrees.iter()) {
            while last_deg < d {
                scale = scale * base;
                last_deg += 1;
            }
            // degrees are nondecreasing for these systems
            worst = worst.max(ri.norm() / scale);
        }
        worst
    }

    fn homotopy_jacobian(&self, x: &CVec<S>, t: S) -> Result<CMatrix<S>> {
        let n = x.len();
        let jf = ulam::jacobian(x, self.sys)?;
        let js = self.start.jacobian(x);
        let gt = self.gamma.scale(t);
        let omt = S::one() - t;
        let mut out = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = gt * js[(r, c)] + jf[(r, c)].scale(omt);
            }
        }
        Ok(out)
    }

    /// `dH/dt = gamma S(x) - F(x)`.
    fn homotopy_t_derivative(&self, x: &CVec<S>) -> Result<Vec<Complex<S>>> {
        let f = ulam::residual(x, self.sys)?;
        let s = self.start.eval(x);
        Ok(f.entries()
            .iter()
            .zip(s.iter())
            .map(|(fi, si)| self.gamma * si - fi)
            .collect())
    }

    /// Tracks one path from a start point down to `t = 0` and polishes the
    /// endpoint against the target system.
    pub fn track_path(&self, start: &CVec<S>) -> PathResult<S> {
        let o = &self.opts;
        let mut x = start.clone();
        let mut t = S::one();
        let mut dt = o.step_init;
        let mut min_step = o.step_init;
        let mut steps = 0usize;
        let mut streak = 0usize;

        let fail = |x: CVec<S>, steps, min_step| PathResult {
            start: start.clone(),
            endpoint: x,
            status: PathStatus::Failed,
            steps,
            min_step,
        };

        while t > S::zero() {
            if steps >= o.max_steps {
                return fail(x, steps, min_step);
            }
            steps += 1;

            // Euler predictor; on a singular Jacobian fall back to the
            // zero-order prediction and let the corrector work.
            let mut tangent: Option<Vec<Complex<S>>> = None;
            let mut tangent_norm = S::zero();
            if let (Ok(jh), Ok(ht)) = (self.homotopy_jacobian(&x, t), self.homotopy_t_derivative(&x))
            {
                if let Ok(v) = jh.solve(&ht) {
                    tangent_norm = v
                        .iter()
                        .map(|z| z.norm_sqr())
                        .fold(S::zero(), |a, b| a + b)
                        .sqrt();
                    tangent = Some(v);
                }
            }

            // Bound the step so the predicted spatial move stays a fraction
            // of the point scale; the excursions through large norms make
            // the path speed |dx/dt| enormous and a bare t-step useless.
            let mut dt_eff = dt.min(t);
            if tangent_norm > S::zero() {
                let move_cap = S::of(0.05) * (S::one() + x.l2_norm());
                dt_eff = dt_eff.min(move_cap / tangent_norm).max(o.step_min);
                dt_eff = dt_eff.min(t);
            }
            let t_new = t - dt_eff;

            let mut pred = x.clone();
            if let Some(v) = &tangent {
                let entries: Vec<Complex<S>> = x
                    .entries()
                    .iter()
                    .zip(v.iter())
                    .map(|(xi, vi)| xi + vi.scale(dt_eff))
                    .collect();
                if let Ok(p) = CVec::new(entries) {
                    pred = p;
                }
            }

            // Newton corrector at t_new
            let mut corrected = pred;
            let mut total_correction = S::zero();
            let mut ok = false;
            for _ in 0..o.corrector_iters {
                let r = match self.homotopy_residual(&corrected, t_new) {
                    Ok(r) => r,
                    Err(_) => break,
                };
                if self.scaled_residual_norm(&r, &corrected) <= o.corrector_tol {
                    ok = true;
                    break;
                }
                let jh = match self.homotopy_jacobian(&corrected, t_new) {
                    Ok(j) => j,
                    Err(_) => break,
                };
                let neg_r: Vec<Complex<S>> = r.iter().map(|z| -z).collect();
                let delta = match jh.solve(&neg_r) {
                    Ok(d) => d,
                    Err(_) => break,
                };
                total_correction = total_correction
                    + delta
                        .iter()
                        .map(|z| z.norm_sqr())
                        .fold(S::zero(), |a, b| a + b)
                        .sqrt();
                let entries: Vec<Complex<S>> = corrected
                    .entries()
                    .iter()
                    .zip(delta.iter())
                    .map(|(a, d)| a + d)
                    .collect();
                match CVec::new(entries) {
                    Ok(c) => corrected = c,
                    Err(_) => break,
                }
            }
            // final residual check in case the loop exhausted its budget
            if !ok {
                if let Ok(r) = self.homotopy_residual(&corrected, t_new) {
                    ok = self.scaled_residual_norm(&r, &corrected) <= o.corrector_tol;
                }
            }
            // Trust test against path jumping: away from the endgame the
            // correction must stay small next to the predictor step,
            // otherwise the iterate may have hopped onto a different path.
            if ok
                && t_new > S::of(1e-4)
                && total_correction > S::of(0.2) * dt_eff * (S::one() + tangent_norm)
            {
                ok = false;
            }

            if ok {
                x = corrected;
                t = t_new;
                min_step = min_step.min(dt_eff);
                streak += 1;
                if streak >= 3 {
                    dt = (dt * S::of(2.0)).min(o.step_max);
                    streak = 0;
                }
                if x.l2_norm() > o.escape_norm {
                    return PathResult {
                        start: start.clone(),
                        endpoint: x,
                        status: PathStatus::AtInfinity,
                        steps,
                        min_step,
                    };
                }
            } else {
                dt = dt.min(dt_eff) * S::of(0.5);
                streak = 0;
                if dt < o.step_min {
                    return fail(x, steps, min_step);
                }
            }
        }

        // Endpoint polish against the target system.
        match newton_polish(&x, self.sys, o.polish_tol, o.polish_iters) {
            Ok(rec) => PathResult {
                start: start.clone(),
                endpoint: rec.point,
                status: PathStatus::Converged,
                steps,
                min_step,
            },
            Err(Error::SingularJacobian) | Err(Error::MaxIterations(_)) => {
                // multiplicity candidate: keep the raw endpoint
                PathResult {
                    start: start.clone(),
                    endpoint: x,
                    status: PathStatus::Converged,
                    steps,
                    min_step,
                }
            }
            Err(_) => fail(x, steps, min_step),
        }
    }
}

/// Deduplicated solution list of one solved system, with path accounting.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct SolutionSet<S: Scalar> {
    pub records: Vec<FixedPointRecord<S>>,
    /// Number of tracked paths (the product of the component degrees).
    pub path_count: usize,
    pub at_infinity_count: usize,
    pub failed_count: usize,
}

impl<S: Scalar> SolutionSet<S> {
    /// Sum of cluster sizes plus unaccounted paths; equals `path_count` by
    /// construction.
    pub fn accounted_paths(&self) -> usize {
        self.records.iter().map(|r| r.cluster_size).sum::<usize>()
            + self.at_infinity_count
            + self.failed_count
    }
}

/// Default clustering radius for endpoint deduplication.
pub fn cluster_radius<S: Scalar>() -> S {
    S::of(1e-6)
}

/// Tracks every path of the chosen system on `C^n`, polishes and clusters
/// the endpoints, and returns the deduplicated solution set. Non-converged
/// paths are retried once with halved step bounds; paths that still fail
/// abort the solve.
pub fn solve_system<S: Scalar>(
    n: usize,
    sys: ResidualSystem,
    seed: u64,
) -> Result<SolutionSet<S>> {
    solve_system_with(n, sys, seed, &TrackOptions::default(), cluster_radius::<S>())
}

/// As [`solve_system`] with explicit tracking options and clustering radius.
pub fn solve_system_with<S: Scalar>(
    n: usize,
    sys: ResidualSystem,
    seed: u64,
    opts: &TrackOptions<S>,
    radius: S,
) -> Result<SolutionSet<S>> {
    let degrees = sys.degrees(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = StartSystem::random(degrees, &mut rng);
    let gamma = random_gamma::<S>(&mut rng);
    let points = start.start_points();
    let path_count = points.len();

    let tracker = Tracker::new(sys, start.clone(), gamma, opts.clone());
    let mut results: Vec<PathResult<S>> =
        points.par_iter().map(|p| tracker.track_path(p)).collect();

    // Retry pass: escapes and step underflows both count as tracking
    // trouble for these systems, which are known to have no solutions at
    // infinity.
    if results.iter().any(|r| r.status != PathStatus::Converged) {
        let retry = Tracker::new(sys, start, gamma, opts.halved());
        results = results
            .into_par_iter()
            .map(|r| {
                if r.status == PathStatus::Converged {
                    r
                } else {
                    retry.track_path(&r.start)
                }
            })
            .collect();
    }

    let at_infinity_count = results
        .iter()
        .filter(|r| r.status == PathStatus::AtInfinity)
        .count();
    let failed_count = results
        .iter()
        .filter(|r| r.status == PathStatus::Failed)
        .count();
    if failed_count > 0 {
        return Err(Error::TrackingFailed {
            failed: failed_count,
            total: path_count,
        });
    }

    let endpoints: Vec<CVec<S>> = results
        .iter()
        .filter(|r| r.status == PathStatus::Converged)
        .map(|r| r.endpoint.clone())
        .collect();
    let records = cluster_endpoints(endpoints, sys, radius)?;

    Ok(SolutionSet {
        records,
        path_count,
        at_infinity_count,
        failed_count,
    })
}

/// Groups endpoints within `radius` of each other, refines multiple points,
/// and emits one record per cluster, sorted lexicographically by point.
fn cluster_endpoints<S: Scalar>(
    endpoints: Vec<CVec<S>>,
    sys: ResidualSystem,
    radius: S,
) -> Result<Vec<FixedPointRecord<S>>> {
    // Deterministic processing order regardless of the tracking schedule.
    let mut sorted = endpoints;
    sorted.sort_by(|a, b| {
        for (x, y) in a.entries().iter().zip(b.entries().iter()) {
            match x
                .re
                .partial_cmp(&y.re)
                .unwrap()
                .then(x.im.partial_cmp(&y.im).unwrap())
            {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });

    let mut clusters: Vec<Vec<CVec<S>>> = Vec::new();
    'next: for e in sorted {
        for cluster in clusters.iter_mut() {
            if cluster[0].l2_dist(&e) <= radius {
                cluster.push(e);
                continue 'next;
            }
        }
        clusters.push(vec![e]);
    }

    let mut records = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let n = cluster[0].len();
        let size = cluster.len();
        let inv = S::one() / S::of(size as f64);
        let mut centroid = vec![Complex::new(S::zero(), S::zero()); n];
        for member in &cluster {
            for (acc, z) in centroid.iter_mut().zip(member.entries()) {
                *acc = *acc + z.scale(inv);
            }
        }
        let mut point = CVec::new(centroid)?;
        if size > 1 {
            // A cluster marks a multiple solution; plain Newton stalls at
            // about sqrt(eps) there, so sharpen the centroid by deflation.
            if let Ok(refined) = deflate_singular_point(&point, sys) {
                if point.max_dist(&refined) <= radius {
                    point = refined;
                }
            }
        }
        let mut rec = FixedPointRecord::from_point(point, sys)?;
        rec.cluster_size = size;
        records.push(rec);
    }

    // Lexicographic order with a noise band: coordinates that agree to
    // 1e-9 (e.g. the shared real part of a conjugate pair, polished to
    // different last ulps) defer to the next coordinate. Solutions of these
    // systems are far apart relative to the band, so the order is total and
    // stable across seeds.
    let band = S::of(1e-9);
    records.sort_by(|a, b| {
        for (x, y) in a.point.entries().iter().zip(b.point.entries().iter()) {
            if (x.re - y.re).abs() > band {
                return x.re.partial_cmp(&y.re).unwrap();
            }
            if (x.im - y.im).abs() > band {
                return x.im.partial_cmp(&y.im).unwrap();
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(records)
}

/// First-order deflation refinement of a multiplicity-candidate point: the
/// system is augmented with a Jacobian null vector and a normalization, on
/// which Gauss-Newton restores fast convergence for breadth-one double
/// points.
fn deflate_singular_point<S: Scalar>(x0: &CVec<S>, sys: ResidualSystem) -> Result<CVec<S>> {
    let n = x0.len();
    let jac = ulam::jacobian(x0, sys)?;

    // Null-vector estimate by two rounds of inverse iteration.
    let mut v: Vec<Complex<S>> = (0..n)
        .map(|k| Complex::new(S::of(1.0 + (k as f64) * 0.37), S::of(0.21 * (k as f64 + 1.0))))
        .collect();
    for _ in 0..2 {
        if let Ok(w) = jac.solve(&v) {
            let norm = w.iter().map(|z| z.norm_sqr()).fold(S::zero(), |a, b| a + b).sqrt();
            if norm > S::zero() && norm.is_finite() {
                v = w.iter().map(|z| z.scale(S::one() / norm)).collect();
            }
        } else {
            break;
        }
    }

    // Fixed normalization functional keeps the augmented system square-ish.
    let b: Vec<Complex<S>> = (0..n)
        .map(|k| Complex::new(S::of(0.7 + 0.11 * k as f64), S::of(0.3 - 0.05 * k as f64)))
        .collect();

    let mut x = x0.entries().to_vec();
    let mut lambda = v;
    let one = Complex::new(S::one(), S::zero());

    let residual_of = |x: &[Complex<S>], lambda: &[Complex<S>]| -> Result<Vec<Complex<S>>> {
        let xv = CVec::new(x.to_vec())?;
        let f = ulam::residual(&xv, sys)?;
        let jac = ulam::jacobian(&xv, sys)?;
        let jl = jac.mul_vec(lambda);
        let mut g: Vec<Complex<S>> = f.entries().to_vec();
        g.extend(jl);
        let dot = b
            .iter()
            .zip(lambda.iter())
            .fold(Complex::new(S::zero(), S::zero()), |acc, (bi, li)| {
                acc + bi * li
            });
        g.push(dot - one);
        Ok(g)
    };

    let mut best_x = x.clone();
    let mut best_norm = S::infinity();
    for _ in 0..30 {
        let g = residual_of(&x, &lambda)?;
        let gn = g.iter().map(|z| z.norm()).fold(S::zero(), |a, b| a.max(b));
        // only the F(x) part measures how good the point itself is
        let fn_norm = g[..n].iter().map(|z| z.norm()).fold(S::zero(), |a, b| a.max(b));
        if fn_norm < best_norm {
            best_norm = fn_norm;
            best_x = x.clone();
        }
        if gn < S::epsilon() * S::of(100.0) {
            break;
        }

        // Jacobian of the augmented system:
        // [ J        0  ]
        // [ H*lambda J  ]
        // [ 0        b^T]
        let xv = CVec::new(x.clone())?;
        let jac = ulam::jacobian(&xv, sys)?;
        let mut a = CMatrix::zeros(2 * n + 1, 2 * n);
        for r in 0..n {
            for c in 0..n {
                a[(r, c)] = jac[(r, c)];
            }
        }
        for r in 0..n {
            let hrow = hessian_times(&xv, sys, r, &lambda);
            for c in 0..n {
                a[(n + r, c)] = hrow[c];
                a[(n + r, n + c)] = jac[(r, c)];
            }
        }
        for c in 0..n {
            a[(2 * n, n + c)] = b[c];
        }
        let neg_g: Vec<Complex<S>> = g.iter().map(|z| -z).collect();
        let delta = match a.solve_least_squares(&neg_g) {
            Ok(d) => d,
            Err(_) => break,
        };
        for k in 0..n {
            x[k] = x[k] + delta[k];
            lambda[k] = lambda[k] + delta[n + k];
        }
    }
    CVec::new(best_x)
}

/// Solution counts for one degree, assembled by inclusion-exclusion: the
/// fixed points split into those with `c_N = 0` (in bijection with the
/// solutions one degree down) and the variety of the deflated system, minus
/// their overlap.
#[derive(Debug, Clone, Serialize)]
pub struct UlamCounts {
    pub n: usize,
    /// Number of distinct fixed points in degree `n`.
    pub u_n: u64,
    /// Size of the deflated-system variety.
    pub v_tilde: u64,
    /// Size of the `c_N = 0` slice, i.e. the count one degree down.
    pub v_zero: u64,
    /// Overlap between the two.
    pub intersection: u64,
}

/// [`UlamCounts`] plus the direct-enumeration cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub counts: UlamCounts,
    /// Record count of the directly solved full system.
    pub full_direct: u64,
    /// Whether inclusion-exclusion and direct enumeration agree.
    pub consistent: bool,
}

fn tilde_counts<S: Scalar>(n: usize, seed: u64) -> Result<(u64, u64)> {
    let set = solve_system::<S>(n, ResidualSystem::Tilde, seed)?;
    let thr = zero_threshold::<S>();
    let inter = set
        .records
        .iter()
        .filter(|r| r.point[n - 1].norm() < thr)
        .count() as u64;
    Ok((set.records.len() as u64, inter))
}

fn u_count<S: Scalar>(n: usize, seed: u64) -> Result<u64> {
    if n <= 1 {
        return Ok(1);
    }
    let (v_tilde, intersection) = tilde_counts::<S>(n, seed)?;
    Ok(u_count::<S>(n - 1, seed)? + v_tilde - intersection)
}

/// Counts the degree-`n` fixed points by inclusion-exclusion (recursing on
/// the `c_N = 0` slice) and cross-checks against direct enumeration.
///
/// Degree 1 short-circuits: the only fixed point is the monomial, the
/// deflated system is infeasible and the zero slice is the empty product.
pub fn count_ulam<S: Scalar>(n: usize, seed: u64) -> Result<CountReport> {
    let (u_n, v_tilde, v_zero, intersection) = if n <= 1 {
        (1, 0, 1, 0)
    } else {
        let (v_tilde, intersection) = tilde_counts::<S>(n, seed)?;
        let v_zero = u_count::<S>(n - 1, seed)?;
        (v_zero + v_tilde - intersection, v_tilde, v_zero, intersection)
    };
    let full = solve_system::<S>(n, ResidualSystem::Full, seed)?;
    let full_direct = full.records.len() as u64;
    Ok(CountReport {
        counts: UlamCounts {
            n,
            u_n,
            v_tilde,
            v_zero,
            intersection,
        },
        full_direct,
        consistent: full_direct == u_n,
    })
}

/// True when degree `n` or `n - 1` has a fixed point with every component
/// away from zero, which the deflated systems guarantee for every `n >= 2`.
pub fn nontrivial_existence_check<S: Scalar>(n: usize, seed: u64) -> Result<bool> {
    for m in [n, n - 1] {
        if m < 2 {
            continue;
        }
        let set = solve_system::<S>(m, ResidualSystem::Tilde, seed)?;
        if set.records.iter().any(|r| r.all_nonzero()) {
            return Ok(true);
        }
    }
    Ok(false)
}
