//! One function per subcommand. Each returns the process exit code:
//! 0 success, 1 numeric check failed, 2 tracking failure, 3 inadmissible
//! point (I/O and usage problems surface as errors and exit 4).

use std::path::PathBuf;

use anyhow::Result;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ulam_core::dynamics::{integrate, jacobian_at_equilibrium, stability_probe, StabilityReport};
use ulam_core::homotopy::{
    count_ulam, solve_system_with, SolutionSet, TrackOptions, UlamCounts,
};
use ulam_core::hypergeom::{ulam_rigidity_check, RigidityGrid, RigidityReport};
use ulam_core::poly::CVec;
use ulam_core::ulam::{
    pad_check, residual, ulam_map, verify_equivalent_system, verify_identities, EquivVariant,
    IdentityReport, ResidualSystem,
};
use ulam_core::Error;

use crate::output::{
    default_out_dir, emit_json, emit_solution_set_csv, emit_trajectory_csv, SCHEMA_VERSION,
};
use crate::{Format, GridPreset, SystemKind};

impl From<SystemKind> for ResidualSystem {
    fn from(k: SystemKind) -> Self {
        match k {
            SystemKind::Full => ResidualSystem::Full,
            SystemKind::Tilde => ResidualSystem::Tilde,
        }
    }
}

/// Desk-scale degree bound shared by every command taking `--n`.
fn check_degree(n: usize) -> Result<()> {
    anyhow::ensure!((1..=8).contains(&n), "degree must be in 1..=8, got {n}");
    Ok(())
}

fn solve(
    n: usize,
    sys: ResidualSystem,
    seed: u64,
    polish_tol: f64,
    cluster_radius: f64,
) -> std::result::Result<SolutionSet<f64>, Error> {
    let opts = TrackOptions {
        polish_tol,
        ..TrackOptions::default()
    };
    solve_system_with::<f64>(n, sys, seed, &opts, cluster_radius)
}

#[derive(Serialize)]
struct EnumerateDoc {
    schema: u32,
    command: &'static str,
    n: usize,
    seed: u64,
    system: ResidualSystem,
    solution_set: SolutionSet<f64>,
}

pub fn enumerate(
    n: usize,
    seed: u64,
    system: SystemKind,
    tol_residual: f64,
    tol_cluster: f64,
    format: Format,
    out: Option<PathBuf>,
) -> Result<u8> {
    check_degree(n)?;
    let sys: ResidualSystem = system.into();
    let set = match solve(n, sys, seed, tol_residual, tol_cluster) {
        Ok(set) => set,
        Err(Error::TrackingFailed { failed, total }) => {
            eprintln!("tracking failure: {failed} of {total} paths failed after retry");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    match format {
        Format::Csv => emit_solution_set_csv(&set, out.as_deref())?,
        _ => emit_json(
            &EnumerateDoc {
                schema: SCHEMA_VERSION,
                command: "enumerate",
                n,
                seed,
                system: sys,
                solution_set: set,
            },
            out.as_deref(),
        )?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct CountDoc {
    schema: u32,
    command: &'static str,
    n: usize,
    seed: u64,
    u_n: u64,
    counts: UlamCounts,
    full_direct: u64,
    consistent: bool,
}

pub fn count(n: usize, seed: u64, out: Option<PathBuf>) -> Result<u8> {
    check_degree(n)?;
    let rep = match count_ulam::<f64>(n, seed) {
        Ok(rep) => rep,
        Err(Error::TrackingFailed { failed, total }) => {
            eprintln!("tracking failure: {failed} of {total} paths failed after retry");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let consistent = rep.consistent;
    emit_json(
        &CountDoc {
            schema: SCHEMA_VERSION,
            command: "count",
            n,
            seed,
            u_n: rep.counts.u_n,
            counts: rep.counts,
            full_direct: rep.full_direct,
            consistent,
        },
        out.as_deref(),
    )?;
    Ok(if consistent { 0 } else { 1 })
}

#[derive(Serialize)]
struct RecordCheck {
    index: usize,
    point: CVec<f64>,
    idempotence_defect: f64,
    zero_tail_ok: bool,
    identities: IdentityReport<f64>,
    pad_ok: bool,
    equivalence_ok: bool,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyDoc {
    schema: u32,
    command: &'static str,
    n: usize,
    seed: u64,
    tol: f64,
    records: Vec<RecordCheck>,
    random_nonfixed_cases: usize,
    random_nonfixed_ok: bool,
    stein_checked: bool,
    stein_ok: Option<bool>,
    pass: bool,
}

/// Random interpolation nodes with a healthy pairwise gap.
fn random_nodes(rng: &mut ChaCha8Rng, n: usize) -> CVec<f64> {
    loop {
        let t = CVec::new(
            (0..n)
                .map(|_| {
                    Complex64::new(
                        rng.gen::<f64>() * 2.0 - 1.0,
                        rng.gen::<f64>() * 2.0 - 1.0,
                    )
                })
                .collect(),
        )
        .expect("finite");
        if t.min_pairwise_gap().is_none_or(|g| g > 0.1) {
            return t;
        }
    }
}

pub fn verify(n: usize, seed: u64, tol: f64, out: Option<PathBuf>) -> Result<u8> {
    check_degree(n)?;
    let set = match solve(n, ResidualSystem::Full, seed, 1e-12, 1e-6) {
        Ok(set) => set,
        Err(Error::TrackingFailed { failed, total }) => {
            eprintln!("tracking failure: {failed} of {total} paths failed after retry");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut records = Vec::with_capacity(set.records.len());
    let mut all_pass = true;

    for (index, rec) in set.records.iter().enumerate() {
        let image = ulam_map(&rec.point);
        let idempotence_defect = image.max_dist(&rec.point);
        let zero_tail_ok = rec.has_zero_tail_property();
        let identities = verify_identities(&rec.point, tol)?;
        let pad_ok = pad_check(&rec.point, 1, tol)?;
        let nodes = random_nodes(&mut rng, n);
        let equivalence_ok = verify_equivalent_system(&rec.point, &nodes, EquivVariant::ValueNodes, tol)?
            && verify_equivalent_system(&rec.point, &nodes, EquivVariant::DerivativeNodes, tol)?;
        let pass = idempotence_defect <= 1e-9
            && zero_tail_ok
            && identities.pass(tol)
            && pad_ok
            && equivalence_ok;
        all_pass &= pass;
        records.push(RecordCheck {
            index,
            point: rec.point.clone(),
            idempotence_defect,
            zero_tail_ok,
            identities,
            pad_ok,
            equivalence_ok,
            pass,
        });
    }

    // random non-fixed points must fail the interpolation systems
    let cases = 20usize;
    let mut random_ok = true;
    for _ in 0..cases {
        let c = random_nodes(&mut rng, n);
        let is_fixed = residual(&c, ResidualSystem::Full)?.max_norm() <= tol;
        let nodes = random_nodes(&mut rng, n);
        let v1 = verify_equivalent_system(&c, &nodes, EquivVariant::ValueNodes, tol)?;
        let v2 = verify_equivalent_system(&c, &nodes, EquivVariant::DerivativeNodes, tol)?;
        random_ok &= v1 == is_fixed && v2 == is_fixed;
    }
    all_pass &= random_ok;

    // real, all-nonzero fixed points must not exist in degree five and up
    let stein_checked = n >= 5;
    let stein_ok = if stein_checked {
        Some(
            set.records
                .iter()
                .all(|r| !(r.is_real && r.all_nonzero())),
        )
    } else {
        None
    };
    if let Some(ok) = stein_ok {
        all_pass &= ok;
    }

    emit_json(
        &VerifyDoc {
            schema: SCHEMA_VERSION,
            command: "verify",
            n,
            seed,
            tol,
            records,
            random_nonfixed_cases: cases,
            random_nonfixed_ok: random_ok,
            stein_checked,
            stein_ok,
            pass: all_pass,
        },
        out.as_deref(),
    )?;
    Ok(if all_pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct EigencheckDoc {
    schema: u32,
    command: &'static str,
    grid: &'static str,
    seed: u64,
    tol: f64,
    report: RigidityReport<f64>,
}

pub fn eigencheck(grid: GridPreset, tol: f64, seed: u64, out: Option<PathBuf>) -> Result<u8> {
    let (mut grid_spec, name) = match grid {
        GridPreset::Default => (RigidityGrid::<f64>::default(), "default"),
        GridPreset::Wide => (RigidityGrid::<f64>::wide(), "wide"),
        GridPreset::Fine => (RigidityGrid::<f64>::fine(), "fine"),
    };
    grid_spec.seed = seed;
    let report = ulam_rigidity_check(&grid_spec, tol);
    let pass = report.pass;
    emit_json(
        &EigencheckDoc {
            schema: SCHEMA_VERSION,
            command: "eigencheck",
            grid: name,
            seed,
            tol,
            report,
        },
        out.as_deref(),
    )?;
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct FlowDoc {
    schema: u32,
    command: &'static str,
    n: usize,
    seed: u64,
    point_index: usize,
    point: CVec<f64>,
    radius: f64,
    t_end: f64,
    dt: f64,
    jacobian_deviation: f64,
    collision: bool,
    final_error: f64,
    trajectory_file: String,
    stability_json: String,
    stability: StabilityReport<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn flow(
    n: usize,
    point_index: Option<usize>,
    radius: f64,
    seed: u64,
    t_end: f64,
    dt: f64,
    trials: usize,
    format: Format,
    out: Option<PathBuf>,
) -> Result<u8> {
    check_degree(n)?;
    let set = match solve(n, ResidualSystem::Full, seed, 1e-12, 1e-6) {
        Ok(set) => set,
        Err(Error::TrackingFailed { failed, total }) => {
            eprintln!("tracking failure: {failed} of {total} paths failed after retry");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let admissible = |p: &CVec<f64>| p.min_pairwise_gap().map_or(n <= 1, |g| g > 1e-10);
    let index = match point_index {
        Some(i) => i,
        None => match set.records.iter().position(|r| admissible(&r.point)) {
            Some(i) => i,
            None => {
                eprintln!("no admissible (pairwise-distinct) fixed point in degree {n}");
                return Ok(3);
            }
        },
    };
    let Some(record) = set.records.get(index) else {
        eprintln!(
            "point index {index} out of range ({} records)",
            set.records.len()
        );
        return Ok(3);
    };
    let gamma = record.point.clone();
    if !admissible(&gamma) {
        eprintln!("fixed point {index} has repeated components; the flow is singular there");
        return Ok(3);
    }

    let jacobian_deviation = jacobian_at_equilibrium(&gamma)?.deviation_from_neg_identity;

    // one seeded perturbed trajectory, written as CSV
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeta0 = CVec::new(
        gamma
            .entries()
            .iter()
            .map(|g| {
                let r = radius * rng.gen::<f64>().sqrt();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                g + Complex64::from_polar(r, phi)
            })
            .collect(),
    )?;
    let traj = integrate(&zeta0, &gamma, t_end, dt)?;
    let final_error = traj.final_state().max_dist(&gamma);

    let dir = out.unwrap_or_else(default_out_dir);
    std::fs::create_dir_all(&dir)?;
    let traj_path = match format {
        Format::Json => {
            let path = dir.join(format!("flow_n{n}_p{index}_trajectory.json"));
            emit_json(&traj, Some(&path))?;
            path
        }
        _ => {
            let path = dir.join(format!("flow_n{n}_p{index}_trajectory.csv"));
            emit_trajectory_csv(&traj, &path)?;
            path
        }
    };

    let stability = stability_probe(&gamma, radius, trials, seed)?;
    let stability_path = dir.join(format!("flow_n{n}_p{index}_stability.json"));
    emit_json(&stability, Some(&stability_path))?;

    let collision = traj.collision_flag;
    let converged = stability.converged == stability.trials;
    let doc = FlowDoc {
        schema: SCHEMA_VERSION,
        command: "flow",
        n,
        seed,
        point_index: index,
        point: gamma,
        radius,
        t_end,
        dt,
        jacobian_deviation,
        collision,
        final_error,
        trajectory_file: traj_path.display().to_string(),
        stability_json: stability_path.display().to_string(),
        stability,
    };
    emit_json(&doc, None)?;
    if collision {
        return Ok(1);
    }
    Ok(if converged && final_error <= 1e-6 && jacobian_deviation <= 1e-8 {
        0
    } else {
        1
    })
}

#[derive(Serialize)]
struct ReportDoc {
    schema: u32,
    command: &'static str,
    seed: u64,
    degrees: Vec<usize>,
    u_counts: Vec<u64>,
    consistent: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tilde_counts: Option<Vec<Option<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intersections: Option<Vec<u64>>,
    pass: bool,
}

pub fn report(
    seed: u64,
    tilde: bool,
    intersections: bool,
    format: Format,
    out: Option<PathBuf>,
) -> Result<u8> {
    let degrees: Vec<usize> = (1..=5).collect();
    let mut u_counts = Vec::new();
    let mut consistent = Vec::new();
    let mut tilde_counts = Vec::new();
    let mut inter_counts = Vec::new();
    for &n in &degrees {
        let rep = match count_ulam::<f64>(n, seed) {
            Ok(rep) => rep,
            Err(Error::TrackingFailed { failed, total }) => {
                eprintln!("tracking failure at degree {n}: {failed} of {total} paths");
                return Ok(2);
            }
            Err(e) => return Err(e.into()),
        };
        u_counts.push(rep.counts.u_n);
        consistent.push(rep.consistent);
        tilde_counts.push(if n >= 2 { Some(rep.counts.v_tilde) } else { None });
        if n >= 2 {
            inter_counts.push(rep.counts.intersection);
        }
    }
    let pass = consistent.iter().all(|&c| c);
    let doc = ReportDoc {
        schema: SCHEMA_VERSION,
        command: "report",
        seed,
        degrees: degrees.clone(),
        u_counts: u_counts.clone(),
        consistent: consistent.clone(),
        tilde_counts: tilde.then_some(tilde_counts.clone()),
        intersections: intersections.then_some(inter_counts.clone()),
        pass,
    };

    match format {
        Format::Markdown => {
            let mut md = String::new();
            md.push_str("| degree | fixed points |");
            if tilde {
                md.push_str(" deflated variety |");
            }
            if intersections {
                md.push_str(" overlap |");
            }
            md.push_str(" cross-check |\n|---|---|");
            if tilde {
                md.push_str("---|");
            }
            if intersections {
                md.push_str("---|");
            }
            md.push_str("---|\n");
            for (i, &n) in degrees.iter().enumerate() {
                md.push_str(&format!("| {n} | {} |", u_counts[i]));
                if tilde {
                    match tilde_counts[i] {
                        Some(v) => md.push_str(&format!(" {v} |")),
                        None => md.push_str(" – |"),
                    }
                }
                if intersections {
                    if n >= 2 {
                        md.push_str(&format!(" {} |", inter_counts[i - 1]));
                    } else {
                        md.push_str(" – |");
                    }
                }
                md.push_str(&format!(" {} |\n", if consistent[i] { "ok" } else { "MISMATCH" }));
            }
            match out {
                Some(path) => std::fs::write(path, md)?,
                None => print!("{md}"),
            }
        }
        _ => emit_json(&doc, out.as_deref())?,
    }
    Ok(if pass { 0 } else { 1 })
}
