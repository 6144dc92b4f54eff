//! Output plumbing: schema-stamped JSON documents and RFC-4180 CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use ulam_core::dynamics::FlowTrajectory;
use ulam_core::homotopy::SolutionSet;

/// Schema version stamped on every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Writes a JSON document to the file or stdout, pretty-printed with a
/// trailing newline. Field order follows struct declaration order, so the
/// bytes are a pure function of the values.
pub fn emit_json<T: Serialize>(doc: &T, out: Option<&Path>) -> Result<()> {
    let mut buf = serde_json::to_vec_pretty(doc)?;
    buf.push(b'\n');
    match out {
        Some(path) => {
            std::fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

/// Records of a solution set as CSV: one row per record with `re_k`/`im_k`
/// columns, residual, cluster size and flags.
pub fn emit_solution_set_csv(set: &SolutionSet<f64>, out: Option<&Path>) -> Result<()> {
    let mut writer: csv::Writer<Box<dyn Write>> = csv::Writer::from_writer(match out {
        Some(path) => {
            Box::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(std::io::stdout()),
    });
    let n = set.records.first().map_or(0, |r| r.point.len());
    let mut header = vec!["index".to_string()];
    for k in 1..=n {
        header.push(format!("re_{k}"));
        header.push(format!("im_{k}"));
    }
    header.extend(
        ["residual", "cluster_size", "zero_tail", "is_real"]
            .iter()
            .map(|s| s.to_string()),
    );
    writer.write_record(&header)?;
    for (i, rec) in set.records.iter().enumerate() {
        let mut row = vec![i.to_string()];
        for z in rec.point.entries() {
            row.push(format!("{:e}", z.re));
            row.push(format!("{:e}", z.im));
        }
        row.push(format!("{:e}", rec.residual));
        row.push(rec.cluster_size.to_string());
        row.push(rec.zero_tail.to_string());
        row.push(rec.is_real.to_string());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Trajectory CSV: `t` then `re_k`/`im_k` per component.
pub fn emit_trajectory_csv(traj: &FlowTrajectory<f64>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = csv::Writer::from_writer(file);
    let n = traj.gamma.len();
    let mut header = vec!["t".to_string()];
    for k in 1..=n {
        header.push(format!("re_{k}"));
        header.push(format!("im_{k}"));
    }
    writer.write_record(&header)?;
    for (t, state) in traj.times.iter().zip(traj.states.iter()) {
        let mut row = vec![format!("{t:e}")];
        for z in state.entries() {
            row.push(format!("{:e}", z.re));
            row.push(format!("{:e}", z.im));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Default output directory: `$ULAM_OUT_DIR` or the working directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("ULAM_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}
