//! Raw noise paths for external analysis.

use std::io::Write;

use anyhow::{bail, Context, Result};
use ouqubits_core::{sample_ou_path, ModelParams};

pub const HEADER: [&str; 4] = ["path", "t", "omega_a", "omega_b"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRequest {
    pub gamma_ratio: f64,
    pub t_max: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
}

/// Writes `n_paths` independent paths. Path `i` is the noise seen by
/// Monte-Carlo trajectory `i` with the same seed and time step.
pub fn write_paths<W: Write>(req: &SampleRequest, out: W) -> Result<()> {
    if req.n_paths == 0 {
        bail!("n_paths must be positive");
    }
    let params = ModelParams::with_ratio(0.0, req.gamma_ratio)?;
    let mut w = crate::csv::CsvWriter::new(out, &HEADER)?;
    for i in 0..req.n_paths {
        let path = sample_ou_path(&params, req.t_max, req.dt, req.seed, i as u64)?;
        let label = i.to_string();
        for k in 0..path.len() {
            w.row(&[&label], &[path.time(k), path.omega_a[k], path.omega_b[k]])?;
        }
    }
    w.finish().context("writing CSV")?;
    Ok(())
}
