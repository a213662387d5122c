//! Curves over parameter grids, written as CSV.

use std::io::Write;

use anyhow::{bail, Context, Result};
use ouqubits_core::{
    build_ewl, embed, evolve_curve, time_grid, Curve, Engine, EngineOptions, EwlSpec, MeasureSample, ModelParams,
};
use rayon::prelude::*;

use crate::args::SweepConfig;
use crate::csv::CsvWriter;

pub const EVOLVE_HEADER: [&str; 11] = [
    "t", "rho11", "rho22", "rho33", "rho44", "re_rho14", "im_rho14", "re_rho23", "im_rho23", "C", "Bmax",
];
pub const SWEEP_HEADER: [&str; 8] = ["family", "r", "alpha", "J", "gamma_ratio", "t", "C", "Bmax_minus_2"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub spec: EwlSpec,
    pub params: ModelParams,
}

impl SweepPoint {
    pub fn new(spec: EwlSpec, coupling: f64, gamma_ratio: f64) -> Result<Self> {
        Ok(SweepPoint {
            spec,
            params: ModelParams::with_ratio(coupling, gamma_ratio)?,
        })
    }
}

/// Grid points in row-major order: r, then α, then J, then γ/Γ.
pub fn points(cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(cfg.point_count());
    for &r in &cfg.r {
        for &alpha in &cfg.alpha {
            let spec = EwlSpec::new(cfg.family, r, alpha)?;
            for &j in &cfg.coupling {
                for &g in &cfg.gamma_ratio {
                    out.push(SweepPoint::new(spec, j, g)?);
                }
            }
        }
    }
    Ok(out)
}

/// Evolves one point. A degenerate closed form without fallback becomes
/// an error that explains how to proceed.
pub fn run_point(point: &SweepPoint, times: &[f64], engine: Engine, options: &EngineOptions) -> Result<Curve> {
    let rho0 = embed(&build_ewl(point.spec)?);
    evolve_curve(&rho0, &point.params, times, engine, options).map_err(|e| {
        let hint = if e.is_degenerate() {
            "; rerun with --fallback-ode to integrate the master equation instead"
        } else {
            ""
        };
        anyhow::anyhow!(
            "J = {}, gamma_ratio = {}: {e}{hint}",
            point.params.coupling,
            point.params.bandwidth_ratio()
        )
    })
}

/// Measures of every point, in grid order, computed in parallel.
pub fn run_points(
    points: &[SweepPoint],
    times: &[f64],
    engine: Engine,
    options: &EngineOptions,
) -> Result<Vec<Vec<MeasureSample>>> {
    points
        .par_iter()
        .map(|p| Ok(run_point(p, times, engine, options)?.measures()?))
        .collect()
}

pub fn write_evolve<W: Write>(cfg: &SweepConfig, out: W) -> Result<()> {
    let pts = points(cfg)?;
    let [point] = pts.as_slice() else {
        bail!(
            "evolve needs a single parameter point, got {} (use sweep for grids)",
            pts.len()
        );
    };
    let times = time_grid(cfg.t_max, cfg.n_points);
    let curve = run_point(point, &times, cfg.engine, &cfg.options)?;
    let measures = curve.measures()?;
    let mut w = CsvWriter::new(out, &EVOLVE_HEADER)?;
    for (rho, m) in curve.states.iter().zip(&measures) {
        let e = |i, j| rho.get(i, j);
        w.row(
            &[],
            &[
                m.t,
                e(0, 0).re,
                e(1, 1).re,
                e(2, 2).re,
                e(3, 3).re,
                e(0, 3).re,
                e(0, 3).im,
                e(1, 2).re,
                e(1, 2).im,
                m.concurrence,
                m.bmax,
            ],
        )?;
    }
    w.finish().context("writing CSV")?;
    Ok(())
}

pub fn write_sweep<W: Write>(cfg: &SweepConfig, out: W) -> Result<()> {
    let pts = points(cfg)?;
    let times = time_grid(cfg.t_max, cfg.n_points);
    let results = run_points(&pts, &times, cfg.engine, &cfg.options)?;
    let family = cfg.family.to_string();
    let mut w = CsvWriter::new(out, &SWEEP_HEADER)?;
    for (p, curve) in pts.iter().zip(&results) {
        for m in curve {
            w.row(
                &[&family],
                &[
                    p.spec.r,
                    p.spec.alpha,
                    p.params.coupling,
                    p.params.bandwidth_ratio(),
                    m.t,
                    m.concurrence,
                    m.bmax - 2.0,
                ],
            )?;
        }
    }
    w.finish().context("writing CSV")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ouqubits_core::Family;

    fn config(family: Family, r: f64, alpha: f64, j: f64, g: f64) -> SweepConfig {
        SweepConfig {
            family,
            r: vec![r],
            alpha: vec![alpha],
            coupling: vec![j],
            gamma_ratio: vec![g],
            t_max: 10.0,
            n_points: 11,
            engine: Engine::Analytic,
            options: EngineOptions::default(),
        }
    }

    fn render(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn maximally_mixed_psi_is_classical() {
        let cfg = config(Family::Psi, 0.0, 0.3, 0.4, 0.1);
        let text = render(|b| write_evolve(&cfg, b));
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), EVOLVE_HEADER.join(","));
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 11);
        for row in rows {
            assert_eq!(row[9], 0.0);
            assert_eq!(row[10], 0.0);
        }
    }

    #[test]
    fn degenerate_point_needs_fallback() {
        let mut cfg = config(Family::Phi, 0.95, 1.0, 0.125, 0.1);
        let err = render_err(&cfg);
        assert!(err.contains("epsilon/gamma") && err.contains("--fallback-ode"), "{err}");
        cfg.options.fallback_ode = true;
        render(|b| write_evolve(&cfg, b));
    }

    fn render_err(cfg: &SweepConfig) -> String {
        format!("{:#}", write_evolve(cfg, Vec::new()).unwrap_err())
    }

    #[test]
    fn sweep_rows_follow_grid_order() {
        let mut cfg = config(Family::Phi, 0.95, 1.0, 0.4, 0.1);
        cfg.coupling = vec![0.0, 0.4];
        cfg.r = vec![0.5, 1.0];
        cfg.n_points = 3;
        let text = render(|b| write_sweep(&cfg, b));
        let keys: Vec<(f64, f64)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[1].parse().unwrap(), f[3].parse().unwrap())
            })
            .collect();
        assert_eq!(keys.len(), 12);
        assert_eq!(keys[0], (0.5, 0.0));
        assert_eq!(keys[3], (0.5, 0.4));
        assert_eq!(keys[6], (1.0, 0.0));
        assert!(text.lines().nth(1).unwrap().starts_with("phi,"));
    }

    #[test]
    fn evolve_rejects_grids() {
        let mut cfg = config(Family::Phi, 0.95, 1.0, 0.4, 0.1);
        cfg.alpha = vec![0.5, 1.0];
        assert!(render_err(&cfg).contains("single parameter point"));
    }
}
