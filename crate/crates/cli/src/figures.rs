//! Data for the standard figure set.
//!
//! Each figure is a set of CSV files with columns `<axis>,t,C,Bmax_minus_2`
//! where `<axis>` is the parameter varied across curves.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use ouqubits_core::{time_grid, Engine, EngineOptions, EwlSpec, Family};

use crate::csv::CsvWriter;
use crate::range::grid;
use crate::sweep::{run_points, SweepPoint};

/// Samples along the r and α axes.
pub const AXIS_POINTS: usize = 101;
/// Samples along the log-spaced γ/Γ axis.
pub const GAMMA_POINTS: usize = 101;
pub const GAMMA_RANGE: (f64, f64) = (0.01, 10.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    F1a,
    F1b,
    F1c,
    F2,
    F3,
    F4,
    F5,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::F1a,
        FigureId::F1b,
        FigureId::F1c,
        FigureId::F2,
        FigureId::F3,
        FigureId::F4,
        FigureId::F5,
    ];
}

impl FromStr for FigureId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "1a" => FigureId::F1a,
            "1b" => FigureId::F1b,
            "1c" => FigureId::F1c,
            "2" => FigureId::F2,
            "3" => FigureId::F3,
            "4" => FigureId::F4,
            "5" => FigureId::F5,
            _ => bail!("unknown figure {s:?} (expected one of 1a, 1b, 1c, 2, 3, 4, 5)"),
        })
    }
}

#[derive(Debug, Clone)]
pub struct FigureFile {
    pub name: String,
    pub axis: &'static str,
    pub values: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

fn phi(r: f64, alpha: f64) -> Result<EwlSpec> {
    Ok(EwlSpec::new(Family::Phi, r, alpha)?)
}

fn file(
    name: &str,
    axis: &'static str,
    values: Vec<f64>,
    point: impl Fn(f64) -> Result<SweepPoint>,
) -> Result<FigureFile> {
    let points = values.iter().map(|&v| point(v)).collect::<Result<_>>()?;
    Ok(FigureFile {
        name: name.to_string(),
        axis,
        values,
        points,
    })
}

pub fn figure_files(id: FigureId) -> Result<Vec<FigureFile>> {
    let unit = || grid(0.0, 1.0, AXIS_POINTS, false);
    Ok(match id {
        FigureId::F1a => vec![file("fig1a.csv", "J", vec![0.4], |j| {
            SweepPoint::new(phi(0.95, 1.0)?, j, 0.1)
        })?],
        FigureId::F1b => vec![file("fig1b.csv", "J", vec![0.8], |j| {
            SweepPoint::new(phi(0.95, 1.0)?, j, 0.1)
        })?],
        FigureId::F1c => vec![file("fig1c.csv", "J", vec![0.0, 0.4, 0.8], |j| {
            SweepPoint::new(phi(0.95, 0.5)?, j, 0.1)
        })?],
        FigureId::F2 => {
            let gammas = grid(GAMMA_RANGE.0, GAMMA_RANGE.1, GAMMA_POINTS, true);
            vec![file("fig2.csv", "gamma_ratio", gammas, |g| {
                SweepPoint::new(phi(0.95, 1.0)?, 0.5, g)
            })?]
        }
        FigureId::F3 => vec![
            file("fig3_markov.csv", "r", unit(), |r| {
                SweepPoint::new(phi(r, 1.0)?, 0.5, 10.0)
            })?,
            file("fig3_nonmarkov.csv", "r", unit(), |r| {
                SweepPoint::new(phi(r, 1.0)?, 0.5, 0.1)
            })?,
        ],
        FigureId::F4 | FigureId::F5 => {
            let (tag, j) = if id == FigureId::F4 {
                ("fig4", 0.0)
            } else {
                ("fig5", 0.5)
            };
            vec![
                file(&format!("{tag}_r0.95.csv"), "alpha", unit(), |a| {
                    SweepPoint::new(phi(0.95, a)?, j, 0.1)
                })?,
                file(&format!("{tag}_r1.csv"), "alpha", unit(), |a| {
                    SweepPoint::new(phi(1.0, a)?, j, 0.1)
                })?,
            ]
        }
    })
}

/// Writes every file of figure `id` into `dir` and returns their paths.
pub fn write_figure(
    id: FigureId,
    dir: &Path,
    t_max: f64,
    n_points: usize,
    engine: Engine,
    options: &EngineOptions,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let times = time_grid(t_max, n_points);
    let mut written = Vec::new();
    for f in figure_files(id)? {
        let curves = run_points(&f.points, &times, engine, options)?;
        let path = dir.join(&f.name);
        let out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        let mut w = CsvWriter::new(out, &[f.axis, "t", "C", "Bmax_minus_2"])?;
        for (v, curve) in f.values.iter().zip(&curves) {
            for m in curve {
                w.row(&[], &[*v, m.t, m.concurrence, m.bmax - 2.0])?;
            }
        }
        w.finish().with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse() {
        for (s, id) in ["1a", "1B", "1c", "2", "3", "4", "5"].iter().zip(FigureId::ALL) {
            assert_eq!(s.parse::<FigureId>().unwrap(), id);
        }
        assert!("6".parse::<FigureId>().is_err());
    }

    #[test]
    fn captioned_parameters() {
        let f = &figure_files(FigureId::F1c).unwrap()[0];
        assert_eq!(f.values, vec![0.0, 0.4, 0.8]);
        assert!(f.points.iter().all(|p| p.spec.alpha == 0.5 && p.spec.r == 0.95));
        assert!(f.points.iter().all(|p| p.params.bandwidth_ratio() == 0.1));

        let f3 = figure_files(FigureId::F3).unwrap();
        assert_eq!(f3.len(), 2);
        assert_eq!(f3[0].points[0].params.bandwidth_ratio(), 10.0);
        assert_eq!(f3[1].points[100].spec.r, 1.0);

        let f2 = &figure_files(FigureId::F2).unwrap()[0];
        assert_eq!(f2.values.len(), GAMMA_POINTS);
        assert_eq!(f2.values[0], 0.01);
        assert_eq!(f2.values[100], 10.0);
    }
}
