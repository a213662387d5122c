//! Parameter values given on the command line or in a config file.
//!
//! Accepted forms: a single number (`0.4`), a comma list (`0,0.4,0.8`), a
//! linear grid `start:stop:count`, or a logarithmic grid
//! `start:stop:count:log`.

use anyhow::{bail, Context, Result};

pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let (log, parts) = match parts.as_slice() {
            [a, b, n] => (false, [*a, *b, *n]),
            [a, b, n, "log"] => (true, [*a, *b, *n]),
            _ => bail!("grid {text:?} must look like start:stop:count or start:stop:count:log"),
        };
        let start: f64 = parts[0]
            .parse()
            .with_context(|| format!("bad grid start in {text:?}"))?;
        let stop: f64 = parts[1].parse().with_context(|| format!("bad grid stop in {text:?}"))?;
        let n: usize = parts[2]
            .parse()
            .with_context(|| format!("bad grid count in {text:?}"))?;
        if n == 0 {
            bail!("grid {text:?} is empty");
        }
        if log && !(start > 0.0 && stop > 0.0) {
            bail!("log grid {text:?} needs positive end points");
        }
        return Ok(grid(start, stop, n, log));
    }
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}")))
        .collect::<Result<Vec<_>>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        bail!("values must be finite: {text:?}");
    }
    Ok(values)
}

/// `n` points from `start` to `stop` inclusive, equally spaced in value or
/// in logarithm.
pub fn grid(start: f64, stop: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let frac = |i: usize| i as f64 / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == 0 {
                start
            } else if i == n - 1 {
                stop
            } else if log {
                (start.ln() + frac(i) * (stop.ln() - start.ln())).exp()
            } else {
                start + frac(i) * (stop - start)
            }
        })
        .collect()
}

pub fn parse_single(text: &str, name: &str) -> Result<f64> {
    match parse_values(text)?.as_slice() {
        [v] => Ok(*v),
        _ => bail!("{name} must be a single value here, got {text:?}"),
    }
}
