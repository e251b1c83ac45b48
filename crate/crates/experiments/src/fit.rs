//! Least-squares power-law fits.

use anyhow::{bail, Result};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    /// 95% confidence half-width of the slope; zero for an exact fit.
    pub half_width: f64,
    pub points: usize,
    pub notes: Vec<String>,
}

/// Fits `log y = slope * log x + intercept`.
///
/// Points with a nonpositive coordinate are dropped and reported in `notes`;
/// at least three usable points are required.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let mut notes = Vec::new();
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            notes.push(format!("rejected ({x:e}, {y:e}): log of a nonpositive value"));
            continue;
        }
        xs.push(x.ln());
        ys.push(y.ln());
    }
    let n = xs.len();
    if n < 3 {
        bail!("slope fit needs at least 3 positive points, got {n}");
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        bail!("slope fit needs at least two distinct abscissae");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let dof = nf - 2.0;
    let se = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)?.inverse_cdf(0.975);
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (sse / nf).sqrt(),
        half_width: t * se,
        points: n,
        notes,
    })
}
