//! Arithmetic of the globalisation argument.

use anyhow::{bail, Result};
use nlslab_core::propagator::lambda_for;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Globalization {
    pub s: f64,
    pub n: f64,
    pub t0: f64,
    pub lambda: f64,
    /// Number of unit subintervals, `(2K)^4 N^{1/2} (λ^2 T0)^{1/3} / μ0`.
    pub intervals: f64,
    /// `N^{3/2}`, the count the increment bound can absorb.
    pub budget: f64,
    /// Growth exponent of the `H^s` norm; infinite for `s <= 2/5`.
    pub exponent: f64,
    pub admissible: bool,
}

/// `3s(1-s) / (2(5s-2))`, or `+inf` when `s <= 2/5`.
pub fn growth_exponent(s: f64) -> f64 {
    let d = 5.0 * s - 2.0;
    if d <= 0.0 {
        return f64::INFINITY;
    }
    3.0 * s * (1.0 - s) / (2.0 * d)
}

pub fn globalization_calc(s: f64, n: f64, t0: f64, k: f64, mu0: f64) -> Result<Globalization> {
    if !(s > 0.0 && s < 1.0) {
        bail!("s = {s} must lie in (0, 1)");
    }
    for (name, v) in [("N", n), ("T0", t0), ("K", k), ("mu0", mu0)] {
        if !(v > 0.0) || !v.is_finite() {
            bail!("{name} = {v} must be positive");
        }
    }
    let lambda = lambda_for(n, s)?;
    let intervals = (2.0 * k).powi(4) * n.sqrt() * (lambda * lambda * t0).cbrt() / mu0;
    let budget = n.powf(1.5);
    let exponent = growth_exponent(s);
    Ok(Globalization {
        s,
        n,
        t0,
        lambda,
        intervals,
        budget,
        exponent,
        admissible: exponent.is_finite() && intervals <= budget,
    })
}

/// Dyadic exponents searched for the admissibility threshold.
pub const THRESHOLD_SEARCH: std::ops::RangeInclusive<i32> = 0..=64;

/// Smallest dyadic `N = 2^j` (`j` in [`THRESHOLD_SEARCH`]) from which every
/// larger searched `N` is admissible.
pub fn admissibility_threshold(s: f64, t0: f64, k: f64, mu0: f64) -> Result<Option<f64>> {
    let mut threshold = None;
    for j in THRESHOLD_SEARCH.rev() {
        let n = 2f64.powi(j);
        if globalization_calc(s, n, t0, k, mu0)?.admissible {
            threshold = Some(n);
        } else {
            break;
        }
    }
    Ok(threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_values() {
        assert!((growth_exponent(0.5) - 0.75).abs() < 1e-15);
        assert_eq!(growth_exponent(1.0), 0.0);
        assert!(growth_exponent(0.4).is_infinite());
        assert!(growth_exponent(0.3).is_infinite());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(globalization_calc(0.0, 8.0, 1.0, 1.0, 0.1).is_err());
        assert!(globalization_calc(0.5, -8.0, 1.0, 1.0, 0.1).is_err());
        assert!(globalization_calc(0.5, 8.0, 1.0, 1.0, 0.0).is_err());
    }
}
