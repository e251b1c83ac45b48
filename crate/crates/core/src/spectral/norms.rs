use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::spectral::multiplier::i_symbol;
use crate::{trapezoid, Error, Field, MultiplierSpec, Result, Scalar, Trajectory};

/// `(sum |u|^r dx^d)^{1/r}`; `r = inf` gives the max modulus.
pub fn lebesgue_norm<T: Scalar>(field: &Field<T>, r: T) -> Result<T> {
    if r.is_nan() || r < T::one() {
        return Err(Error::InvalidParameter(format!("exponent r = {r} must be >= 1")));
    }
    if r.is_infinite() {
        return Ok(field.max_abs());
    }
    let half = r / T::lit(2.0);
    let sum: T = field.values().iter().map(|v| v.norm_sqr().powf(half)).sum();
    Ok((sum * field.grid().cell_measure()).powf(r.recip()))
}

/// `|| D^{s0} u ||_2` (homogeneous, `|0|^0 = 1`) or `|| <D>^{s0} u ||_2`.
pub fn sobolev_norm<T: Scalar>(field: &Field<T>, s0: T, homogeneous: bool) -> Result<T> {
    let spec = field.forward()?;
    if homogeneous && s0 < T::zero() {
        let zero = spec.coeffs()[0].norm();
        let total = spec.coeffs().iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if zero > T::epsilon().sqrt() * total.max(T::min_positive_value()) {
            return Err(Error::InvalidParameter(
                "homogeneous norm of negative order needs a zero-mean field".into(),
            ));
        }
    }
    let w = MultiplierSpec::FracDeriv { alpha: s0, homogeneous };
    w.validate()?;
    let grid = spec.grid();
    let sum: T = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let m = w.eval(grid.radial_frequency(i));
            m * m * c.norm_sqr()
        })
        .sum();
    Ok((sum * grid.dual_measure()).sqrt())
}

/// Lebesgue exponent in `[2, inf]`, kept as an exact rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Ratio<i64>),
    Infinite,
}

impl Exponent {
    pub fn int(p: i64) -> Self {
        Self::Finite(Ratio::from_integer(p))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::Finite(Ratio::new(num, den))
    }

    pub fn reciprocal(&self) -> Ratio<i64> {
        match *self {
            Self::Finite(p) => p.recip(),
            Self::Infinite => Ratio::zero(),
        }
    }

    pub fn to_scalar<T: Scalar>(&self) -> T {
        match *self {
            Self::Finite(p) => T::lit(p.to_f64().unwrap_or(f64::NAN)),
            Self::Infinite => T::infinity(),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

/// Strichartz pair in two dimensions: `1/q + 1/r = 1/2`, endpoint `(2, inf)` excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdmissiblePair {
    q: Exponent,
    r: Exponent,
}

impl AdmissiblePair {
    pub fn new(q: Exponent, r: Exponent) -> Result<Self> {
        for e in [q, r] {
            if let Exponent::Finite(p) = e {
                if p < Ratio::from_integer(2) {
                    return Err(Error::InvalidPair(format!("exponent {p} is below 2")));
                }
            }
        }
        if q.reciprocal() + r.reciprocal() != Ratio::new(1, 2) {
            return Err(Error::InvalidPair(format!("1/{q} + 1/{r} != 1/2")));
        }
        if q == Exponent::int(2) {
            return Err(Error::InvalidPair("endpoint (2, inf) is excluded".into()));
        }
        Ok(Self { q, r })
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    pub fn r(&self) -> Exponent {
        self.r
    }

    /// `{(inf,2), (8,8/3), (4,4), (3,6), (8/3,8)}`.
    pub fn default_set() -> Vec<Self> {
        [
            (Exponent::Infinite, Exponent::int(2)),
            (Exponent::int(8), Exponent::ratio(8, 3)),
            (Exponent::int(4), Exponent::int(4)),
            (Exponent::int(3), Exponent::int(6)),
            (Exponent::ratio(8, 3), Exponent::int(8)),
        ]
        .into_iter()
        .map(|(q, r)| Self::new(q, r).expect("default pairs are admissible"))
        .collect()
    }
}

impl fmt::Display for AdmissiblePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

/// `|| u ||_{L^q_t L^r_x}` by the trapezoid rule over the snapshots.
pub fn strichartz_norm<T: Scalar>(traj: &Trajectory<T>, pair: &AdmissiblePair) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let r = pair.r().to_scalar::<T>();
    let spatial = traj
        .fields()
        .iter()
        .map(|f| lebesgue_norm(f, r))
        .collect::<Result<Vec<T>>>()?;
    time_norm(&spatial, traj.spacing(), pair.q())
}

/// `L^q` norm in time of per-snapshot spatial norms.
pub fn time_norm<T: Scalar>(spatial: &[T], h: T, q: Exponent) -> Result<T> {
    if spatial.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    match q {
        Exponent::Infinite => Ok(spatial.iter().copied().fold(T::zero(), T::max)),
        Exponent::Finite(_) => {
            let qs = q.to_scalar::<T>();
            let powered: Vec<T> = spatial.iter().map(|v| v.powf(qs)).collect();
            Ok(trapezoid(&powered, h).powf(qs.recip()))
        }
    }
}

/// `<D> I u`.
pub fn bracket_i<T: Scalar>(field: &Field<T>, n: T, s: T) -> Result<Field<T>> {
    MultiplierSpec::i_multiplier(n, s)?;
    let mut spec = field.forward()?;
    spec.multiply_radial(|rho| (T::one() + rho) * i_symbol(rho, n, s));
    spec.inverse()
}

/// Max over `pairs` of the Strichartz norm of `<D> I u`.
pub fn z_norm<T: Scalar>(traj: &Trajectory<T>, n: T, s: T, pairs: &[AdmissiblePair]) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if pairs.is_empty() {
        return Err(Error::InvalidPair("empty pair set".into()));
    }
    let smoothed = traj
        .fields()
        .iter()
        .map(|f| bracket_i(f, n, s))
        .collect::<Result<Vec<_>>>()?;
    let mut best = T::zero();
    for pair in pairs {
        let r = pair.r().to_scalar::<T>();
        let spatial = smoothed
            .iter()
            .map(|f| lebesgue_norm(f, r))
            .collect::<Result<Vec<T>>>()?;
        best = best.max(time_norm(&spatial, traj.spacing(), pair.q())?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(AdmissiblePair::new(Exponent::int(4), Exponent::int(4)).is_ok());
        assert!(AdmissiblePair::new(Exponent::int(2), Exponent::Infinite).is_err());
        assert!(AdmissiblePair::new(Exponent::int(4), Exponent::int(3)).is_err());
        assert!(AdmissiblePair::new(Exponent::ratio(3, 2), Exponent::int(-6)).is_err());
        assert_eq!(AdmissiblePair::default_set().len(), 5);
    }

    #[test]
    fn lebesgue_rejects_small_exponent() {
        let g = crate::Grid::new_2d(8, 1.0_f64).unwrap();
        assert!(lebesgue_norm(&Field::zeros(&g), 0.5).is_err());
        assert_eq!(lebesgue_norm(&Field::zeros(&g), 3.0).unwrap(), 0.0);
    }
}
