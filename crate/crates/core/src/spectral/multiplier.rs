use crate::{Error, Field, Result, Scalar};

/// `C^inf` monotone step from 0 (t <= 0) to 1 (t >= 1).
pub fn smooth_step<T: Scalar>(t: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    if t >= T::one() {
        return T::one();
    }
    let a = (-t.recip()).exp();
    let b = (-(T::one() - t).recip()).exp();
    a / (a + b)
}

/// Littlewood-Paley bump: 1 on `rho <= 1`, 0 on `rho >= 2`.
pub fn bump<T: Scalar>(rho: T) -> T {
    T::one() - smooth_step(rho - T::one())
}

/// Radial Fourier multiplier descriptor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplierSpec<T> {
    /// `m_{N,s}`: 1 below `N`, `(rho/N)^{s-1}` above `2N`.
    IMultiplier { n: T, s: T },
    LpLow(T),
    LpBand(T),
    LpHigh(T),
    FracDeriv { alpha: T, homogeneous: bool },
}

impl<T: Scalar> MultiplierSpec<T> {
    pub fn i_multiplier(n: T, s: T) -> Result<Self> {
        let spec = Self::IMultiplier { n, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::IMultiplier { n, s } => {
                if !(n > T::zero() && n.is_finite()) {
                    return Err(Error::InvalidParameter(format!("cutoff N = {n} must be positive")));
                }
                if !(s > T::zero() && s <= T::one()) {
                    return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, 1]")));
                }
            }
            Self::LpLow(m) | Self::LpBand(m) | Self::LpHigh(m) => {
                if !(m > T::zero() && m.is_finite()) {
                    return Err(Error::InvalidParameter(format!("scale M = {m} must be positive")));
                }
            }
            Self::FracDeriv { alpha, .. } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidParameter("non-finite derivative order".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, rho: T) -> T {
        match *self {
            Self::IMultiplier { n, s } => i_symbol(rho, n, s),
            Self::LpLow(m) => bump(rho / m),
            Self::LpBand(m) => {
                let two = T::lit(2.0);
                bump(rho / m) - bump(two * rho / m)
            }
            Self::LpHigh(m) => T::one() - bump(rho / m),
            Self::FracDeriv { alpha, homogeneous } => {
                if homogeneous {
                    if rho == T::zero() {
                        if alpha == T::zero() {
                            T::one()
                        } else {
                            T::zero()
                        }
                    } else {
                        rho.powf(alpha)
                    }
                } else {
                    (T::one() + rho).powf(alpha)
                }
            }
        }
    }
}

/// The I-multiplier symbol, smooth-step blended on `[N, 2N]`.
pub fn i_symbol<T: Scalar>(rho: T, n: T, s: T) -> T {
    if rho <= n {
        return T::one();
    }
    let decay = (rho / n).powf(s - T::one());
    if rho >= n + n {
        return decay;
    }
    let theta = smooth_step((rho - n) / n);
    (T::one() - theta) + theta * decay
}

/// Multiplies the spectrum by `spec.eval(|xi|)`.
pub fn apply_multiplier<T: Scalar>(field: &Field<T>, spec: &MultiplierSpec<T>) -> Result<Field<T>> {
    spec.validate()?;
    let mut s = field.forward()?;
    s.multiply_radial(|rho| spec.eval(rho));
    s.inverse()
}

/// `I u` for the multiplier `m_{N,s}`.
pub fn i_operator<T: Scalar>(field: &Field<T>, n: T, s: T) -> Result<Field<T>> {
    apply_multiplier(field, &MultiplierSpec::i_multiplier(n, s)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpMode {
    Low,
    Band,
    High,
}

/// Dyadic exponent of `m`, or an error if it is not a power of two.
pub fn dyadic_exponent<T: Scalar>(m: T) -> Result<i32> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!("M = {m} is not a positive dyadic number")));
    }
    let k = m.log2().round();
    let k_i = k.to_i32().unwrap_or(i32::MAX);
    if T::lit(2.0).powi(k_i) != m {
        return Err(Error::InvalidParameter(format!("M = {m} is not a power of two")));
    }
    Ok(k_i)
}

/// Littlewood-Paley projection `P_{<=M}`, `P_M` or `P_{>M}`.
pub fn littlewood_paley<T: Scalar>(field: &Field<T>, m: T, mode: LpMode) -> Result<Field<T>> {
    dyadic_exponent(m)?;
    let floor = field.grid().box_length().recip();
    if m < floor {
        return Err(Error::InvalidParameter(format!(
            "M = {m} is below the grid resolution {floor}"
        )));
    }
    let spec = match mode {
        LpMode::Low => MultiplierSpec::LpLow(m),
        LpMode::Band => MultiplierSpec::LpBand(m),
        LpMode::High => MultiplierSpec::LpHigh(m),
    };
    apply_multiplier(field, &spec)
}
