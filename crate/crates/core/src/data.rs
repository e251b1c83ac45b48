//! Initial data families.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Field, Grid, Result, Scalar, Spectrum};

/// Parameters of `A exp(-|x-c|^2 / (2 w^2)) exp(2 pi i v.x + i beta |x-c|^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian<T> {
    pub amplitude: T,
    pub width: T,
    pub velocity: [T; 2],
    pub center: [T; 2],
    pub chirp: T,
}

impl<T: Scalar> Gaussian<T> {
    pub fn new(amplitude: T, width: T) -> Self {
        Self {
            amplitude,
            width,
            velocity: [T::zero(); 2],
            center: [T::zero(); 2],
            chirp: T::zero(),
        }
    }

    pub fn with_velocity(mut self, v: [T; 2]) -> Self {
        self.velocity = v;
        self
    }

    pub fn with_center(mut self, c: [T; 2]) -> Self {
        self.center = c;
        self
    }

    pub fn with_chirp(mut self, beta: T) -> Self {
        self.chirp = beta;
        self
    }

    pub fn value(&self, x: [T; 2]) -> Complex<T> {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let r2 = d[0] * d[0] + d[1] * d[1];
        let two = T::lit(2.0);
        let env = self.amplitude * (-r2 / (two * self.width * self.width)).exp();
        let phase = two * T::PI() * (self.velocity[0] * x[0] + self.velocity[1] * x[1])
            + self.chirp * r2;
        Complex::from_polar(env, phase)
    }

    pub fn sample(&self, grid: &Grid<T>) -> Result<Field<T>> {
        if !(self.width > T::zero()) {
            return Err(Error::InvalidParameter(format!("width {} must be positive", self.width)));
        }
        let one_d = grid.dims() == 1;
        let g = if one_d {
            Self { center: [self.center[0], T::zero()], velocity: [self.velocity[0], T::zero()], ..*self }
        } else {
            *self
        };
        Field::from_fn(grid, |x| g.value(x))
    }
}

/// `A exp(2 pi i k.x)`; `k` must lie on the frequency lattice so the wave is periodic.
pub fn plane_wave<T: Scalar>(grid: &Grid<T>, amplitude: T, k: [T; 2]) -> Result<Field<T>> {
    let l = grid.box_length();
    for kj in k {
        let j = kj * l;
        if (j - j.round()).abs() > T::lit(1e-9) * j.abs().max(T::one()) {
            return Err(Error::InvalidParameter(format!(
                "wavevector component {kj} is not a multiple of 1/L"
            )));
        }
    }
    let two_pi = T::PI() + T::PI();
    Field::from_fn(grid, |x| Complex::from_polar(amplitude, two_pi * (k[0] * x[0] + k[1] * x[1])))
}

/// Random field whose spectrum is supported in `|xi| <= radius`, scaled to unit `L^2` norm.
pub fn random_band_limited<T: Scalar>(grid: &Grid<T>, radius: T, seed: u64) -> Result<Field<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    let mut any = false;
    for (i, c) in coeffs.iter_mut().enumerate() {
        let re: f64 = rng.random_range(-1.0..1.0);
        let im: f64 = rng.random_range(-1.0..1.0);
        if grid.radial_frequency(i) <= radius {
            *c = Complex::new(T::lit(re), T::lit(im));
            any = true;
        }
    }
    if !any {
        return Err(Error::InvalidParameter(format!("no lattice mode within radius {radius}")));
    }
    let field = Spectrum::new(grid, coeffs)?.inverse()?;
    let norm = field.norm_sq().sqrt();
    Ok(field.scale(norm.recip()))
}

/// Random-phase field with `|û(ξ)| ∝ (1 + |ξ|)^(-decay)` for `|ξ| <= radius`, scaled to unit `L^2` norm.
pub fn power_law<T: Scalar>(grid: &Grid<T>, decay: T, radius: T, seed: u64) -> Result<Field<T>> {
    if !(decay >= T::zero()) || !decay.is_finite() {
        return Err(Error::InvalidParameter(format!("decay {decay} must be nonnegative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    let mut any = false;
    for (i, c) in coeffs.iter_mut().enumerate() {
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = grid.radial_frequency(i);
        if r <= radius {
            *c = Complex::from_polar((T::one() + r).powf(-decay), T::lit(phase));
            any = true;
        }
    }
    if !any {
        return Err(Error::InvalidParameter(format!("no lattice mode within radius {radius}")));
    }
    let field = Spectrum::new(grid, coeffs)?.inverse()?;
    let norm = field.norm_sq().sqrt();
    Ok(field.scale(norm.recip()))
}
