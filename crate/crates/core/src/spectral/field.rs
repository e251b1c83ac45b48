use num_complex::Complex;

use crate::{Error, Grid, Result, Scalar};

/// Complex samples on a periodic grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Scalar> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
}

/// Fourier coefficients `u_hat(xi) = dx^d * sum_x u(x) e^{-2 pi i xi x}` in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T: Scalar> {
    grid: Grid<T>,
    coeffs: Vec<Complex<T>>,
}

pub(crate) fn check_finite<T: Scalar>(values: &[Complex<T>], context: &'static str) -> Result<()> {
    match values
        .iter()
        .position(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        Some(index) => Err(Error::NonFinite { context, index }),
        None => Ok(()),
    }
}

fn check_len<T: Scalar>(grid: &Grid<T>, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "expected {} samples, got {len}",
            grid.len()
        )));
    }
    Ok(())
}

impl<T: Scalar> Field<T> {
    pub fn new(grid: &Grid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        check_len(grid, values.len())?;
        check_finite(&values, "field sample")?;
        Ok(Self { grid: grid.clone(), values })
    }

    pub(crate) fn from_raw(grid: &Grid<T>, values: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self::from_raw(grid, vec![Complex::new(T::zero(), T::zero()); grid.len()])
    }

    /// Samples `f` at every grid position.
    pub fn from_fn(grid: &Grid<T>, mut f: impl FnMut([T; 2]) -> Complex<T>) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self::new(grid, values)
    }

    pub fn from_real(grid: &Grid<T>, values: &[T]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum |u|^2 dx^d`.
    pub fn norm_sq(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum::<T>() * self.grid.cell_measure()
    }

    /// `|u|^2` pointwise.
    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Pointwise map, rechecked for finiteness.
    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Result<Self> {
        Self::new(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: T) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| v * c).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_raw(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_raw(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|v| v.conj()).collect())
    }

    /// Largest pointwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    pub fn forward(&self) -> Result<Spectrum<T>> {
        transform_forward(self)
    }
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(grid: &Grid<T>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        check_len(grid, coeffs.len())?;
        check_finite(&coeffs, "spectral coefficient")?;
        Ok(Self { grid: grid.clone(), coeffs })
    }

    pub(crate) fn from_raw(grid: &Grid<T>, coeffs: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid: grid.clone(), coeffs }
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self::from_raw(grid, vec![Complex::new(T::zero(), T::zero()); grid.len()])
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// `sum |u_hat|^2 (1/L)^d`, equal to the field's `norm_sq` by Plancherel.
    pub fn norm_sq(&self) -> T {
        self.coeffs.iter().map(|v| v.norm_sqr()).sum::<T>() * self.grid.dual_measure()
    }

    /// Multiplies each coefficient by `f(flat index, xi)`.
    pub fn multiply(&mut self, f: impl Fn(usize, [T; 2]) -> Complex<T>) {
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c = *c * f(i, self.grid.wavevector(i));
        }
    }

    /// Multiplies by the real radial symbol `f(|xi|)`.
    pub fn multiply_radial(&mut self, f: impl Fn(T) -> T) {
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c = *c * f(self.grid.radial_frequency(i));
        }
    }

    /// Spectrum of `d/dx_axis`, i.e. multiplication by `2 pi i xi_axis`, with the
    /// Nyquist mode of that axis removed.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = self.clone();
        derivative_in_place(&self.grid, &mut out.coeffs, axis);
        out
    }

    /// Zeroes every mode removed by the 2/3 rule.
    pub fn dealias(&mut self) {
        dealias_in_place(&self.grid, &mut self.coeffs);
    }

    pub fn inverse(&self) -> Result<Field<T>> {
        transform_inverse(self)
    }
}

pub(crate) fn derivative_in_place<T: Scalar>(grid: &Grid<T>, data: &mut [Complex<T>], axis: usize) {
    assert!(axis < grid.dims(), "axis out of range");
    let two_pi = T::PI() + T::PI();
    for (i, c) in data.iter_mut().enumerate() {
        let k = grid.axis_indices(i)[axis];
        if grid.is_nyquist(k) {
            *c = Complex::new(T::zero(), T::zero());
        } else {
            let w = two_pi * grid.axis_frequency(k);
            *c = Complex::new(-c.im * w, c.re * w);
        }
    }
}

pub(crate) fn dealias_in_place<T: Scalar>(grid: &Grid<T>, data: &mut [Complex<T>]) {
    for (i, c) in data.iter_mut().enumerate() {
        if grid.is_truncated(i) {
            *c = Complex::new(T::zero(), T::zero());
        }
    }
}

/// Raw forward transform of a buffer with the crate's normalisation.
pub(crate) fn forward_in_place<T: Scalar>(grid: &Grid<T>, data: &mut [Complex<T>]) {
    grid.fft_forward(data);
    let w = grid.cell_measure();
    for v in data.iter_mut() {
        *v = *v * w;
    }
}

/// Raw inverse transform of a buffer with the crate's normalisation.
pub(crate) fn inverse_in_place<T: Scalar>(grid: &Grid<T>, data: &mut [Complex<T>]) {
    grid.fft_inverse(data);
    let w = grid.cell_measure().recip();
    for v in data.iter_mut() {
        *v = *v * w;
    }
}

pub fn transform_forward<T: Scalar>(field: &Field<T>) -> Result<Spectrum<T>> {
    check_finite(&field.values, "field sample")?;
    let mut data = field.values.clone();
    forward_in_place(&field.grid, &mut data);
    Ok(Spectrum::from_raw(&field.grid, data))
}

pub fn transform_inverse<T: Scalar>(spectrum: &Spectrum<T>) -> Result<Field<T>> {
    check_finite(&spectrum.coeffs, "spectral coefficient")?;
    let mut data = spectrum.coeffs.clone();
    inverse_in_place(&spectrum.grid, &mut data);
    Ok(Field::from_raw(&spectrum.grid, data))
}

/// Spectral gradient; in one dimension the second component is zero.
pub fn gradient<T: Scalar>(field: &Field<T>) -> Result<[Field<T>; 2]> {
    let spec = field.forward()?;
    let dx = spec.derivative(0).inverse()?;
    let dy = if field.grid.dims() == 2 {
        spec.derivative(1).inverse()?
    } else {
        Field::zeros(&field.grid)
    };
    Ok([dx, dy])
}
