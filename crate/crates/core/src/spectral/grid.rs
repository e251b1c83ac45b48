use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result, Scalar};

/// Uniform periodic grid with `n` samples per axis on a box of side `box_length`.
///
/// Sample `j` along an axis sits at the cell centre `-L/2 + (j + 1/2) dx`, so the
/// origin is never a grid point. Frequencies follow the `e^{-2 pi i xi x}` convention:
/// FFT index `k` carries `xi = j / L` with `j` the signed index in `[-n/2, n/2)`.
/// Two-dimensional samples are stored row-major, axis 0 first.
#[derive(Clone)]
pub struct Grid<T: Scalar> {
    n: usize,
    dims: usize,
    box_length: T,
    freqs: Arc<[T]>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    padded: Arc<OnceLock<Grid<T>>>,
}

impl<T: Scalar> Grid<T> {
    pub fn new_2d(n: usize, box_length: T) -> Result<Self> {
        Self::build(n, 2, box_length)
    }

    pub fn new_1d(n: usize, box_length: T) -> Result<Self> {
        Self::build(n, 1, box_length)
    }

    fn build(n: usize, dims: usize, box_length: T) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 8"
            )));
        }
        if !(box_length > T::zero()) || !box_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "box length {box_length} must be positive and finite"
            )));
        }
        let freqs: Arc<[T]> = (0..n)
            .map(|k| T::from_isize(signed_index(k, n)).unwrap() / box_length)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            dims,
            box_length,
            freqs,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            padded: Arc::new(OnceLock::new()),
        })
    }

    /// Same geometry with a different box length (used by the scaling map).
    pub fn with_box_length(&self, box_length: T) -> Result<Self> {
        Self::build(self.n, self.dims, box_length)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Number of samples, `n^dims`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn box_length(&self) -> T {
        self.box_length
    }

    pub fn spacing(&self) -> T {
        self.box_length / T::from_usize_lossy(self.n)
    }

    /// Quadrature weight of one sample, `dx^dims`.
    pub fn cell_measure(&self) -> T {
        self.spacing().powi(self.dims as i32)
    }

    /// Weight of one Fourier coefficient in Plancherel sums, `(1/L)^dims`.
    pub fn dual_measure(&self) -> T {
        self.box_length.recip().powi(self.dims as i32)
    }

    pub fn signed_index(&self, k: usize) -> isize {
        signed_index(k, self.n)
    }

    /// Splits a flat index into per-axis indices (second entry is 0 in 1D).
    #[inline]
    pub fn axis_indices(&self, idx: usize) -> [usize; 2] {
        if self.dims == 2 {
            [idx / self.n, idx % self.n]
        } else {
            [idx, 0]
        }
    }

    pub fn coordinate(&self, k: usize) -> T {
        let half = T::lit(0.5);
        -half * self.box_length + (T::from_usize_lossy(k) + half) * self.spacing()
    }

    /// Physical position of a sample (second entry is 0 in 1D).
    pub fn position(&self, idx: usize) -> [T; 2] {
        let [i, j] = self.axis_indices(idx);
        if self.dims == 2 {
            [self.coordinate(i), self.coordinate(j)]
        } else {
            [self.coordinate(i), T::zero()]
        }
    }

    /// Frequency vector of a Fourier index (second entry is 0 in 1D).
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [T; 2] {
        let [i, j] = self.axis_indices(idx);
        if self.dims == 2 {
            [self.freqs[i], self.freqs[j]]
        } else {
            [self.freqs[i], T::zero()]
        }
    }

    #[inline]
    pub fn radial_frequency(&self, idx: usize) -> T {
        let [a, b] = self.wavevector(idx);
        a.hypot(b)
    }

    /// Largest `|xi|` present on the grid.
    pub fn max_frequency(&self) -> T {
        let half = T::from_usize_lossy(self.n / 2) / self.box_length;
        half * T::from_usize_lossy(self.dims).sqrt()
    }

    /// Frequency along one axis for a single-axis index.
    pub fn axis_frequency(&self, k: usize) -> T {
        self.freqs[k]
    }

    /// True for modes removed by the 2/3 rule (some axis has `3|j| >= n`).
    #[inline]
    pub fn is_truncated(&self, idx: usize) -> bool {
        let [i, j] = self.axis_indices(idx);
        let cut = |k: usize| 3 * signed_index(k, self.n).unsigned_abs() >= self.n;
        cut(i) || (self.dims == 2 && cut(j))
    }

    /// True when the axis index is the Nyquist row, where odd derivatives vanish.
    #[inline]
    pub fn is_nyquist(&self, k: usize) -> bool {
        k == self.n / 2
    }

    /// Grid with twice the samples and twice the box, same spacing; used for
    /// non-periodic (zero padded) convolutions.
    pub fn padded(&self) -> Result<Grid<T>> {
        if let Some(g) = self.padded.get() {
            return Ok(g.clone());
        }
        let g = Self::build(2 * self.n, self.dims, self.box_length + self.box_length)?;
        let _ = self.padded.set(g.clone());
        Ok(g)
    }

    /// Unnormalised forward DFT in place.
    pub fn fft_forward(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.forward);
    }

    /// Inverse DFT in place, including the `1/n^dims` factor.
    pub fn fft_inverse(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.inverse);
        let scale = T::from_usize_lossy(self.len()).recip();
        for v in data.iter_mut() {
            *v = *v * scale;
        }
    }

    fn transform(&self, data: &mut [Complex<T>], plan: &Arc<dyn Fft<T>>) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid");
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        if self.dims == 2 {
            transpose_square(data, self.n);
            plan.process_with_scratch(data, &mut scratch);
            transpose_square(data, self.n);
        }
    }
}

impl<T: Scalar> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.dims == other.dims && self.box_length == other.box_length
    }
}

impl<T: Scalar> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("dims", &self.dims)
            .field("box_length", &self.box_length)
            .finish()
    }
}

#[inline]
fn signed_index(k: usize, n: usize) -> isize {
    if k < n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

fn transpose_square<C: Copy>(data: &mut [C], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
