//! Conserved and monitored quantities: mass, energy, momentum, Morawetz
//! actions, the virial identity and the I-method commutator.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::spectral::{
    bracket_i, dealias_in_place, derivative_in_place, forward_in_place, i_symbol,
    inverse_in_place, time_norm, AdmissiblePair, Exponent,
};
use crate::weights::{Weight, WeightSpec};
use crate::{trapezoid, Error, Field, Grid, MultiplierSpec, Result, Scalar, Trajectory};

/// Real two-component field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<T: Scalar> {
    grid: Grid<T>,
    components: [Vec<T>; 2],
}

/// Real 2x2 matrix field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField<T: Scalar> {
    grid: Grid<T>,
    components: [[Vec<T>; 2]; 2],
}

impl<T: Scalar> VectorField<T> {
    pub fn new(grid: &Grid<T>, components: [Vec<T>; 2]) -> Result<Self> {
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::InvalidGrid("component length does not match grid".into()));
            }
            if let Some(index) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { context: "vector component", index });
            }
        }
        Ok(Self { grid: grid.clone(), components })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn component(&self, j: usize) -> &[T] {
        &self.components[j]
    }

    /// `(sum |V|^2 dx^d)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        let s: T = self.components[0]
            .iter()
            .zip(&self.components[1])
            .map(|(a, b)| *a * *a + *b * *b)
            .sum();
        (s * self.grid.cell_measure()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `∫ V dx`.
    pub fn integral(&self) -> [T; 2] {
        let w = self.grid.cell_measure();
        [
            self.components[0].iter().copied().sum::<T>() * w,
            self.components[1].iter().copied().sum::<T>() * w,
        ]
    }

    /// Spectral curl `∂_1 V_2 - ∂_2 V_1`.
    pub fn curl(&self) -> Vec<T> {
        let d12 = real_derivative(&self.grid, &self.components[1], 0);
        let d21 = real_derivative(&self.grid, &self.components[0], 1);
        d12.iter().zip(&d21).map(|(a, b)| *a - *b).collect()
    }

    /// Spectral divergence.
    pub fn divergence(&self) -> Vec<T> {
        let a = real_derivative(&self.grid, &self.components[0], 0);
        let b = real_derivative(&self.grid, &self.components[1], 1);
        a.iter().zip(&b).map(|(x, y)| *x + *y).collect()
    }
}

impl<T: Scalar> MatrixField<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn component(&self, j: usize, k: usize) -> &[T] {
        &self.components[j][k]
    }

    /// Largest asymmetry `|A_12 - A_21|`.
    pub fn asymmetry(&self) -> T {
        self.components[0][1]
            .iter()
            .zip(&self.components[1][0])
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    /// Row divergence `∂_k A_jk`.
    pub fn divergence(&self) -> [Vec<T>; 2] {
        let row = |j: usize| {
            let a = real_derivative(&self.grid, &self.components[j][0], 0);
            let b = real_derivative(&self.grid, &self.components[j][1], 1);
            a.iter().zip(&b).map(|(x, y)| *x + *y).collect::<Vec<T>>()
        };
        [row(0), row(1)]
    }
}

fn zero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn require_2d<T: Scalar>(grid: &Grid<T>) -> Result<()> {
    if grid.dims() != 2 {
        return Err(Error::InvalidGrid("operation needs a two-dimensional grid".into()));
    }
    Ok(())
}

fn real_derivative<T: Scalar>(grid: &Grid<T>, values: &[T], axis: usize) -> Vec<T> {
    let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    forward_in_place(grid, &mut buf);
    derivative_in_place(grid, &mut buf, axis);
    inverse_in_place(grid, &mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Spectral gradient of raw samples; the second entry is zero in 1D.
fn raw_gradient<T: Scalar>(grid: &Grid<T>, values: &[Complex<T>]) -> [Vec<Complex<T>>; 2] {
    let mut spec = values.to_vec();
    forward_in_place(grid, &mut spec);
    grad_from_spectrum(grid, &spec)
}

fn grad_from_spectrum<T: Scalar>(grid: &Grid<T>, spec: &[Complex<T>]) -> [Vec<Complex<T>>; 2] {
    let axis = |j: usize| {
        if j >= grid.dims() {
            return vec![zero(); grid.len()];
        }
        let mut d = spec.to_vec();
        derivative_in_place(grid, &mut d, j);
        inverse_in_place(grid, &mut d);
        d
    };
    [axis(0), axis(1)]
}

fn cubic<T: Scalar>(values: &[Complex<T>]) -> Vec<Complex<T>> {
    values.iter().map(|v| *v * v.norm_sqr()).collect()
}

/// Dealiased spectrum of `|u|^2 u`.
fn cubic_spectrum<T: Scalar>(grid: &Grid<T>, values: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut nl = cubic(values);
    forward_in_place(grid, &mut nl);
    dealias_in_place(grid, &mut nl);
    nl
}

/// `∫ |u|^2 dx`.
pub fn mass<T: Scalar>(u: &Field<T>) -> T {
    u.norm_sq()
}

/// `∫ Im(conj(u) ∇u) dx`, second entry zero in 1D.
pub fn momentum<T: Scalar>(u: &Field<T>) -> [T; 2] {
    let grid = u.grid();
    let [gx, gy] = raw_gradient(grid, u.values());
    let w = grid.cell_measure();
    let mut p = [T::zero(); 2];
    for (i, v) in u.values().iter().enumerate() {
        let c = v.conj();
        p[0] = p[0] + (c * gx[i]).im;
        p[1] = p[1] + (c * gy[i]).im;
    }
    [p[0] * w, p[1] * w]
}

/// `½ ∫ |∇u|^2 dx` via Plancherel.
pub fn kinetic_energy<T: Scalar>(u: &Field<T>) -> Result<T> {
    let spec = u.forward()?;
    let grid = u.grid();
    let two_pi = T::PI() + T::PI();
    let s: T = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = two_pi * grid.radial_frequency(i);
            k * k * c.norm_sqr()
        })
        .sum();
    Ok(T::lit(0.5) * s * grid.dual_measure())
}

/// `∫ |u|^p dx`.
pub fn power_integral<T: Scalar>(u: &Field<T>, p: T) -> T {
    let half = p / T::lit(2.0);
    u.values().iter().map(|v| v.norm_sqr().powf(half)).sum::<T>() * u.grid().cell_measure()
}

/// `½ ∫ |∇u|^2 + ¼ ∫ |u|^4`.
pub fn energy<T: Scalar>(u: &Field<T>) -> Result<T> {
    Ok(kinetic_energy(u)? + T::lit(0.25) * power_integral(u, T::lit(4.0)))
}

/// `E(I u)`.
pub fn modified_energy<T: Scalar>(u: &Field<T>, n: T, s: T) -> Result<T> {
    energy(&crate::spectral::i_operator(u, n, s)?)
}

/// `Re(f ∇conj(g) - g ∇conj(f))`.
pub fn momentum_bracket<T: Scalar>(f: &Field<T>, g: &Field<T>) -> Result<VectorField<T>> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let gf = raw_gradient(grid, f.values());
    let gg = raw_gradient(grid, g.values());
    Ok(bracket_raw(grid, f.values(), &gf, g.values(), &gg))
}

fn bracket_raw<T: Scalar>(
    grid: &Grid<T>,
    f: &[Complex<T>],
    gf: &[Vec<Complex<T>>; 2],
    g: &[Complex<T>],
    gg: &[Vec<Complex<T>>; 2],
) -> VectorField<T> {
    let comp = |j: usize| {
        (0..grid.len())
            .map(|i| (f[i] * gg[j][i].conj() - g[i] * gf[j][i].conj()).re)
            .collect::<Vec<T>>()
    };
    VectorField { grid: grid.clone(), components: [comp(0), comp(1)] }
}

/// `T_0j = 2 Im(conj(u) ∂_j u)`.
pub fn momentum_density<T: Scalar>(u: &Field<T>) -> VectorField<T> {
    let grid = u.grid();
    let g = raw_gradient(grid, u.values());
    density_from_gradient(grid, u.values(), &g)
}

fn density_from_gradient<T: Scalar>(
    grid: &Grid<T>,
    u: &[Complex<T>],
    g: &[Vec<Complex<T>>; 2],
) -> VectorField<T> {
    let two = T::lit(2.0);
    let comp = |j: usize| u.iter().zip(&g[j]).map(|(a, b)| two * (a.conj() * b).im).collect();
    VectorField { grid: grid.clone(), components: [comp(0), comp(1)] }
}

/// `L_jk = -∂_j∂_k |u|^2 + 4 Re(conj(∂_j u) ∂_k u)`.
pub fn momentum_current<T: Scalar>(u: &Field<T>) -> Result<MatrixField<T>> {
    let grid = u.grid();
    require_2d(grid)?;
    let g = raw_gradient(grid, u.values());
    let rho: Vec<T> = u.density();
    let four = T::lit(4.0);
    let mut components: [[Vec<T>; 2]; 2] = Default::default();
    for j in 0..2 {
        let dj = real_derivative(grid, &rho, j);
        for k in 0..2 {
            let djk = real_derivative(grid, &dj, k);
            components[j][k] = (0..grid.len())
                .map(|i| -djk[i] + four * (g[j][i].conj() * g[k][i]).re)
                .collect();
        }
    }
    Ok(MatrixField { grid: grid.clone(), components })
}

/// `‖∂_t T_0j + ∂_k L_jk - 2{|u|^2 u, u}_p^j‖_{L^2}` at snapshot `k`,
/// with a centred difference in time.
pub fn local_momentum_identity_residual<T: Scalar>(traj: &Trajectory<T>, k: usize) -> Result<T> {
    if k == 0 || k + 1 >= traj.len() {
        return Err(Error::InvalidParameter(format!(
            "snapshot {k} has no neighbours in a trajectory of {}",
            traj.len()
        )));
    }
    let h = traj.spacing();
    let fields = traj.fields();
    let u = &fields[k];
    let grid = u.grid();
    require_2d(grid)?;
    let before = momentum_density(&fields[k - 1]);
    let after = momentum_density(&fields[k + 1]);
    let div_l = momentum_current(u)?.divergence();
    let nl = cubic_spectrum(grid, u.values());
    let gn = grad_from_spectrum(grid, &nl);
    let mut nl_x = nl.clone();
    inverse_in_place(grid, &mut nl_x);
    let gu = raw_gradient(grid, u.values());
    let br = bracket_raw(grid, &nl_x, &gn, u.values(), &gu);
    let two = T::lit(2.0);
    let mut sum = T::zero();
    for j in 0..2 {
        for i in 0..grid.len() {
            let dt = (after.components[j][i] - before.components[j][i]) / (two * h);
            let r = dt + div_l[j][i] - two * br.components[j][i];
            sum = sum + r * r;
        }
    }
    Ok((sum * grid.cell_measure()).sqrt())
}

/// `M_a = 2 ∫ ∇a · Im(conj(u) ∇u) dx`.
pub fn morawetz_action<T: Scalar, W: Weight<T> + ?Sized>(u: &Field<T>, weight: &W) -> Result<T> {
    let grid = u.grid();
    require_2d(grid)?;
    let g = raw_gradient(grid, u.values());
    let mut s = T::zero();
    for (i, v) in u.values().iter().enumerate() {
        let da = weight.gradient(grid.position(i));
        let c = v.conj();
        s = s + da[0] * (c * g[0][i]).im + da[1] * (c * g[1][i]).im;
    }
    Ok(T::lit(2.0) * s * grid.cell_measure())
}

/// The three integrals of the virial identity at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirialTerms<T> {
    /// `-∫ ΔΔa |u|^2`, absent for weights with a point mass.
    pub bilaplacian: Option<T>,
    /// `2 ∫ Δa G` with `G = ½|u|^4`.
    pub potential: T,
    /// `4 ∫ (∂_j∂_k a) Re(conj(∂_j u) ∂_k u)`.
    pub hessian: T,
}

impl<T: Scalar> VirialTerms<T> {
    pub fn rate(&self) -> Option<T> {
        self.bilaplacian.map(|b| b + self.potential + self.hessian)
    }
}

pub fn virial_terms<T: Scalar, W: Weight<T> + ?Sized>(
    u: &Field<T>,
    weight: &W,
) -> Result<VirialTerms<T>> {
    let grid = u.grid();
    require_2d(grid)?;
    let g = raw_gradient(grid, u.values());
    let (mut bi, mut pot, mut hess) = (T::zero(), T::zero(), T::zero());
    let mut singular = false;
    for (i, v) in u.values().iter().enumerate() {
        let x = grid.position(i);
        let rho = v.norm_sqr();
        match weight.bilaplacian(x) {
            Some(b) => bi = bi - b * rho,
            None => singular = true,
        }
        pot = pot + weight.laplacian(x) * rho * rho;
        let h = weight.hessian(x);
        for j in 0..2 {
            for k in 0..2 {
                hess = hess + h[j][k] * (g[j][i].conj() * g[k][i]).re;
            }
        }
    }
    let w = grid.cell_measure();
    Ok(VirialTerms {
        bilaplacian: if singular { None } else { Some(bi * w) },
        potential: pot * w,
        hessian: T::lit(4.0) * hess * w,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirialReport<T> {
    /// `|ΔM_a - ∫ rate dt|`.
    pub residual: T,
    pub action_change: T,
    pub min_potential: T,
    pub min_hessian: T,
    /// Both sign-definite terms `>= -1e-9` at every snapshot in range.
    pub positive: bool,
}

/// Virial identity check over snapshots `first..=last`.
pub fn virial_residual<T: Scalar, W: Weight<T> + ?Sized>(
    traj: &Trajectory<T>,
    weight: &W,
    first: usize,
    last: usize,
) -> Result<VirialReport<T>> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if first > last || last >= traj.len() {
        return Err(Error::InvalidParameter(format!(
            "snapshot range {first}..={last} outside 0..{}",
            traj.len()
        )));
    }
    let mut rates = Vec::with_capacity(last - first + 1);
    let (mut min_pot, mut min_hess) = (T::infinity(), T::infinity());
    for u in &traj.fields()[first..=last] {
        let terms = virial_terms(u, weight)?;
        rates.push(terms.rate().ok_or(Error::PointMassWeight)?);
        min_pot = min_pot.min(terms.potential);
        min_hess = min_hess.min(terms.hessian);
    }
    let change = morawetz_action(&traj.fields()[last], weight)?
        - morawetz_action(&traj.fields()[first], weight)?;
    let integral = trapezoid(&rates, traj.spacing());
    let tol = -T::lit(1e-9);
    Ok(VirialReport {
        residual: (change - integral).abs(),
        action_change: change,
        min_potential: min_pot,
        min_hessian: min_hess,
        positive: min_pot >= tol && min_hess >= tol,
    })
}

/// Precomputed FFT of the interaction kernel `K(d) = f'(|d|) d/|d|` on the
/// zero-padded grid, for linear (non-periodic) convolutions.
#[derive(Clone, Debug)]
pub struct InteractionKernel<T: Scalar> {
    grid: Grid<T>,
    padded: Grid<T>,
    kernel_hat: [Vec<Complex<T>>; 2],
}

impl<T: Scalar> InteractionKernel<T> {
    pub fn new(grid: &Grid<T>, weight: &WeightSpec<T>) -> Result<Self> {
        require_2d(grid)?;
        let dx = grid.spacing();
        if weight.m() < dx + dx {
            return Err(Error::UnresolvableKernel(format!(
                "M = {} is below two grid spacings ({})",
                weight.m(),
                dx + dx
            )));
        }
        let padded = grid.padded()?;
        let n2 = padded.n();
        let mut kx = vec![zero(); padded.len()];
        let mut ky = vec![zero(); padded.len()];
        for idx in 0..padded.len() {
            let [i, j] = padded.axis_indices(idx);
            let d = [
                T::from_isize(padded.signed_index(i)).unwrap() * dx,
                T::from_isize(padded.signed_index(j)).unwrap() * dx,
            ];
            let g = weight.gradient(d);
            kx[idx] = Complex::new(g[0], T::zero());
            ky[idx] = Complex::new(g[1], T::zero());
        }
        debug_assert_eq!(n2, 2 * grid.n());
        padded.fft_forward(&mut kx);
        padded.fft_forward(&mut ky);
        Ok(Self { grid: grid.clone(), padded, kernel_hat: [kx, ky] })
    }

    /// `(K * ρ)(x) = ∑_y K(x - y) ρ(y) dx^2` at every grid point.
    pub fn convolve(&self, rho: &[T]) -> [Vec<T>; 2] {
        let n = self.grid.n();
        let n2 = self.padded.n();
        let mut buf = vec![zero(); self.padded.len()];
        for i in 0..n {
            for j in 0..n {
                buf[i * n2 + j] = Complex::new(rho[i * n + j], T::zero());
            }
        }
        self.padded.fft_forward(&mut buf);
        let w = self.grid.cell_measure();
        let out = |c: usize| {
            let mut b: Vec<Complex<T>> = buf
                .iter()
                .zip(&self.kernel_hat[c])
                .map(|(a, k)| *a * *k)
                .collect();
            self.padded.fft_inverse(&mut b);
            let mut o = vec![T::zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    o[i * n + j] = b[i * n2 + j].re * w;
                }
            }
            o
        };
        [out(0), out(1)]
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
}

fn dot_sum<T: Scalar>(a: &[Vec<T>; 2], b: &[Vec<T>; 2]) -> T {
    (0..a[0].len()).map(|i| a[0][i] * b[0][i] + a[1][i] * b[1][i]).sum()
}

fn current<T: Scalar>(u: &[Complex<T>], g: &[Vec<Complex<T>>; 2]) -> [Vec<T>; 2] {
    let comp = |j: usize| u.iter().zip(&g[j]).map(|(a, b)| (a.conj() * b).im).collect();
    [comp(0), comp(1)]
}

/// Interaction Morawetz action of `u1 ⊗ u2` for the weight `a = f(|x1 - x2|)`.
pub fn interaction_action<T: Scalar>(
    u1: &Field<T>,
    u2: &Field<T>,
    weight: &WeightSpec<T>,
) -> Result<T> {
    if u1.grid() != u2.grid() {
        return Err(Error::GridMismatch);
    }
    let kernel = InteractionKernel::new(u1.grid(), weight)?;
    interaction_action_with(&kernel, u1, u2)
}

pub fn interaction_action_with<T: Scalar>(
    kernel: &InteractionKernel<T>,
    u1: &Field<T>,
    u2: &Field<T>,
) -> Result<T> {
    let grid = kernel.grid();
    if u1.grid() != grid || u2.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let p1 = current(u1.values(), &raw_gradient(grid, u1.values()));
    let p2 = current(u2.values(), &raw_gradient(grid, u2.values()));
    let k_rho2 = kernel.convolve(&u2.density());
    let k_rho1 = kernel.convolve(&u1.density());
    let s = dot_sum(&p1, &k_rho2) + dot_sum(&p2, &k_rho1);
    Ok(T::lit(2.0) * s * grid.cell_measure())
}

/// Spectra of `I u` and of the dealiased commutator `I(|u|^2 u) - |Iu|^2 Iu`.
fn commutator_parts<T: Scalar>(u: &Field<T>, n: T, s: T) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    MultiplierSpec::i_multiplier(n, s)?;
    let grid = u.grid();
    let m: Vec<T> = (0..grid.len()).map(|i| i_symbol(grid.radial_frequency(i), n, s)).collect();
    let mut iu_hat = u.forward()?.into_coeffs();
    for (c, w) in iu_hat.iter_mut().zip(&m) {
        *c = *c * *w;
    }
    let mut iu = iu_hat.clone();
    inverse_in_place(grid, &mut iu);
    let mut out = cubic_spectrum(grid, u.values());
    for (c, w) in out.iter_mut().zip(&m) {
        *c = *c * *w;
    }
    let second = cubic_spectrum(grid, &iu);
    for (c, b) in out.iter_mut().zip(&second) {
        *c = *c - *b;
    }
    Ok((iu_hat, out))
}

/// `I(|u|^2 u) - |Iu|^2 Iu` with dealiased products.
pub fn commutator<T: Scalar>(u: &Field<T>, n: T, s: T) -> Result<Field<T>> {
    let (_, mut c) = commutator_parts(u, n, s)?;
    inverse_in_place(u.grid(), &mut c);
    Field::new(u.grid(), c)
}

/// `(‖C‖_{L^2}, ‖∇C‖_{L^2})` for the commutator `C` at one time.
pub fn commutator_l2<T: Scalar>(u: &Field<T>, n: T, s: T) -> Result<(T, T)> {
    let (_, c) = commutator_parts(u, n, s)?;
    let grid = u.grid();
    let two_pi = T::PI() + T::PI();
    let (mut a, mut b) = (T::zero(), T::zero());
    for (i, v) in c.iter().enumerate() {
        let w = v.norm_sqr();
        a = a + w;
        let [kx, ky] = grid.wavevector(i);
        let [ix, iy] = grid.axis_indices(i);
        let kx = if grid.is_nyquist(ix) { T::zero() } else { kx };
        let ky = if grid.dims() == 2 && grid.is_nyquist(iy) { T::zero() } else { ky };
        b = b + two_pi * two_pi * (kx * kx + ky * ky) * w;
    }
    let d = grid.dual_measure();
    Ok(((a * d).sqrt(), (b * d).sqrt()))
}

/// `(c0, c1) = (‖C‖_{L^1_t L^2_x}, ‖∇C‖_{L^1_t L^2_x})`.
pub fn commutator_norms<T: Scalar>(traj: &Trajectory<T>, n: T, s: T) -> Result<(T, T)> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut c0 = Vec::with_capacity(traj.len());
    let mut c1 = Vec::with_capacity(traj.len());
    for u in traj.fields() {
        let (a, b) = commutator_l2(u, n, s)?;
        c0.push(a);
        c1.push(b);
    }
    let h = traj.spacing();
    Ok((trapezoid(&c0, h), trapezoid(&c1, h)))
}

/// `∫∫ ∇a · {N_bad, Iu(x1) Iu(x2)}_p dx1 dx2` at one time.
pub fn error_density<T: Scalar>(
    kernel: &InteractionKernel<T>,
    u: &Field<T>,
    n: T,
    s: T,
) -> Result<T> {
    let grid = kernel.grid();
    if u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let (iu_hat, c_hat) = commutator_parts(u, n, s)?;
    let gv = grad_from_spectrum(grid, &iu_hat);
    let gc = grad_from_spectrum(grid, &c_hat);
    let mut v = iu_hat;
    inverse_in_place(grid, &mut v);
    let mut c = c_hat;
    inverse_in_place(grid, &mut c);
    let b = bracket_raw(grid, &c, &gc, &v, &gv);
    let rho: Vec<T> = v.iter().map(|z| z.norm_sqr()).collect();
    let q: Vec<T> = c.iter().zip(&v).map(|(a, b)| (*a * b.conj()).im).collect();
    let p = current(&v, &gv);
    let k_rho = kernel.convolve(&rho);
    let k_q = kernel.convolve(&q);
    let total = T::lit(2.0) * dot_sum(&b.components, &k_rho) + T::lit(4.0) * dot_sum(&p, &k_q);
    Ok(total * grid.cell_measure())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorTermReport<T> {
    /// Time integral of the error density.
    pub value: T,
    pub c0: T,
    pub c1: T,
    pub z: T,
    /// `(c0 + c1) z^3`.
    pub bound: T,
}

/// Error term over the whole trajectory together with its bound surrogate.
pub fn error_term<T: Scalar>(
    traj: &Trajectory<T>,
    n: T,
    s: T,
    weight: &WeightSpec<T>,
) -> Result<ErrorTermReport<T>> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let kernel = InteractionKernel::new(traj.fields()[0].grid(), weight)?;
    let dens = traj
        .fields()
        .iter()
        .map(|u| error_density(&kernel, u, n, s))
        .collect::<Result<Vec<T>>>()?;
    let (c0, c1) = commutator_norms(traj, n, s)?;
    let z = crate::spectral::z_norm(traj, n, s, &AdmissiblePair::default_set())?;
    Ok(ErrorTermReport {
        value: trapezoid(&dens, traj.spacing()),
        c0,
        c1,
        z,
        bound: (c0 + c1) * z * z * z,
    })
}

/// `‖I u‖^4_{L^4_t L^4_x}` over a trajectory.
pub fn l4_spacetime<T: Scalar>(traj: &Trajectory<T>, n: T, s: T) -> Result<T> {
    let vals = traj
        .fields()
        .iter()
        .map(|u| Ok(power_integral(&crate::spectral::i_operator(u, n, s)?, T::lit(4.0))))
        .collect::<Result<Vec<T>>>()?;
    Ok(trapezoid(&vals, traj.spacing()))
}

/// `sup_t ‖<D> I u‖_{L^2}`, a convenience used by bound surrogates.
pub fn sup_bracket_i_l2<T: Scalar>(traj: &Trajectory<T>, n: T, s: T) -> Result<T> {
    let vals = traj
        .fields()
        .iter()
        .map(|u| Ok(bracket_i(u, n, s)?.norm_sq().sqrt()))
        .collect::<Result<Vec<T>>>()?;
    time_norm(&vals, traj.spacing(), Exponent::Infinite)
}

/// One row of the diagnostics stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub e_iu: f64,
    pub px: f64,
    pub py: f64,
    pub ma: f64,
    pub ma2: f64,
    pub l4acc: f64,
    pub c0: f64,
    pub c1: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 11] =
        ["t", "mass", "energy", "e_iu", "px", "py", "ma", "ma2", "l4acc", "c0", "c1"];
}
