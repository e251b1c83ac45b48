//! Strang split-step integration of `i u_t + Δu = |u|^2 u` and the scaling map.

use num_complex::Complex;

use crate::functionals::modified_energy;
use crate::spectral::check_finite;
use crate::{Error, Field, Grid, Result, Scalar, Trajectory};

/// Mass fraction allowed in the modes removed by the 2/3 rule.
pub const BLOCKING_THRESHOLD: f64 = 1e-10;
/// Mass fraction allowed within `L/8` of the boundary.
pub const BOUNDARY_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SolverConfig<T: Scalar> {
    pub dt: T,
    pub t_end: T,
    pub grid: Grid<T>,
    pub dealias: bool,
    pub snapshot_stride: usize,
    /// Abort when mass reaches the outer eighth of the box.
    pub boundary_guard: bool,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(grid: &Grid<T>, dt: T, t_end: T) -> Self {
        Self {
            dt,
            t_end,
            grid: grid.clone(),
            dealias: true,
            snapshot_stride: 1,
            boundary_guard: false,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_boundary_guard(mut self, on: bool) -> Self {
        self.boundary_guard = on;
        self
    }

    /// Total number of steps; `t_end` must be a multiple of `dt * stride`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} must be at least dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter("snapshot stride must be at least 1".into()));
        }
        let chunk = self.dt * T::from_usize_lossy(self.snapshot_stride);
        let ratio = self.t_end / chunk;
        let k = ratio.round();
        if k < T::one() || (ratio - k).abs() > T::lit(1e-6) * ratio {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} is not a multiple of dt * stride = {chunk}",
                self.t_end
            )));
        }
        Ok(k.to_usize().unwrap() * self.snapshot_stride)
    }
}

/// Reusable integrator state for one grid and step size.
pub struct Stepper<T: Scalar> {
    grid: Grid<T>,
    dt: T,
    linear: Vec<Complex<T>>,
    truncated: Vec<bool>,
    guard: bool,
    steps_taken: usize,
    last_fraction: T,
}

impl<T: Scalar> Stepper<T> {
    /// Any finite `dt` is accepted, including negative values for backward runs.
    pub fn new(grid: &Grid<T>, dt: T, dealias: bool) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidParameter("dt must be finite".into()));
        }
        let two_pi = T::PI() + T::PI();
        let truncated: Vec<bool> = (0..grid.len()).map(|i| grid.is_truncated(i)).collect();
        let linear = (0..grid.len())
            .map(|i| {
                if dealias && truncated[i] {
                    return Complex::new(T::zero(), T::zero());
                }
                let k = two_pi * grid.radial_frequency(i);
                Complex::from_polar(T::one(), -k * k * dt)
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            dt,
            linear,
            truncated,
            guard: false,
            steps_taken: 0,
            last_fraction: T::zero(),
        })
    }

    /// Enables the per-step spectral blocking check.
    pub fn with_guard(mut self, on: bool) -> Self {
        self.guard = on;
        self
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Mass fraction in the truncated modes seen at the last linear substep.
    pub fn last_fraction(&self) -> T {
        self.last_fraction
    }

    fn nonlinear(&self, values: &mut [Complex<T>], tau: T) -> Result<()> {
        for v in values.iter_mut() {
            let phase = -v.norm_sqr() * tau;
            if !phase.is_finite() {
                return Err(Error::PhaseOverflow { step: self.steps_taken });
            }
            *v = *v * Complex::from_polar(T::one(), phase);
        }
        Ok(())
    }

    fn linear(&mut self, values: &mut [Complex<T>], t: T) -> Result<()> {
        self.grid.fft_forward(values);
        if self.guard {
            let (mut top, mut all) = (T::zero(), T::zero());
            for (v, &cut) in values.iter().zip(&self.truncated) {
                let w = v.norm_sqr();
                all = all + w;
                if cut {
                    top = top + w;
                }
            }
            let frac = if all > T::zero() { top / all } else { T::zero() };
            self.last_fraction = frac;
            if frac > T::lit(BLOCKING_THRESHOLD) {
                return Err(Error::SpectralBlocking { time: t.as_f64(), fraction: frac.as_f64() });
            }
        }
        for (v, p) in values.iter_mut().zip(&self.linear) {
            *v = *v * *p;
        }
        self.grid.fft_inverse(values);
        Ok(())
    }

    /// One Strang step.
    pub fn step(&mut self, values: &mut [Complex<T>]) -> Result<()> {
        self.advance(values, 1, T::zero())
    }

    /// `count` Strang steps with adjacent nonlinear half steps fused; `t0` is only
    /// used for diagnostics.
    pub fn advance(&mut self, values: &mut [Complex<T>], count: usize, t0: T) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let half = self.dt * T::lit(0.5);
        self.nonlinear(values, half)?;
        for k in 0..count {
            let t = t0 + self.dt * T::from_usize_lossy(k);
            self.linear(values, t)?;
            self.steps_taken += 1;
            let tau = if k + 1 == count { half } else { self.dt };
            self.nonlinear(values, tau)?;
        }
        Ok(())
    }
}

/// One Strang step without dealiasing or guards.
pub fn strang_step<T: Scalar>(field: &Field<T>, dt: T) -> Result<Field<T>> {
    let mut stepper = Stepper::new(field.grid(), dt, false)?;
    let mut values = field.values().to_vec();
    stepper.step(&mut values)?;
    check_finite(&values, "strang step output")?;
    Field::new(field.grid(), values)
}

/// Fraction of the mass carried by modes removed by the 2/3 rule.
pub fn top_mode_fraction<T: Scalar>(field: &Field<T>) -> Result<T> {
    let spec = field.forward()?;
    let grid = field.grid();
    let (mut top, mut all) = (T::zero(), T::zero());
    for (i, c) in spec.coeffs().iter().enumerate() {
        let w = c.norm_sqr();
        all = all + w;
        if grid.is_truncated(i) {
            top = top + w;
        }
    }
    Ok(if all > T::zero() { top / all } else { T::zero() })
}

/// Fraction of the mass within `L/8` of the boundary of the box.
pub fn boundary_fraction<T: Scalar>(field: &Field<T>) -> T {
    let grid = field.grid();
    let limit = T::lit(0.375) * grid.box_length();
    let (mut edge, mut all) = (T::zero(), T::zero());
    for (i, v) in field.values().iter().enumerate() {
        let w = v.norm_sqr();
        all = all + w;
        let [x, y] = grid.position(i);
        if x.abs() > limit || y.abs() > limit {
            edge = edge + w;
        }
    }
    if all > T::zero() {
        edge / all
    } else {
        T::zero()
    }
}

/// Runs the solver and hands every snapshot (including `t = 0`) to `observe`.
pub fn evolve_with<T: Scalar>(
    config: &SolverConfig<T>,
    u0: &Field<T>,
    mut observe: impl FnMut(T, &Field<T>) -> Result<()>,
) -> Result<()> {
    let steps = config.steps()?;
    if u0.grid() != &config.grid {
        return Err(Error::GridMismatch);
    }
    check_finite(u0.values(), "initial data")?;
    let frac = top_mode_fraction(u0)?;
    if frac > T::lit(BLOCKING_THRESHOLD) {
        return Err(Error::SpectralBlocking { time: 0.0, fraction: frac.as_f64() });
    }
    let check_boundary = |t: T, f: &Field<T>| -> Result<()> {
        if config.boundary_guard {
            let b = boundary_fraction(f);
            if b > T::lit(BOUNDARY_THRESHOLD) {
                return Err(Error::BoundaryLeak { time: t.as_f64(), fraction: b.as_f64() });
            }
        }
        Ok(())
    };
    check_boundary(T::zero(), u0)?;
    observe(T::zero(), u0)?;
    let mut stepper = Stepper::new(&config.grid, config.dt, config.dealias)?.with_guard(true);
    let mut values = u0.values().to_vec();
    let stride = config.snapshot_stride;
    for chunk in 0..steps / stride {
        let t0 = config.dt * T::from_usize_lossy(chunk * stride);
        stepper.advance(&mut values, stride, t0)?;
        let t = config.dt * T::from_usize_lossy((chunk + 1) * stride);
        let field = Field::new(&config.grid, values.clone())?;
        check_boundary(t, &field)?;
        observe(t, &field)?;
    }
    Ok(())
}

/// Runs the solver and keeps every snapshot.
pub fn evolve<T: Scalar>(config: &SolverConfig<T>, u0: &Field<T>) -> Result<Trajectory<T>> {
    let mut times = Vec::new();
    let mut fields = Vec::new();
    evolve_with(config, u0, |t, f| {
        times.push(t);
        fields.push(f.clone());
        Ok(())
    })?;
    Trajectory::new(times, fields, config.dt, config.snapshot_stride)
}

/// `u^λ(x) = u(x/λ) / λ`, sampled on the same index grid with box `λ L`.
pub fn rescale<T: Scalar>(u: &Field<T>, lambda: T) -> Result<Field<T>> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    let grid = u.grid().with_box_length(u.grid().box_length() * lambda)?;
    let inv = lambda.recip();
    Field::new(&grid, u.values().iter().map(|v| *v * inv).collect())
}

/// Parameters of the scaling and globalisation argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingParams<T> {
    pub n: T,
    pub s: T,
    pub lambda: T,
    pub k: T,
    pub mu0: T,
    pub t0: T,
}

impl<T: Scalar> ScalingParams<T> {
    /// Defaults `K = 1`, `μ0 = 0.1`, with `λ = lambda_for(N, s)`.
    pub fn new(n: T, s: T, t0: T) -> Result<Self> {
        let p = Self { n, s, lambda: lambda_for(n, s)?, k: T::one(), mu0: T::lit(0.1), t0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let dyadic = crate::spectral::multiplier::dyadic_exponent(self.n);
        if self.n < T::one() || dyadic.is_err() {
            return Err(Error::InvalidParameter(format!("N = {} must be dyadic and >= 1", self.n)));
        }
        if !(self.s > T::zero() && self.s < T::one()) {
            return Err(Error::InvalidParameter(format!("s = {} must lie in (0, 1)", self.s)));
        }
        if !(self.lambda > T::zero() && self.mu0 > T::zero() && self.k > T::zero() && self.t0 > T::zero()) {
            return Err(Error::InvalidParameter("lambda, K, mu0 and T0 must be positive".into()));
        }
        Ok(())
    }
}

/// `λ = N^{(1-s)/s}`.
pub fn lambda_for<T: Scalar>(n: T, s: T) -> Result<T> {
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, 1)")));
    }
    if !(n > T::zero()) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("N = {n} must be positive")));
    }
    Ok(n.powf(s.recip() - T::one()))
}

/// Searches `λ` around `lambda_for(N, s)` until `E(I u0^λ) ∈ [1/2, 1]`.
pub fn calibrate_lambda<T: Scalar>(u0: &Field<T>, n: T, s: T) -> Result<T> {
    const MAX_EVALS: usize = 64;
    let lo_target = T::lit(0.5);
    let hi_target = T::one();
    let mut evals = 0;
    let mut energy_at = |lambda: T| -> Result<T> {
        evals += 1;
        if evals > MAX_EVALS {
            return Err(Error::NotCalibratable(format!(
                "no lambda with E(I u^lambda) in [1/2, 1] after {MAX_EVALS} evaluations"
            )));
        }
        modified_energy(&rescale(u0, lambda)?, n, s)
    };
    let inside = |e: T| e >= lo_target && e <= hi_target;
    let start = lambda_for(n, s)?;
    let e = energy_at(start)?;
    if inside(e) {
        return Ok(start);
    }
    let factor = T::lit(4.0);
    // Energy falls as lambda grows; bracket with `big` (E > 1) and `small` (E < 1/2).
    let (mut low_lambda, mut high_lambda) = if e > hi_target {
        let mut a = start;
        loop {
            let b = a * factor;
            let eb = energy_at(b)?;
            if inside(eb) {
                return Ok(b);
            }
            if eb < lo_target {
                break (a, b);
            }
            a = b;
        }
    } else {
        let mut b = start;
        loop {
            let a = b / factor;
            let ea = energy_at(a)?;
            if inside(ea) {
                return Ok(a);
            }
            if ea > hi_target {
                break (a, b);
            }
            b = a;
        }
    };
    loop {
        let mid = (low_lambda * high_lambda).sqrt();
        let em = energy_at(mid)?;
        if inside(em) {
            return Ok(mid);
        }
        if em > hi_target {
            low_lambda = mid;
        } else {
            high_lambda = mid;
        }
    }
}
