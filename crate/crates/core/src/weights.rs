//! Convex Morawetz weights and their calculus.

use crate::{Error, Result, Scalar};

/// Slope of the outer linear branch.
pub const OUTER_SLOPE: f64 = 100.0;

/// Spatial weight `a(x)` for single-field Morawetz and virial quantities.
pub trait Weight<T: Scalar>: Sync {
    fn gradient(&self, x: [T; 2]) -> [T; 2];
    fn hessian(&self, x: [T; 2]) -> [[T; 2]; 2];

    fn laplacian(&self, x: [T; 2]) -> T {
        let h = self.hessian(x);
        h[0][0] + h[1][1]
    }

    /// Pointwise `ΔΔa`, or `None` if the bilaplacian has a point mass.
    fn bilaplacian(&self, x: [T; 2]) -> Option<T>;
}

/// `a(x) = c.x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearWeight<T> {
    pub direction: [T; 2],
}

impl<T: Scalar> Weight<T> for LinearWeight<T> {
    fn gradient(&self, _x: [T; 2]) -> [T; 2] {
        self.direction
    }

    fn hessian(&self, _x: [T; 2]) -> [[T; 2]; 2] {
        [[T::zero(); 2]; 2]
    }

    fn bilaplacian(&self, _x: [T; 2]) -> Option<T> {
        Some(T::zero())
    }
}

/// Smooth convex weight `a(x) = sqrt(l^2 + |x|^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketWeight<T> {
    pub length: T,
}

impl<T: Scalar> Weight<T> for BracketWeight<T> {
    fn gradient(&self, x: [T; 2]) -> [T; 2] {
        let a = (self.length * self.length + x[0] * x[0] + x[1] * x[1]).sqrt();
        [x[0] / a, x[1] / a]
    }

    fn hessian(&self, x: [T; 2]) -> [[T; 2]; 2] {
        let q = self.length * self.length + x[0] * x[0] + x[1] * x[1];
        let a = q.sqrt();
        let a3 = a * q;
        [
            [a.recip() - x[0] * x[0] / a3, -x[0] * x[1] / a3],
            [-x[0] * x[1] / a3, a.recip() - x[1] * x[1] / a3],
        ]
    }

    fn bilaplacian(&self, x: [T; 2]) -> Option<T> {
        let l2 = self.length * self.length;
        let q = l2 + x[0] * x[0] + x[1] * x[1];
        let qs = q.sqrt();
        let q32 = q * qs;
        let q52 = q32 * q;
        let q72 = q52 * q;
        Some(T::lit(6.0) * l2 / q52 - T::lit(15.0) * l2 * l2 / q72 + q32.recip())
    }
}

/// Radial convex weight `f(r)`: logarithmic inner branch, quintic Hermite
/// bridge, linear outer branch of slope 100.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec<T> {
    m: T,
    r_inner: T,
    r_outer: T,
    /// Bridge polynomial in `t = (r - r_inner) / (r_outer - r_inner)`, ascending powers.
    bridge: [T; 6],
    outer_offset: T,
    delta_coeff: T,
    nudge: T,
}

/// Values of the radial profile at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightCalculus<T> {
    pub f: T,
    pub fp: T,
    /// `Δa = f'' + f'/r`; `None` at `r = 0`, where it diverges logarithmically.
    pub laplacian: Option<T>,
    /// `∇a = direction_factor * x / |x|`.
    pub direction_factor: T,
}

/// Decomposition `-ΔΔa = delta_coeff δ + Σ ring_i δ(r - r_i) + regular(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiharmonicSplit<T> {
    pub delta_coeff: T,
    /// `(radius, coefficient)` of the single layers at the junctions.
    pub rings: [(T, T); 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    Inner,
    Bridge,
    Outer,
}

const NUDGES: [f64; 5] = [0.0, 0.025, 0.05, 0.075, 0.1];
const CONVEXITY_SAMPLES: usize = 10_000;

impl<T: Scalar> WeightSpec<T> {
    /// Builds the weight for scale `m`, shrinking the bridge interval inward by up to
    /// 10% if a sampled convexity check fails.
    pub fn build(m: T) -> Result<Self> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::WeightConstruction(format!("M = {m} must be positive")));
        }
        let mut last = String::new();
        for nudge in NUDGES {
            let spec = Self::with_nudge(m, T::lit(nudge));
            match spec.certify() {
                Ok(()) => return Ok(spec),
                Err(e) => last = e,
            }
        }
        Err(Error::WeightConstruction(format!(
            "bridge is not convex after nudging: {last}"
        )))
    }

    fn with_nudge(m: T, nudge: T) -> Self {
        let r1 = m / T::E().sqrt();
        let r2 = m - nudge * (m - r1);
        let h = r2 - r1;
        let slope = T::lit(OUTER_SLOPE);
        let (y0, s0) = (inner_f(m, r1), inner_fp(m, r1));
        // f''(r1) = 0 on the inner branch and f'' = 0 on the outer branch.
        let c0 = y0;
        let c1 = s0 * h;
        let c2 = T::zero();
        let rise = h * (s0 + slope) / T::lit(2.0);
        let y1 = y0 + rise;
        let d = y1 - c0 - c1 - c2;
        let b = slope * h - c1 - T::lit(2.0) * c2;
        let cc = -T::lit(2.0) * c2;
        let c5 = (cc + T::lit(12.0) * d - T::lit(6.0) * b) / T::lit(2.0);
        let c4 = T::lit(7.0) * b - T::lit(15.0) * d - cc;
        let c3 = d - c4 - c5;
        Self {
            m,
            r_inner: r1,
            r_outer: r2,
            bridge: [c0, c1, c2, c3, c4, c5],
            outer_offset: slope * r2 - y1,
            delta_coeff: T::lit(4.0) * T::PI() / m,
            nudge,
        }
    }

    fn certify(&self) -> std::result::Result<(), String> {
        let samples = log_samples(self.r_inner / T::lit(100.0), self.m * T::lit(10.0), CONVEXITY_SAMPLES);
        let scale = self.bridge_fpp_max().max(T::one());
        for r in samples {
            let [_, fp, fpp, _, _] = self.derivatives(r);
            if fp < T::zero() {
                return Err(format!("f' < 0 at r = {r}"));
            }
            if fpp < -T::lit(1e-10) * scale {
                return Err(format!("f'' = {fpp} at r = {r}"));
            }
            if fp > T::lit(OUTER_SLOPE) * (T::one() + T::lit(1e-12)) {
                return Err(format!("slope {fp} exceeds the outer slope at r = {r}"));
            }
        }
        Ok(())
    }

    fn bridge_fpp_max(&self) -> T {
        let h = self.r_outer - self.r_inner;
        let p = self.bridge;
        // Second derivative of the quintic is a cubic; sample it.
        (0..=64)
            .map(|k| {
                let t = T::from_usize_lossy(k) / T::lit(64.0);
                (T::lit(2.0) * p[2]
                    + T::lit(6.0) * p[3] * t
                    + T::lit(12.0) * p[4] * t * t
                    + T::lit(20.0) * p[5] * t * t * t)
                    / (h * h)
            })
            .fold(T::zero(), T::max)
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn r_inner(&self) -> T {
        self.r_inner
    }

    pub fn r_outer(&self) -> T {
        self.r_outer
    }

    pub fn bridge(&self) -> &[T; 6] {
        &self.bridge
    }

    /// `c` in the outer branch `f(r) = 100 r - c`.
    pub fn outer_offset(&self) -> T {
        self.outer_offset
    }

    pub fn delta_coeff(&self) -> T {
        self.delta_coeff
    }

    /// Fraction of the bridge width removed at the outer junction.
    pub fn nudge(&self) -> T {
        self.nudge
    }

    fn region(&self, r: T) -> Region {
        if r < self.r_inner {
            Region::Inner
        } else if r <= self.r_outer {
            Region::Bridge
        } else {
            Region::Outer
        }
    }

    /// `[f, f', f'', f''', f'''']` at `r > 0`.
    pub fn derivatives(&self, r: T) -> [T; 5] {
        match self.region(r) {
            Region::Inner => self.inner_derivatives(r),
            Region::Bridge => self.bridge_derivatives(r),
            Region::Outer => self.outer_derivatives(r),
        }
    }

    /// Derivatives from the closed-form inner branch, valid for any `r > 0`.
    pub fn inner_derivatives(&self, r: T) -> [T; 5] {
        let m = self.m;
        let two = T::lit(2.0);
        let lg = (r / m).ln();
        [
            inner_f(m, r),
            inner_fp(m, r),
            -(T::one() + two * lg) / (two * m),
            -(m * r).recip(),
            (m * r * r).recip(),
        ]
    }

    pub fn bridge_derivatives(&self, r: T) -> [T; 5] {
        let h = self.r_outer - self.r_inner;
        let t = (r - self.r_inner) / h;
        let p = self.bridge;
        let l = T::lit;
        let f = p[0] + t * (p[1] + t * (p[2] + t * (p[3] + t * (p[4] + t * p[5]))));
        let d1 = p[1] + t * (l(2.0) * p[2] + t * (l(3.0) * p[3] + t * (l(4.0) * p[4] + t * l(5.0) * p[5])));
        let d2 = l(2.0) * p[2] + t * (l(6.0) * p[3] + t * (l(12.0) * p[4] + t * l(20.0) * p[5]));
        let d3 = l(6.0) * p[3] + t * (l(24.0) * p[4] + t * l(60.0) * p[5]);
        let d4 = l(24.0) * p[4] + t * l(120.0) * p[5];
        [f, d1 / h, d2 / (h * h), d3 / (h * h * h), d4 / (h * h * h * h)]
    }

    pub fn outer_derivatives(&self, r: T) -> [T; 5] {
        let slope = T::lit(OUTER_SLOPE);
        [slope * r - self.outer_offset, slope, T::zero(), T::zero(), T::zero()]
    }

    pub fn f(&self, r: T) -> T {
        if r == T::zero() {
            return T::zero();
        }
        self.derivatives(r)[0]
    }

    pub fn fp(&self, r: T) -> T {
        if r == T::zero() {
            return T::zero();
        }
        self.derivatives(r)[1]
    }

    pub fn calculus(&self, r: T) -> Result<WeightCalculus<T>> {
        if r.is_nan() || r < T::zero() {
            return Err(Error::InvalidParameter(format!("radius {r} must be nonnegative")));
        }
        if r == T::zero() {
            return Ok(WeightCalculus {
                f: T::zero(),
                fp: T::zero(),
                laplacian: None,
                direction_factor: T::zero(),
            });
        }
        let lap = match self.region(r) {
            Region::Inner => T::lit(2.0) / self.m * (self.m / r).ln(),
            Region::Bridge => {
                let d = self.bridge_derivatives(r);
                d[2] + d[1] / r
            }
            Region::Outer => T::lit(OUTER_SLOPE) / r,
        };
        let d = self.derivatives(r);
        Ok(WeightCalculus { f: d[0], fp: d[1], laplacian: Some(lap), direction_factor: d[1] })
    }

    /// `g = Δa` and `g'` at `r > 0`.
    fn lap_and_slope(d: [T; 5], r: T) -> (T, T) {
        let g = d[2] + d[1] / r;
        let gp = d[3] + d[2] / r - d[1] / (r * r);
        (g, gp)
    }

    /// Regular part of `-ΔΔa` at `r > 0`.
    pub fn regular_density(&self, r: T) -> T {
        match self.region(r) {
            Region::Inner => T::zero(),
            Region::Bridge => {
                let d = self.bridge_derivatives(r);
                let r2 = r * r;
                let gp = d[3] + d[2] / r - d[1] / r2;
                let gpp = d[4] + d[3] / r - T::lit(2.0) * d[2] / r2 + T::lit(2.0) * d[1] / (r2 * r);
                -(gpp + gp / r)
            }
            Region::Outer => -T::lit(OUTER_SLOPE) / (r * r * r),
        }
    }

    pub fn biharmonic_split(&self) -> BiharmonicSplit<T> {
        let ring = |r: T, below: [T; 5], above: [T; 5]| {
            let (_, g_below) = Self::lap_and_slope(below, r);
            let (_, g_above) = Self::lap_and_slope(above, r);
            (r, -(g_above - g_below))
        };
        BiharmonicSplit {
            delta_coeff: self.delta_coeff,
            rings: [
                ring(self.r_inner, self.inner_derivatives(self.r_inner), self.bridge_derivatives(self.r_inner)),
                ring(self.r_outer, self.bridge_derivatives(self.r_outer), self.outer_derivatives(self.r_outer)),
            ],
        }
    }

    /// Largest value/first/second derivative mismatch across the two junctions.
    pub fn junction_mismatch(&self) -> T {
        let a = self.inner_derivatives(self.r_inner);
        let b = self.bridge_derivatives(self.r_inner);
        let c = self.bridge_derivatives(self.r_outer);
        let d = self.outer_derivatives(self.r_outer);
        (0..3)
            .map(|k| (a[k] - b[k]).abs().max((c[k] - d[k]).abs()))
            .fold(T::zero(), T::max)
    }

    /// Human readable description of the bridge for run manifests.
    pub fn describe(&self) -> String {
        format!(
            "quintic Hermite bridge on [{}, {}], coefficients {:?}, outer branch 100 r - {}, nudge {}",
            self.r_inner, self.r_outer, self.bridge, self.outer_offset, self.nudge
        )
    }
}

impl<T: Scalar> Weight<T> for WeightSpec<T> {
    fn gradient(&self, x: [T; 2]) -> [T; 2] {
        let r = x[0].hypot(x[1]);
        if r == T::zero() {
            return [T::zero(); 2];
        }
        let k = self.derivatives(r)[1] / r;
        [k * x[0], k * x[1]]
    }

    fn hessian(&self, x: [T; 2]) -> [[T; 2]; 2] {
        let r = x[0].hypot(x[1]);
        if r == T::zero() {
            let c = self.derivatives(T::min_positive_value())[2];
            return [[c, T::zero()], [T::zero(), c]];
        }
        let d = self.derivatives(r);
        let (u0, u1) = (x[0] / r, x[1] / r);
        let radial = d[2];
        let tangential = d[1] / r;
        [
            [radial * u0 * u0 + tangential * u1 * u1, (radial - tangential) * u0 * u1],
            [(radial - tangential) * u0 * u1, radial * u1 * u1 + tangential * u0 * u0],
        ]
    }

    fn laplacian(&self, x: [T; 2]) -> T {
        let r = x[0].hypot(x[1]);
        match self.calculus(r).ok().and_then(|c| c.laplacian) {
            Some(l) => l,
            None => T::infinity(),
        }
    }

    fn bilaplacian(&self, _x: [T; 2]) -> Option<T> {
        None
    }
}

fn inner_f<T: Scalar>(m: T, r: T) -> T {
    r * r * (T::one() - (r / m).ln()) / (T::lit(2.0) * m)
}

fn inner_fp<T: Scalar>(m: T, r: T) -> T {
    r / (T::lit(2.0) * m) * (T::one() - T::lit(2.0) * (r / m).ln())
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_samples<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    let steps = T::from_usize_lossy(count.max(2) - 1);
    (0..count)
        .map(|k| (a + (b - a) * T::from_usize_lossy(k) / steps).exp())
        .collect()
}

/// `M = T^{1/3}`.
pub fn balance_m<T: Scalar>(t: T) -> Result<T> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("horizon T = {t} must be positive")));
    }
    Ok(t.cbrt())
}
