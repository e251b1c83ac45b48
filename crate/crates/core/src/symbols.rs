//! Trilinear commutator symbol, dyadic region classification and sampled bounds.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::i_symbol;
use crate::{Error, Result, Scalar};

/// Three frequencies with their dyadic shells `N1 >= N2 >= N3`, `|xi_i| ∈ [N_i, 2N_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyTriple<T> {
    pub xi: [[T; 2]; 3],
    pub shells: [T; 3],
}

impl<T: Scalar> FrequencyTriple<T> {
    pub fn new(xi: [[T; 2]; 3], shells: [T; 3]) -> Result<Self> {
        if !(shells[0] >= shells[1] && shells[1] >= shells[2]) {
            return Err(Error::UnsortedShells);
        }
        for (v, n) in xi.iter().zip(shells) {
            let r = v[0].hypot(v[1]);
            if !(r >= n && r < n + n) {
                return Err(Error::DegenerateSample(format!("|xi| = {r} outside shell [{n}, {})", n + n)));
            }
        }
        Ok(Self { xi, shells })
    }

    /// Triple without shell bookkeeping; shells are set to the magnitudes.
    pub fn unchecked(xi: [[T; 2]; 3]) -> Self {
        let mag = |v: [T; 2]| v[0].hypot(v[1]);
        Self { xi, shells: [mag(xi[0]), mag(xi[1]), mag(xi[2])] }
    }

    pub fn magnitudes(&self) -> [T; 3] {
        let mag = |v: [T; 2]| v[0].hypot(v[1]);
        [mag(self.xi[0]), mag(self.xi[1]), mag(self.xi[2])]
    }

    pub fn sum(&self) -> [T; 2] {
        [
            self.xi[0][0] + self.xi[1][0] + self.xi[2][0],
            self.xi[0][1] + self.xi[1][1] + self.xi[2][1],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionTag {
    Omega1,
    Omega2,
    Omega3,
    Omega4,
}

impl RegionTag {
    pub const ALL: [RegionTag; 4] = [Self::Omega1, Self::Omega2, Self::Omega3, Self::Omega4];

    pub fn index(&self) -> usize {
        match self {
            Self::Omega1 => 1,
            Self::Omega2 => 2,
            Self::Omega3 => 3,
            Self::Omega4 => 4,
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "omega{}", self.index())
    }
}

impl std::str::FromStr for RegionTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().trim_start_matches("omega") {
            "1" => Ok(Self::Omega1),
            "2" => Ok(Self::Omega2),
            "3" => Ok(Self::Omega3),
            "4" => Ok(Self::Omega4),
            _ => Err(Error::InvalidParameter(format!("unknown region {s:?}"))),
        }
    }
}

/// `|ξ| (m(ξ) - m(ξ1)m(ξ2)m(ξ3)) / (m(ξ1)m(ξ2)m(ξ3))` with `ξ = ξ1 + ξ2 + ξ3`.
pub fn sigma<T: Scalar>(triple: &FrequencyTriple<T>, n: T, s: T) -> T {
    let [r1, r2, r3] = triple.magnitudes();
    let sum = triple.sum();
    let r = sum[0].hypot(sum[1]);
    let prod = i_symbol(r1, n, s) * i_symbol(r2, n, s) * i_symbol(r3, n, s);
    r * (i_symbol(r, n, s) - prod) / prod
}

/// Region of a sorted dyadic shell triple, with thresholds at `N/4`.
pub fn classify<T: Scalar>(n1: T, n2: T, n3: T, n: T) -> Result<RegionTag> {
    if !(n1 >= n2 && n2 >= n3) {
        return Err(Error::UnsortedShells);
    }
    let q = n / T::lit(4.0);
    Ok(if n1 < q {
        RegionTag::Omega1
    } else if n2 < q {
        RegionTag::Omega2
    } else if n3 < q {
        RegionTag::Omega3
    } else {
        RegionTag::Omega4
    })
}

/// `a_2 = a_3 = N σ / (|ξ1||ξ2|)`, `a_4 = N^2 σ / (|ξ1||ξ2||ξ3|)`.
pub fn normalized_symbol<T: Scalar>(
    triple: &FrequencyTriple<T>,
    n: T,
    s: T,
    region: RegionTag,
) -> Result<T> {
    let [r1, r2, r3] = triple.magnitudes();
    let sig = sigma(triple, n, s);
    match region {
        RegionTag::Omega1 => Err(Error::InvalidParameter(
            "no normalised symbol is defined on omega1".into(),
        )),
        RegionTag::Omega2 | RegionTag::Omega3 => {
            if r1 == T::zero() || r2 == T::zero() {
                return Err(Error::DegenerateSample("zero frequency in a dividing slot".into()));
            }
            Ok(n * sig / (r1 * r2))
        }
        RegionTag::Omega4 => {
            if r1 == T::zero() || r2 == T::zero() || r3 == T::zero() {
                return Err(Error::DegenerateSample("zero frequency in a dividing slot".into()));
            }
            Ok(n * n * sig / (r1 * r2 * r3))
        }
    }
}

/// Shell exponents `k` with shells `N 2^k` used by scans.
pub const SHELL_RANGE: std::ops::RangeInclusive<i32> = -8..=5;

/// Sorted shell triples (descending) of the scan lattice that fall in `region`.
pub fn shell_triples<T: Scalar>(region: RegionTag, n: T) -> Vec<[T; 3]> {
    let two = T::lit(2.0);
    let mut out = Vec::new();
    for k1 in SHELL_RANGE.rev() {
        for k2 in SHELL_RANGE.rev().filter(|&k| k <= k1) {
            for k3 in SHELL_RANGE.rev().filter(|&k| k <= k2) {
                let shells = [n * two.powi(k1), n * two.powi(k2), n * two.powi(k3)];
                if classify(shells[0], shells[1], shells[2], n).ok() == Some(region) {
                    out.push(shells);
                }
            }
        }
    }
    out
}

fn sample_in_shell<T: Scalar>(rng: &mut ChaCha8Rng, shell: T) -> [T; 2] {
    let u: f64 = rng.random();
    let a: f64 = rng.random();
    let r = shell * (T::one() + T::lit(u));
    let r = if r >= shell + shell { shell } else { r };
    let angle = T::lit(a * std::f64::consts::TAU);
    [r * angle.cos(), r * angle.sin()]
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult<T> {
    pub region: RegionTag,
    pub samples: usize,
    pub sup_abs: T,
    pub argmax: Option<FrequencyTriple<T>>,
    pub note: Option<String>,
}

/// Seeded stratified scan of the normalised symbol over the shells of `region`.
pub fn scan_bounds<T: Scalar>(
    region: RegionTag,
    n: T,
    s: T,
    sample_count: usize,
    seed: u64,
) -> Result<ScanResult<T>> {
    if sample_count < 1000 {
        return Err(Error::InvalidParameter(format!(
            "scans need at least 1000 samples, got {sample_count}"
        )));
    }
    if region == RegionTag::Omega1 {
        return Ok(ScanResult {
            region,
            samples: 0,
            sup_abs: T::zero(),
            argmax: None,
            note: Some("omega1 gives no contribution".into()),
        });
    }
    let triples = shell_triples(region, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = T::zero();
    let mut arg = None;
    for k in 0..sample_count {
        let shells = triples[k % triples.len()];
        let xi = [
            sample_in_shell(&mut rng, shells[0]),
            sample_in_shell(&mut rng, shells[1]),
            sample_in_shell(&mut rng, shells[2]),
        ];
        let triple = FrequencyTriple { xi, shells };
        let v = normalized_symbol(&triple, n, s, region)?.abs();
        if v > best {
            best = v;
            arg = Some(triple);
        }
    }
    Ok(ScanResult { region, samples: sample_count, sup_abs: best, argmax: arg, note: None })
}

/// Largest `|∂_{ξ_i} a| * N_i` over `points` seeded samples, by central differences.
pub fn derivative_spot_check<T: Scalar>(
    region: RegionTag,
    n: T,
    s: T,
    points: usize,
    seed: u64,
) -> Result<T> {
    if region == RegionTag::Omega1 {
        return Ok(T::zero());
    }
    let triples = shell_triples(region, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for k in 0..points {
        let shells = triples[k % triples.len()];
        let xi = [
            sample_in_shell(&mut rng, shells[0]),
            sample_in_shell(&mut rng, shells[1]),
            sample_in_shell(&mut rng, shells[2]),
        ];
        for i in 0..3 {
            let h = shells[i] * T::lit(1e-5);
            for c in 0..2 {
                let mut plus = xi;
                let mut minus = xi;
                plus[i][c] = plus[i][c] + h;
                minus[i][c] = minus[i][c] - h;
                let fp = normalized_symbol(&FrequencyTriple::unchecked(plus), n, s, region)?;
                let fm = normalized_symbol(&FrequencyTriple::unchecked(minus), n, s, region)?;
                let d = ((fp - fm) / (h + h)).abs() * shells[i];
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}
