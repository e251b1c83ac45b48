use crate::{Error, Field, Result, Scalar};

/// Time-ordered, uniformly spaced snapshots on one grid.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Scalar> {
    times: Vec<T>,
    fields: Vec<Field<T>>,
    dt: T,
    stride: usize,
}

impl<T: Scalar> Trajectory<T> {
    /// Builds a trajectory, checking uniform spacing and a common grid.
    /// `dt` is the solver step and `stride` the number of steps between snapshots.
    pub fn new(times: Vec<T>, fields: Vec<Field<T>>, dt: T, stride: usize) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if times.len() != fields.len() {
            return Err(Error::NonUniformTrajectory(format!(
                "{} times for {} fields",
                times.len(),
                fields.len()
            )));
        }
        if stride == 0 {
            return Err(Error::NonUniformTrajectory("stride must be at least 1".into()));
        }
        if fields.iter().any(|f| f.grid() != fields[0].grid()) {
            return Err(Error::GridMismatch);
        }
        if times.len() > 1 {
            let h = times[1] - times[0];
            if !(h > T::zero()) {
                return Err(Error::NonUniformTrajectory("times must increase".into()));
            }
            let tol = T::lit(1e-9) * h;
            for (k, w) in times.windows(2).enumerate() {
                if ((w[1] - w[0]) - h).abs() > tol {
                    return Err(Error::NonUniformTrajectory(format!(
                        "spacing at snapshot {k} differs from {h}"
                    )));
                }
            }
        }
        Ok(Self { times, fields, dt, stride })
    }

    /// Trajectory whose snapshots are one solver step apart.
    pub fn from_snapshots(t0: T, spacing: T, fields: Vec<Field<T>>) -> Result<Self> {
        let times = (0..fields.len())
            .map(|k| t0 + spacing * T::from_usize_lossy(k))
            .collect();
        Self::new(times, fields, spacing, 1)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn fields(&self) -> &[Field<T>] {
        &self.fields
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Time between consecutive snapshots (0 for a single snapshot).
    pub fn spacing(&self) -> T {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            T::zero()
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// First `count` snapshots.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        let count = count.min(self.len());
        Self::new(
            self.times[..count].to_vec(),
            self.fields[..count].to_vec(),
            self.dt,
            self.stride,
        )
    }
}

/// Composite trapezoid rule for uniformly spaced samples.
pub fn trapezoid<T: Scalar>(values: &[T], h: T) -> T {
    match values.len() {
        0 | 1 => T::zero(),
        n => {
            let half = T::lit(0.5);
            let inner: T = values[1..n - 1].iter().copied().sum();
            h * (inner + half * (values[0] + values[n - 1]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Grid;

    #[test]
    fn trapezoid_is_exact_on_lines() {
        let v: Vec<f64> = (0..11).map(|k| 2.0 * k as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-14);
        assert_eq!(trapezoid(&[3.0], 0.1), 0.0);
    }

    #[test]
    fn rejects_nonuniform_and_empty() {
        let g = Grid::new_2d(8, 1.0).unwrap();
        let f = Field::zeros(&g);
        assert!(matches!(
            Trajectory::<f64>::new(vec![], vec![], 0.1, 1),
            Err(Error::EmptyTrajectory)
        ));
        let bad = Trajectory::new(vec![0.0, 0.1, 0.3], vec![f.clone(), f.clone(), f.clone()], 0.1, 1);
        assert!(matches!(bad, Err(Error::NonUniformTrajectory(_))));
        let other = Field::zeros(&Grid::new_2d(8, 2.0).unwrap());
        assert!(matches!(
            Trajectory::new(vec![0.0, 0.1], vec![f, other], 0.1, 1),
            Err(Error::GridMismatch)
        ));
    }
}
