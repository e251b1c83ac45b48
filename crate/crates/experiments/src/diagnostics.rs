//! Per-snapshot diagnostics stream and its CSV form.

use std::path::Path;

use anyhow::Result;
use nlslab_core::functionals::{
    commutator_l2, energy, interaction_action_with, mass, modified_energy, momentum, morawetz_action,
    power_integral, DiagnosticsRecord, InteractionKernel,
};
use nlslab_core::spectral::i_operator;
use nlslab_core::{Field, WeightSpec64};

use crate::report::format_float;

/// Accumulates diagnostics snapshot by snapshot; time integrals use the
/// trapezoid rule between consecutive pushes.
pub struct DiagnosticsStream {
    n: f64,
    s: f64,
    weight: WeightSpec64,
    kernel: Option<InteractionKernel<f64>>,
    last: Option<(f64, [f64; 3])>,
    acc: [f64; 3],
    records: Vec<DiagnosticsRecord>,
}

impl DiagnosticsStream {
    /// `ma2` is reported as NaN when the weight scale is below two grid spacings.
    pub fn new(u0: &Field<f64>, n: f64, s: f64, weight_m: f64) -> Result<Self> {
        let weight = WeightSpec64::build(weight_m)?;
        let kernel = if u0.grid().dims() == 2 { InteractionKernel::new(u0.grid(), &weight).ok() } else { None };
        Ok(Self { n, s, weight, kernel, last: None, acc: [0.0; 3], records: Vec::new() })
    }

    pub fn push(&mut self, t: f64, u: &Field<f64>) -> nlslab_core::Result<()> {
        let two_d = u.grid().dims() == 2;
        let iu = i_operator(u, self.n, self.s)?;
        let (c0, c1) = commutator_l2(u, self.n, self.s)?;
        let now = [power_integral(&iu, 4.0), c0, c1];
        if let Some((t_prev, prev)) = self.last {
            let h = t - t_prev;
            for k in 0..3 {
                self.acc[k] += 0.5 * h * (prev[k] + now[k]);
            }
        }
        self.last = Some((t, now));
        let p = momentum(u);
        let ma = if two_d { morawetz_action(u, &self.weight)? } else { f64::NAN };
        let ma2 = match &self.kernel {
            Some(k) => interaction_action_with(k, u, u)?,
            None => f64::NAN,
        };
        self.records.push(DiagnosticsRecord {
            t,
            mass: mass(u),
            energy: energy(u)?,
            e_iu: modified_energy(u, self.n, self.s)?,
            px: p[0],
            py: p[1],
            ma,
            ma2,
            l4acc: self.acc[0],
            c0: self.acc[1],
            c1: self.acc[2],
        });
        Ok(())
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DiagnosticsRecord::COLUMNS)?;
    for r in records {
        let vals = [r.t, r.mass, r.energy, r.e_iu, r.px, r.py, r.ma, r.ma2, r.l4acc, r.c0, r.c1];
        w.write_record(vals.iter().map(|v| format_float(*v)))?;
    }
    w.flush()?;
    Ok(())
}
