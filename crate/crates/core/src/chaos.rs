//! Fourth-order Wiener chaos functionals of a sampled field.
//!
//! All integrals over the domain use the midpoint rule on grid cells with the
//! integrand evaluated at the analytic cell-center samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::randomwave::FieldGrid;
use crate::specfun::{h2, h4, wavenumber};

/// The six fourth-chaos integrals `a_1 .. a_6`:
///
/// | term | integrand                 |
/// |------|---------------------------|
/// | a1   | `H4(B)`                   |
/// | a2   | `H4(d1)`                  |
/// | a3   | `H4(d2)`                  |
/// | a4   | `H2(d1) H2(d2)`           |
/// | a5   | `H2(B) H2(d1)`            |
/// | a6   | `H2(B) H2(d2)`            |
pub type ChaosTerms = [f64; 6];

/// Per-replication observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosRecord {
    pub replication_index: u64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub nodal_len: f64,
    pub h4: f64,
    pub m_stat: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub l4: f64,
}

impl ChaosRecord {
    /// Compute every chaos functional of `grid` in one pass and attach the
    /// separately measured nodal length.
    pub fn from_grid(grid: &FieldGrid, replication_index: u64, nodal_len: f64) -> Result<Self> {
        let a = chaos4_terms(grid);
        let energy = grid.energy;
        Ok(Self {
            replication_index,
            energy,
            nodal_len,
            h4: a[0],
            m_stat: m_statistic(energy, a[0])?,
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
            a5: a[4],
            a6: a[5],
            l4: chaos4_projection(energy, &a)?,
        })
    }

    pub fn terms(&self) -> ChaosTerms {
        [self.a1, self.a2, self.a3, self.a4, self.a5, self.a6]
    }
}

/// Sample trispectrum `h_4 = int_D H4(B(x)) dx`.
pub fn trispectrum(grid: &FieldGrid) -> f64 {
    let h2cell = grid.spacing() * grid.spacing();
    let mut sum = 0.0;
    for row in grid.centers.values.rows() {
        let mut acc = 0.0;
        for &b in row {
            acc += h4(b);
        }
        sum += acc;
    }
    sum * h2cell
}

/// Rescaled trispectrum `M_E = -(sqrt(2 pi^2 E) / 96) h_4`.
pub fn m_statistic(energy: f64, h4: f64) -> Result<f64> {
    Ok(-gradient_scale(energy)? / 96.0 * h4)
}

/// The six integrals of [`ChaosTerms`], accumulated row by row in the same
/// order as [`trispectrum`] so that `a1` equals it bit for bit.
pub fn chaos4_terms(grid: &FieldGrid) -> ChaosTerms {
    let h2cell = grid.spacing() * grid.spacing();
    let c = &grid.centers;
    let mut total = [0.0; 6];
    for ((vr, ar), br) in c.values.rows().into_iter().zip(c.d1.rows()).zip(c.d2.rows()) {
        let mut acc = [0.0; 6];
        for ((&v, &d1), &d2) in vr.iter().zip(ar.iter()).zip(br.iter()) {
            let (hv, h1, hb) = (h2(v), h2(d1), h2(d2));
            acc[0] += h4(v);
            acc[1] += h4(d1);
            acc[2] += h4(d2);
            acc[3] += h1 * hb;
            acc[4] += hv * h1;
            acc[5] += hv * hb;
        }
        for (t, a) in total.iter_mut().zip(acc) {
            *t += a;
        }
    }
    total.map(|t| t * h2cell)
}

/// Fourth chaotic projection of the nodal length,
/// `(sqrt(2 pi^2 E)/128) (8 a1 - a2 - a3 - 2 a4 - 8 a5 - 8 a6)`.
pub fn chaos4_projection(energy: f64, a: &ChaosTerms) -> Result<f64> {
    let combo = 8.0 * a[0] - a[1] - a[2] - 2.0 * a[3] - 8.0 * a[4] - 8.0 * a[5];
    Ok(gradient_scale(energy)? / 128.0 * combo)
}

/// `sqrt(2 pi^2 E)`, the standard deviation of each gradient component.
fn gradient_scale(energy: f64) -> Result<f64> {
    wavenumber(energy)?;
    Ok((2.0 * PI * PI * energy).sqrt())
}
