//! Zero-level set extraction by marching squares and the nodal length.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use ndarray::ArrayView2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::randomwave::{Domain, FieldGrid};
use crate::specfun::wavenumber;

/// Node values that are exactly zero are replaced by this before tracing.
pub const ZERO_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }
}

/// Polyline approximation of `B^{-1}(0)` inside the grid's square.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalCurve {
    pub segments: Vec<Segment>,
    pub total_length: f64,
}

impl NodalCurve {
    /// `x0,y0,x1,y1` per segment, with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x0", "y0", "x1", "y1"])?;
        for s in &self.segments {
            w.serialize((s.start[0], s.start[1], s.end[0], s.end[1]))?;
        }
        w.flush().map_err(|e| Error::io("<segment csv>", e))?;
        Ok(())
    }
}

/// Trace the zero set of `grid` and keep the segments.
pub fn nodal_length(grid: &FieldGrid) -> Result<NodalCurve> {
    let mut segments = Vec::new();
    let total_length = trace(grid, |s| segments.push(s))?;
    Ok(NodalCurve {
        segments,
        total_length,
    })
}

/// Length of the zero set without materializing the segments.
pub fn nodal_length_value(grid: &FieldGrid) -> Result<f64> {
    trace(grid, |_| {})
}

fn trace(grid: &FieldGrid, sink: impl FnMut(Segment)) -> Result<f64> {
    trace_zero_set(
        grid.nodes.values.view(),
        Some(grid.centers.values.view()),
        grid.geometry.origin,
        grid.spacing(),
        sink,
    )
}

/// Marching squares over every cell of a node lattice.
///
/// Crossings are placed by linear interpolation along cell edges. In saddle
/// cells (signs alternate around the cell) the sign of the cell-center value
/// decides which corners are joined; when `centers` is `None` the mean of the
/// four corners is used. Returns the total length; each segment is passed to
/// `sink` in row order.
pub fn trace_zero_set(
    values: ArrayView2<'_, f64>,
    centers: Option<ArrayView2<'_, f64>>,
    origin: [f64; 2],
    spacing: f64,
    mut sink: impl FnMut(Segment),
) -> Result<f64> {
    let (nx, ny) = values.dim();
    if nx < 2 || ny < 2 {
        return Err(Error::Data(format!("need at least a 2x2 grid, got {nx}x{ny}")));
    }
    if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| v.is_nan()) {
        return Err(Error::Data(format!("field value at node [{i}, {j}] is {v}")));
    }
    if let Some(c) = centers {
        if c.dim() != (nx - 1, ny - 1) {
            return Err(Error::Data(format!("center plane has shape {:?}, expected {:?}", c.dim(), (nx - 1, ny - 1))));
        }
        if c.iter().any(|v| v.is_nan()) {
            return Err(Error::Data("cell-center value is NaN".into()));
        }
    }
    let nudge = |v: f64| if v == 0.0 { ZERO_NUDGE } else { v };
    let point = |i: f64, j: f64| [origin[0] + i * spacing, origin[1] + j * spacing];

    let mut total = 0.0;
    for i in 0..nx - 1 {
        let mut row = 0.0;
        for j in 0..ny - 1 {
            let v00 = nudge(values[[i, j]]);
            let v10 = nudge(values[[i + 1, j]]);
            let v11 = nudge(values[[i + 1, j + 1]]);
            let v01 = nudge(values[[i, j + 1]]);
            let (p00, p10, p11, p01) = (v00 > 0.0, v10 > 0.0, v11 > 0.0, v01 > 0.0);
            if p00 == p10 && p10 == p11 && p11 == p01 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            // edges: 0 bottom (00-10), 1 right (10-11), 2 top (01-11), 3 left (00-01)
            let crossing = |edge: usize| -> [f64; 2] {
                match edge {
                    0 => point(fi + v00 / (v00 - v10), fj),
                    1 => point(fi + 1.0, fj + v10 / (v10 - v11)),
                    2 => point(fi + v01 / (v01 - v11), fj + 1.0),
                    _ => point(fi, fj + v00 / (v00 - v01)),
                }
            };
            let mut emit = |a: usize, b: usize| {
                let seg = Segment {
                    start: crossing(a),
                    end: crossing(b),
                };
                row += seg.length();
                sink(seg);
            };
            let cut = [p00 != p10, p10 != p11, p01 != p11, p00 != p01];
            if cut.iter().all(|&c| c) {
                let center = match centers {
                    Some(c) => nudge(c[[i, j]]),
                    None => nudge(0.25 * (v00 + v10 + v11 + v01)),
                };
                if (center > 0.0) == p00 {
                    // 00 and 11 joined through the center: cut off 10 and 01
                    emit(0, 1);
                    emit(3, 2);
                } else {
                    emit(0, 3);
                    emit(1, 2);
                }
            } else {
                let mut edges = (0..4).filter(|&e| cut[e]);
                let a = edges.next().expect("two cut edges");
                let b = edges.next().expect("two cut edges");
                emit(a, b);
            }
        }
        total += row;
    }
    Ok(total)
}

/// Expected nodal length `area(D) (pi / sqrt 2) sqrt(E)`.
pub fn mean_length_formula(energy: f64, domain: &Domain) -> Result<f64> {
    wavenumber(energy)?;
    Ok(domain.area() * PI / SQRT_2 * energy.sqrt())
}
