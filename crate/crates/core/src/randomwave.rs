//! Realizations of the planar random wave on a square grid.
//!
//! The field is a superposition of `M` plane waves with equispaced directions
//! `theta_m = (cos 2 pi m/M, sin 2 pi m/M)`:
//!
//! ```text
//! B(x) = sqrt(2/M) * sum_m [xi_m cos(k <theta_m, x>) + eta_m sin(k <theta_m, x>)]
//! ```
//!
//! with `xi_m, eta_m` independent `N(0, 1/2)` (real and imaginary parts of a
//! standard complex Gaussian), so `Var B = 1` and
//! `Cov(B(x), B(y)) = (1/M) sum_m cos(k <theta_m, x - y>)`, the `M`-point
//! trapezoidal rule for `J_0(k |x - y|)`. Every plane wave solves
//! `Delta B + k^2 B = 0`, so the sum does too.
//!
//! Grids are evaluated as one real matrix product per plane family: the
//! phase factorizes as `e^{i k c_m x} e^{i k s_m y}`.

use std::f64::consts::{PI, SQRT_2};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{s, Array2, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::wavenumber;

/// Axis-aligned square `[0, side]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    side: f64,
}

impl Domain {
    pub fn new(side: f64) -> Result<Self> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::domain(format!("domain side must be positive, got {side}")));
        }
        Ok(Self { side })
    }

    pub fn unit() -> Self {
        Self { side: 1.0 }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn diameter(&self) -> f64 {
        self.side * SQRT_2
    }
}

/// Minimum number of grid intervals per wavelength.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 10.0;
/// Minimum ratio `M / (k L)`.
pub const MIN_MODES_PER_RADIAN: f64 = 4.0;

/// Grid resolution rule: `n = ceil(points_per_wavelength * L / lambda) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRule {
    pub points_per_wavelength: f64,
}

impl Default for GridRule {
    fn default() -> Self {
        Self {
            points_per_wavelength: MIN_POINTS_PER_WAVELENGTH,
        }
    }
}

/// Mode count rule: `M = ceil(modes_per_radian * k * L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRule {
    pub modes_per_radian: f64,
}

impl Default for ModeRule {
    fn default() -> Self {
        Self {
            modes_per_radian: MIN_MODES_PER_RADIAN,
        }
    }
}

/// One experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveConfig {
    pub energy: f64,
    pub num_modes: usize,
    pub grid_points_per_side: usize,
    pub seed: u64,
    pub replication_index: u64,
    pub domain: Domain,
}

impl WaveConfig {
    /// Derive mode count and grid size from the rules, then validate.
    pub fn from_rules(
        energy: f64,
        domain: Domain,
        grid: GridRule,
        modes: ModeRule,
        seed: u64,
        replication_index: u64,
    ) -> Result<Self> {
        let k = wavenumber(energy)?;
        let wavelength = 2.0 * PI / k;
        let intervals = (grid.points_per_wavelength * domain.side() / wavelength).ceil();
        let num_modes = (modes.modes_per_radian * k * domain.side()).ceil();
        let config = Self {
            energy,
            num_modes: num_modes as usize,
            grid_points_per_side: intervals as usize + 1,
            seed,
            replication_index,
            domain,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.energy.sqrt()
    }

    /// Helmholtz eigenvalue `lambda_E = k^2`.
    pub fn eigenvalue(&self) -> f64 {
        let k = self.wavenumber();
        k * k
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.wavenumber()
    }

    pub fn spacing(&self) -> f64 {
        self.domain.side() / (self.grid_points_per_side as f64 - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let k = wavenumber(self.energy).map_err(|e| Error::config(e.to_string()))?;
        let n = self.grid_points_per_side;
        if n < 2 {
            return Err(Error::config(format!("need at least 2 grid points per side, got {n}")));
        }
        let h = self.spacing();
        let h_max = self.wavelength() / MIN_POINTS_PER_WAVELENGTH;
        if h > h_max * (1.0 + 1e-12) {
            return Err(Error::config(format!(
                "grid spacing {h:.3e} exceeds wavelength/10 = {h_max:.3e} at E = {}",
                self.energy
            )));
        }
        let m_min = (MIN_MODES_PER_RADIAN * k * self.domain.side()).ceil() as usize;
        if self.num_modes < m_min {
            return Err(Error::config(format!(
                "{} plane-wave modes at E = {}; need at least {m_min}",
                self.num_modes, self.energy
            )));
        }
        Ok(())
    }
}

/// Square lattice of nodes `origin + (i h, j h)`, `0 <= i, j < n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub origin: [f64; 2],
    pub spacing: f64,
    pub n: usize,
}

impl GridGeometry {
    pub fn new(origin: [f64; 2], side: f64, n: usize) -> Result<Self> {
        if n < 2 || !(side > 0.0) {
            return Err(Error::domain(format!("grid needs n >= 2 and side > 0, got n = {n}, side = {side}")));
        }
        Ok(Self {
            origin,
            spacing: side / (n as f64 - 1.0),
            n,
        })
    }

    pub fn side(&self) -> f64 {
        self.spacing * (self.n as f64 - 1.0)
    }

    pub fn area(&self) -> f64 {
        self.side() * self.side()
    }

    fn node_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.origin[axis] + i as f64 * self.spacing).collect()
    }

    fn center_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.n - 1)
            .map(|i| self.origin[axis] + (i as f64 + 0.5) * self.spacing)
            .collect()
    }
}

/// Field value and normalized gradient on one lattice (nodes or cell centers).
///
/// Arrays are indexed `[i, j]` for the point `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Planes {
    pub values: Array2<f64>,
    pub d1: Array2<f64>,
    pub d2: Array2<f64>,
}

impl Planes {
    fn zeros(n: usize) -> Self {
        Self {
            values: Array2::zeros((n, n)),
            d1: Array2::zeros((n, n)),
            d2: Array2::zeros((n, n)),
        }
    }
}

/// A sampled realization: field and unit-variance derivatives
/// `d_j = (sqrt 2 / k) dB/dx_j` at the nodes, plus the same three planes at
/// the cell centers for midpoint quadrature and saddle resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub energy: f64,
    pub geometry: GridGeometry,
    pub nodes: Planes,
    pub centers: Planes,
    /// Present when the grid came from [`sample_field`].
    pub config: Option<WaveConfig>,
}

impl FieldGrid {
    /// Grid of a deterministic field given by `f(x, y) -> (value, d1, d2)`.
    pub fn from_fn(
        energy: f64,
        geometry: GridGeometry,
        f: impl Fn(f64, f64) -> (f64, f64, f64),
    ) -> Self {
        let fill = |xs: &[f64], ys: &[f64]| {
            let mut planes = Planes::zeros(xs.len());
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    let (v, a, b) = f(x, y);
                    planes.values[[i, j]] = v;
                    planes.d1[[i, j]] = a;
                    planes.d2[[i, j]] = b;
                }
            }
            planes
        };
        Self {
            energy,
            geometry,
            nodes: fill(&geometry.node_coords(0), &geometry.node_coords(1)),
            centers: fill(&geometry.center_coords(0), &geometry.center_coords(1)),
            config: None,
        }
    }

    /// Identically zero field.
    pub fn zeros(energy: f64, geometry: GridGeometry) -> Self {
        Self {
            energy,
            geometry,
            nodes: Planes::zeros(geometry.n),
            centers: Planes::zeros(geometry.n - 1),
            config: None,
        }
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.nodes.values.view()
    }

    pub fn spacing(&self) -> f64 {
        self.geometry.spacing
    }

    pub fn n(&self) -> usize {
        self.geometry.n
    }

    /// Check that every plane is finite; returns a data error otherwise.
    pub fn check_finite(&self) -> Result<()> {
        for (name, plane) in [
            ("values", &self.nodes.values),
            ("d1", &self.nodes.d1),
            ("d2", &self.nodes.d2),
            ("center values", &self.centers.values),
            ("center d1", &self.centers.d1),
            ("center d2", &self.centers.d2),
        ] {
            if let Some(((i, j), v)) = plane.indexed_iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::Data(format!("{name}[{i}, {j}] = {v}")));
            }
        }
        Ok(())
    }

    /// Negated field (same zero set).
    pub fn negated(&self) -> Self {
        let neg = |p: &Planes| Planes {
            values: -&p.values,
            d1: -&p.d1,
            d2: -&p.d2,
        };
        Self {
            energy: self.energy,
            geometry: self.geometry,
            nodes: neg(&self.nodes),
            centers: neg(&self.centers),
            config: self.config.clone(),
        }
    }
}

/// A finite plane-wave superposition with explicit amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSum {
    wavenumber: f64,
    directions: Vec<[f64; 2]>,
    xi: Vec<f64>,
    eta: Vec<f64>,
}

impl ModeSum {
    pub fn new(wavenumber: f64, directions: Vec<[f64; 2]>, xi: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if directions.is_empty() || directions.len() != xi.len() || xi.len() != eta.len() {
            return Err(Error::Data(format!(
                "mode sum needs matching non-empty directions/amplitudes, got {}/{}/{}",
                directions.len(),
                xi.len(),
                eta.len()
            )));
        }
        Ok(Self {
            wavenumber,
            directions,
            xi,
            eta,
        })
    }

    /// `M` equispaced unit directions `(cos 2 pi m/M, sin 2 pi m/M)`, `m = 1..=M`.
    pub fn equispaced_directions(m: usize) -> Vec<[f64; 2]> {
        (1..=m)
            .map(|j| {
                let (s, c) = (2.0 * PI * j as f64 / m as f64).sin_cos();
                [c, s]
            })
            .collect()
    }

    /// Draw the Gaussian amplitudes for `config` from `rng`.
    pub fn random<R: Rng + ?Sized>(config: &WaveConfig, rng: &mut R) -> Self {
        let m = config.num_modes;
        let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
        let mut xi = Vec::with_capacity(m);
        let mut eta = Vec::with_capacity(m);
        for _ in 0..m {
            xi.push(normal.sample(rng));
            eta.push(normal.sample(rng));
        }
        Self {
            wavenumber: config.wavenumber(),
            directions: Self::equispaced_directions(m),
            xi,
            eta,
        }
    }

    pub fn num_modes(&self) -> usize {
        self.directions.len()
    }

    fn amplitude(&self) -> f64 {
        (2.0 / self.num_modes() as f64).sqrt()
    }

    /// Value and normalized gradient at one point, summed mode by mode.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let k = self.wavenumber;
        let (mut v, mut g1, mut g2) = (0.0, 0.0, 0.0);
        for ((dir, &xi), &eta) in self.directions.iter().zip(&self.xi).zip(&self.eta) {
            let (s, c) = (k * (dir[0] * x + dir[1] * y)).sin_cos();
            v += xi * c + eta * s;
            let slope = -xi * s + eta * c;
            g1 += dir[0] * slope;
            g2 += dir[1] * slope;
        }
        let a = self.amplitude();
        // d_j = (sqrt 2/k) * a * k * theta_j * slope
        (a * v, a * SQRT_2 * g1, a * SQRT_2 * g2)
    }

    /// Evaluate value and normalized gradient on the `xs x ys` tensor lattice.
    ///
    /// With `a_m = A (xi_m - i eta_m)` the value is
    /// `Re sum_m a_m e^{i k c_m x} e^{i k s_m y}`, i.e. `Re(P Q)` with
    /// `P[i, m] = a_m e^{i k c_m x_i}` and `Q[m, j] = e^{i k s_m y_j}`. The
    /// derivative planes use `P` scaled by `i sqrt2 c_m` and `i sqrt2 s_m`.
    fn eval_lattice(&self, xs: &[f64], ys: &[f64]) -> Planes {
        let m = self.num_modes();
        let (nx, ny) = (xs.len(), ys.len());
        let k = self.wavenumber;
        let a = self.amplitude();
        // stacked [Re P | -Im P] for value, d1, d2
        let mut lhs = Array2::<f64>::zeros((3 * nx, 2 * m));
        let mut rhs = Array2::<f64>::zeros((2 * m, ny));
        for (mi, (dir, (&xi, &eta))) in self.directions.iter().zip(self.xi.iter().zip(&self.eta)).enumerate() {
            let (ar, ai) = (a * xi, -a * eta);
            for (i, &x) in xs.iter().enumerate() {
                let (s, c) = (k * dir[0] * x).sin_cos();
                let (pr, pi) = (ar * c - ai * s, ar * s + ai * c);
                lhs[[i, mi]] = pr;
                lhs[[i, m + mi]] = -pi;
                // i sqrt2 theta * P = sqrt2 theta * (-pi + i pr)
                let (t1, t2) = (SQRT_2 * dir[0], SQRT_2 * dir[1]);
                lhs[[nx + i, mi]] = -t1 * pi;
                lhs[[nx + i, m + mi]] = -t1 * pr;
                lhs[[2 * nx + i, mi]] = -t2 * pi;
                lhs[[2 * nx + i, m + mi]] = -t2 * pr;
            }
            for (j, &y) in ys.iter().enumerate() {
                let (s, c) = (k * dir[1] * y).sin_cos();
                rhs[[mi, j]] = c;
                rhs[[m + mi, j]] = s;
            }
        }
        let out = lhs.dot(&rhs);
        Planes {
            values: out.slice(s![0..nx, ..]).to_owned(),
            d1: out.slice(s![nx..2 * nx, ..]).to_owned(),
            d2: out.slice(s![2 * nx..3 * nx, ..]).to_owned(),
        }
    }

    /// Render onto the nodes and cell centers of `geometry`.
    pub fn render(&self, energy: f64, geometry: GridGeometry) -> FieldGrid {
        let nodes = self.eval_lattice(&geometry.node_coords(0), &geometry.node_coords(1));
        let centers = self.eval_lattice(&geometry.center_coords(0), &geometry.center_coords(1));
        FieldGrid {
            energy,
            geometry,
            nodes,
            centers,
            config: None,
        }
    }
}

/// Sample one realization of the random wave for `config`.
///
/// `rng` must be the replication's own stream (see
/// [`crate::rng::replication_stream`]).
pub fn sample_field<R: Rng + ?Sized>(config: &WaveConfig, rng: &mut R) -> Result<FieldGrid> {
    config.validate()?;
    let modes = ModeSum::random(config, rng);
    let geometry = GridGeometry::new([0.0, 0.0], config.domain.side(), config.grid_points_per_side)?;
    let mut grid = modes.render(config.energy, geometry);
    grid.config = Some(config.clone());
    Ok(grid)
}

/// Sample replication `config.replication_index` from its canonical stream.
pub fn sample_replication(config: &WaveConfig) -> Result<FieldGrid> {
    let mut rng = crate::rng::replication_stream(config.seed, config.energy, config.replication_index);
    sample_field(config, &mut rng)
}

/// Relative Helmholtz residual of the 5-point Laplacian:
/// `max_interior |Delta_h B + k^2 B| / (k^2 max |B|)`.
pub fn helmholtz_residual(grid: &FieldGrid) -> Result<f64> {
    let n = grid.n();
    if n < 3 {
        return Err(Error::domain(format!("helmholtz residual needs n >= 3, got {n}")));
    }
    let lambda = wavenumber(grid.energy)?.powi(2);
    let b = &grid.nodes.values;
    let h2 = grid.spacing() * grid.spacing();
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0_f64;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let lap = (b[[i + 1, j]] + b[[i - 1, j]] + b[[i, j + 1]] + b[[i, j - 1]] - 4.0 * b[[i, j]]) / h2;
            worst = worst.max((lap + lambda * b[[i, j]]).abs());
        }
    }
    Ok(worst / (lambda * scale))
}

/// Dump node values, d1 and d2 as `3 n^2` little-endian f64 (row-major, in
/// that order) to `bin_path`, and the wave configuration as JSON to
/// `json_path`.
pub fn write_raw(grid: &FieldGrid, bin_path: &Path, json_path: &Path) -> Result<()> {
    let file = File::create(bin_path).map_err(|e| Error::io(bin_path, e))?;
    let mut out = BufWriter::new(file);
    for plane in [&grid.nodes.values, &grid.nodes.d1, &grid.nodes.d2] {
        for v in plane.iter() {
            out.write_all(&v.to_le_bytes()).map_err(|e| Error::io(bin_path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(bin_path, e))?;
    let sidecar = RawSidecar {
        schema_version: 1,
        energy: grid.energy,
        n: grid.n(),
        spacing: grid.spacing(),
        origin: grid.geometry.origin,
        config: grid.config.clone(),
    };
    let file = File::create(json_path).map_err(|e| Error::io(json_path, e))?;
    serde_json::to_writer_pretty(file, &sidecar)?;
    Ok(())
}

/// JSON sidecar of a raw grid dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub schema_version: u32,
    pub energy: f64,
    pub n: usize,
    pub spacing: f64,
    pub origin: [f64; 2],
    pub config: Option<WaveConfig>,
}
