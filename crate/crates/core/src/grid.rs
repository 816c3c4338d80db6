//! Torus grids and the sampled / spectral field types every other module
//! works with.
//!
//! The domain is the periodic hypercube `[-pi, pi]^d` discretized by `N`
//! equispaced points per axis, `x_j = (2 pi / N) j` with signed indices
//! `j_i = -N/2, ..., N/2 - 1`. Wave vectors use the same signed range.
//! Fields are stored row-major in that signed order (array index
//! `a = j + N/2`).

use num_complex::Complex64;

use crate::error::{Result, SpdeError};

/// Discretization of the torus: dimension, points per axis, and the derived
/// spacing `dx = 2 pi / N` and density `rho = dx^{-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    d: usize,
    n: usize,
}

impl GridSpec {
    /// A `d`-dimensional grid with `n` points per axis. `n` must be even and
    /// at least 2; only `d = 1` and `d = 2` are supported.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(SpdeError::UnsupportedDimension(d));
        }
        if n < 2 || n % 2 != 0 {
            return Err(SpdeError::Config(format!(
                "grid size must be an even integer >= 2, got {n}"
            )));
        }
        Ok(GridSpec { d, n })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Grid spacing `dx = 2 pi / N`.
    pub fn dx(&self) -> f64 {
        std::f64::consts::TAU / self.n as f64
    }

    /// Density `rho = (N / 2 pi)^2 = dx^{-2}`, independent of the dimension.
    pub fn rho(&self) -> f64 {
        let r = self.n as f64 / std::f64::consts::TAU;
        r * r
    }

    /// Total number of grid points (and of spectral modes), `N^d`.
    pub fn num_points(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Cell volume `dx^d = rho^{-d/2}`, the weight of the grid Riemann sum.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }

    /// Signed index along one axis for array index `a`.
    #[inline]
    pub fn signed_index(&self, a: usize) -> i64 {
        a as i64 - (self.n / 2) as i64
    }

    /// Array index of the mirrored mode `-k` (modulo `N`) along one axis.
    #[inline]
    pub fn mirror_index(&self, a: usize) -> usize {
        (self.n - a) % self.n
    }

    /// Squared wave number `|k|^2` of the mode at flat index `idx`.
    #[inline]
    pub fn wave_sq(&self, idx: usize) -> u64 {
        match self.d {
            1 => {
                let k = self.signed_index(idx);
                (k * k) as u64
            }
            _ => {
                let k1 = self.signed_index(idx / self.n);
                let k2 = self.signed_index(idx % self.n);
                (k1 * k1 + k2 * k2) as u64
            }
        }
    }

    /// Flat index of the mode/point with the given signed per-axis indices.
    pub fn flat_index(&self, signed: &[i64]) -> usize {
        assert_eq!(signed.len(), self.d);
        let half = (self.n / 2) as i64;
        match self.d {
            1 => (signed[0] + half) as usize,
            _ => ((signed[0] + half) as usize) * self.n + (signed[1] + half) as usize,
        }
    }

    /// Coordinates `x_j` of the grid point at flat index `idx`.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let dx = self.dx();
        match self.d {
            1 => [dx * self.signed_index(idx) as f64, 0.0],
            _ => [
                dx * self.signed_index(idx / self.n) as f64,
                dx * self.signed_index(idx % self.n) as f64,
            ],
        }
    }

    fn require_same(&self, other: &GridSpec, what: &str) -> Result<()> {
        if self != other {
            return Err(SpdeError::GridMismatch(format!(
                "{what}: {}d/N={} vs {}d/N={}",
                self.d, self.n, other.d, other.n
            )));
        }
        Ok(())
    }
}

/// Real scalar field sampled at the grid points, row-major in signed order.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(SpdeError::Config(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.num_points()
            )));
        }
        Ok(RealField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        RealField {
            grid,
            values: vec![0.0; grid.num_points()],
        }
    }

    /// Sample a function of the coordinates on the grid. For `d = 1` the
    /// second coordinate passed to `f` is always zero.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let values = (0..grid.num_points())
            .map(|idx| {
                let [x1, x2] = grid.coords(idx);
                f(x1, x2)
            })
            .collect();
        RealField { grid, values }
    }

    /// `sin(2 x_1)`, the initial condition used by the phase-separation runs.
    pub fn sin_2x(grid: GridSpec) -> Self {
        RealField::from_fn(grid, |x1, _| (2.0 * x1).sin())
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Mean of `u^2` over the grid points (the per-site second moment).
    pub fn site_second_moment(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }
}

/// Complex Fourier coefficients over the signed wave-vector range, stored
/// row-major like [`RealField`]. Transforms of real data are conjugate
/// symmetric, `u_hat(-k) = conj(u_hat(k))`, with `-k` taken modulo `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.num_points() {
            return Err(SpdeError::Config(format!(
                "spectral field has {} coefficients, grid needs {}",
                coeffs.len(),
                grid.num_points()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::ZERO; grid.num_points()],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at the given signed wave vector.
    pub fn coeff_at(&self, signed: &[i64]) -> Complex64 {
        self.coeffs[self.grid.flat_index(signed)]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Flat index of the mode `-k` (modulo `N`) for the mode at `idx`.
    #[inline]
    pub fn mirror_flat(&self, idx: usize) -> usize {
        let n = self.grid.points_per_axis();
        match self.grid.dim() {
            1 => self.grid.mirror_index(idx),
            _ => self.grid.mirror_index(idx / n) * n + self.grid.mirror_index(idx % n),
        }
    }

    /// Largest deviation from conjugate symmetry, `max_k |u_hat(-k) - conj(u_hat(k))|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.coeffs.len() {
            let m = self.mirror_flat(idx);
            if m < idx {
                continue;
            }
            let defect = (self.coeffs[m] - self.coeffs[idx].conj()).norm();
            worst = worst.max(defect);
        }
        worst
    }
}

/// Exponent of the weighted spectral norm; `s = 0` is the discrete
/// `L^2` norm, negative orders measure distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevOrder(pub f64);

impl SobolevOrder {
    pub const L2: SobolevOrder = SobolevOrder(0.0);

    pub fn exponent(&self) -> f64 {
        self.0
    }
}

/// Grid Riemann sum `rho^{-d/2} sum_j f(x_j) phi(x_j)`, the discrete
/// `L^2` duality pairing of a field against a test function.
pub fn pair_with_test_function(f: &RealField, phi: &RealField) -> Result<f64> {
    f.grid.require_same(&phi.grid, "pairing")?;
    let dot: f64 = f
        .values
        .iter()
        .zip(phi.values.iter())
        .map(|(a, b)| a * b)
        .sum();
    Ok(f.grid.cell_volume() * dot)
}

/// Integrals of `f` over the slabs `I_k x [-pi, pi]`, where the `x_1`-axis is
/// split into `n_intervals` equal intervals. Entries are grid Riemann sums,
/// so they add up to the pairing of `f` with the constant 1.
pub fn interval_averages(f: &RealField, n_intervals: usize) -> Result<Vec<f64>> {
    let grid = f.grid;
    if grid.dim() != 2 {
        return Err(SpdeError::UnsupportedDimension(grid.dim()));
    }
    if n_intervals == 0 || grid.points_per_axis() % n_intervals != 0 {
        return Err(SpdeError::Config(format!(
            "N={} is not divisible into {n_intervals} intervals",
            grid.points_per_axis()
        )));
    }
    let n = grid.points_per_axis();
    let rows_per_interval = n / n_intervals;
    let vol = grid.cell_volume();
    let mut out = Vec::with_capacity(n_intervals);
    for chunk in f.values.chunks(rows_per_interval * n) {
        out.push(vol * chunk.iter().sum::<f64>());
    }
    Ok(out)
}
