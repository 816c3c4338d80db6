//! Radial energy density in Fourier space, the binned norm built on it, and
//! the Two-Thirds dealiasing mask.

use crate::error::{Result, SpdeError};
use crate::grid::{GridSpec, SobolevOrder, SpectralField};

/// One annulus of the radial binning.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialBin {
    /// Integer annulus radius `kappa`.
    pub kappa: usize,
    /// `E_N(kappa) = rho^{-1} / |A_kappa| * sum_{k in A_kappa} |u_hat(k)|^2`.
    pub energy: f64,
    /// Number of lattice modes in the annulus.
    pub cardinality: usize,
    /// Standard error of the mean energy, when the bin aggregates an
    /// ensemble; `None` for a single field.
    pub stderr: Option<f64>,
}

/// Radially binned spectral energy. Modes are assigned to the annulus
/// `kappa(k) = max(1, ceil(|k|))`, which partitions the lattice (the
/// cardinalities over all bins add up to `N^2`). Bins run from 1 up to
/// `ceil(N / sqrt(2))`; the range beyond `N/2 - 1` covers the corners of the
/// square mode grid and is usually excluded from plots.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpectrum {
    grid: GridSpec,
    bins: Vec<RadialBin>,
}

impl RadialSpectrum {
    pub fn new(grid: GridSpec, bins: Vec<RadialBin>) -> Self {
        RadialSpectrum { grid, bins }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn bins(&self) -> &[RadialBin] {
        &self.bins
    }

    pub fn bin(&self, kappa: usize) -> Option<&RadialBin> {
        self.bins.iter().find(|b| b.kappa == kappa)
    }

    /// Bins in the conventional plotting range `kappa = 1, ..., N/2 - 1`.
    pub fn plot_bins(&self) -> &[RadialBin] {
        let limit = self.grid.points_per_axis() / 2 - 1;
        let end = self.bins.iter().take_while(|b| b.kappa <= limit).count();
        &self.bins[..end]
    }
}

/// Annulus index of a squared radius: smallest integer `kappa` with
/// `kappa^2 >= ksq`, clamped below at 1 so the zero mode joins the first bin.
#[inline]
pub fn annulus_of(ksq: u64) -> usize {
    if ksq <= 1 {
        return 1;
    }
    let mut r = (ksq as f64).sqrt().floor() as u64;
    // integer correction of the float sqrt at annulus boundaries
    while r * r >= ksq {
        r -= 1;
    }
    while (r + 1) * (r + 1) < ksq {
        r += 1;
    }
    (r + 1) as usize
}

/// Largest annulus index on the `N x N` mode grid, `ceil(N / sqrt(2))`.
pub fn max_annulus(n: usize) -> usize {
    let half = (n / 2) as u64;
    annulus_of(2 * half * half)
}

/// Bin the spectral energy radially. Only defined for `d = 2`.
pub fn radial_energy_density(field: &SpectralField) -> Result<RadialSpectrum> {
    let grid = field.grid();
    if grid.dim() != 2 {
        return Err(SpdeError::UnsupportedDimension(grid.dim()));
    }
    let kappa_max = max_annulus(grid.points_per_axis());
    let mut energy = vec![0.0f64; kappa_max + 1];
    let mut count = vec![0usize; kappa_max + 1];
    for (idx, c) in field.coeffs().iter().enumerate() {
        let kappa = annulus_of(grid.wave_sq(idx));
        energy[kappa] += c.norm_sqr();
        count[kappa] += 1;
    }
    let rho_inv = 1.0 / grid.rho();
    let bins = (1..=kappa_max)
        .map(|kappa| RadialBin {
            kappa,
            energy: if count[kappa] > 0 {
                rho_inv * energy[kappa] / count[kappa] as f64
            } else {
                0.0
            },
            cardinality: count[kappa],
            stderr: None,
        })
        .collect();
    Ok(RadialSpectrum::new(grid, bins))
}

/// Norm surrogate `sum_kappa kappa E(kappa) (1 + kappa^2)^s` over the bins of
/// a radial spectrum. Equivalent to the discrete Sobolev norm up to
/// kappa-independent constants, not equal to it.
pub fn binned_sobolev_norm_sq(spectrum: &RadialSpectrum, s: SobolevOrder) -> f64 {
    spectrum
        .bins()
        .iter()
        .map(|b| {
            let kappa = b.kappa as f64;
            kappa * b.energy * (1.0 + kappa * kappa).powf(s.exponent())
        })
        .sum()
}

/// Two-Thirds Rule mask: zero every coefficient with `max_i |k_i| >= N/3`
/// (tensor mask, exact integer test `3 |k_i| >= N`). Applied to the cubic
/// term of the pseudospectral scheme to suppress aliasing.
pub fn two_thirds_dealias(field: &SpectralField) -> SpectralField {
    let grid = field.grid();
    let n = grid.points_per_axis();
    let mut out = field.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        if !mode_survives_dealias(&grid, idx, n) {
            *c = num_complex::Complex64::ZERO;
        }
    }
    out
}

#[inline]
pub(crate) fn mode_survives_dealias(grid: &GridSpec, idx: usize, n: usize) -> bool {
    let keep = |k: i64| 3 * k.unsigned_abs() < n as u64;
    match grid.dim() {
        1 => keep(grid.signed_index(idx)),
        _ => keep(grid.signed_index(idx / n)) && keep(grid.signed_index(idx % n)),
    }
}
