//! Reproducible discrete space-time white noise.
//!
//! One time step of the driving Wiener process on the grid is a field of
//! i.i.d. draws `sigma sqrt(dt) rho^{d/4} N(0,1)`: the average of white noise
//! over a grid cell of volume `rho^{-d/2}` and a step of length `dt` carries
//! exactly that standard deviation. Sampling happens in direct space and the
//! spectral image is obtained by the forward transform; this keeps the field
//! real by construction while matching the complex-Gaussian per-mode law
//! (variance `sigma^2 dt / dx^2` in d=2, flat in `k`).
//!
//! Streams are counter based: each (master seed, realization) pair owns a
//! ChaCha stream family and each time step selects its own stream, so the
//! increment for a given (seed, realization, step) triple is bit-identical
//! no matter in which order or on which thread it is drawn.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dft::forward_dft;
use crate::error::{Result, SpdeError};
use crate::grid::{GridSpec, RealField, SpectralField};

/// Noise intensity plus the seeds that make a realization reproducible.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub master_seed: u64,
    pub realization_index: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, master_seed: u64, realization_index: u64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(SpdeError::Config(format!(
                "noise intensity must be nonnegative, got {sigma}"
            )));
        }
        Ok(NoiseSpec {
            sigma,
            master_seed,
            realization_index,
        })
    }
}

/// Direct-space Wiener increment for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseIncrement {
    pub field: RealField,
    pub dt: f64,
}

/// splitmix64 finalizer; avalanche for seed derivation.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Seed of one realization's stream family, recorded in run manifests so any
/// single realization can be replayed in isolation.
pub fn realization_seed(master_seed: u64, realization_index: u64) -> u64 {
    mix64(master_seed ^ mix64(realization_index))
}

fn stream_rng(seed: u64, step_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_mut(8) {
        state = mix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(step_index);
    rng
}

/// Per-site standard deviation of one increment, `sigma sqrt(dt) rho^{d/4}`
/// (equals `sigma sqrt(dt) / dx` in two dimensions).
pub fn site_std_dev(grid: GridSpec, sigma: f64, dt: f64) -> f64 {
    sigma * dt.sqrt() * grid.rho().powf(grid.dim() as f64 / 4.0)
}

/// Draw the increment for one time step. Fully determined by
/// `(spec.master_seed, spec.realization_index, step_index)`.
pub fn sample_increment(
    grid: GridSpec,
    spec: &NoiseSpec,
    dt: f64,
    step_index: u64,
) -> NoiseIncrement {
    let amplitude = site_std_dev(grid, spec.sigma, dt);
    let field = if amplitude == 0.0 {
        RealField::zeros(grid)
    } else {
        let mut rng = stream_rng(
            realization_seed(spec.master_seed, spec.realization_index),
            step_index,
        );
        let values = (0..grid.num_points())
            .map(|_| amplitude * rng.sample::<f64, _>(StandardNormal))
            .collect();
        RealField::new(grid, values).expect("length matches grid")
    };
    NoiseIncrement { field, dt }
}

/// Spectral image of an increment: the forward transform of the direct-space
/// field, exactly conjugate symmetric.
pub fn spectral_increment(inc: &NoiseIncrement) -> SpectralField {
    forward_dft(&inc.field)
}

/// Disc truncation: zero every coefficient with `|k| > cutoff`. With
/// `cutoff >= N / sqrt(2)` the whole square mode grid survives, so the
/// operation is the identity there.
pub fn truncate_noise(field: &SpectralField, cutoff: usize) -> SpectralField {
    let grid = field.grid();
    let limit = (cutoff as u64) * (cutoff as u64);
    let mut out = field.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        if grid.wave_sq(idx) > limit {
            *c = num_complex::Complex64::ZERO;
        }
    }
    out
}

/// Sum consecutive fine increments into the coarse-step increment of the same
/// underlying Wiener path: fields add, step sizes add.
pub fn aggregate_increments(fine: &[NoiseIncrement]) -> Result<NoiseIncrement> {
    let first = fine
        .first()
        .ok_or_else(|| SpdeError::Config("cannot aggregate zero increments".into()))?;
    let grid = first.field.grid();
    let mut values = first.field.values().to_vec();
    let mut dt = first.dt;
    for inc in &fine[1..] {
        if inc.field.grid() != grid {
            return Err(SpdeError::GridMismatch(
                "aggregated increments live on different grids".into(),
            ));
        }
        for (acc, v) in values.iter_mut().zip(inc.field.values()) {
            *acc += v;
        }
        dt += inc.dt;
    }
    Ok(NoiseIncrement {
        field: RealField::new(grid, values)?,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_intensity_gives_zero_field() {
        let g = GridSpec::new(2, 16).unwrap();
        let spec = NoiseSpec::new(0.0, 1, 0).unwrap();
        let inc = sample_increment(g, &spec, 0.1, 0);
        assert!(inc.field.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn negative_intensity_rejected() {
        assert!(NoiseSpec::new(-1.0, 0, 0).is_err());
    }

    #[test]
    fn site_std_dev_arithmetic() {
        // sigma = 1, dt = 0.01, d = 2, N = 64: 0.1 * 64 / (2 pi)
        let g = GridSpec::new(2, 64).unwrap();
        let sd = site_std_dev(g, 1.0, 0.01);
        assert_relative_eq!(sd, 0.1 * 64.0 / std::f64::consts::TAU, max_relative = 1e-14);
        assert_relative_eq!(sd, 1.01859, max_relative = 1e-5);
        // halving dx doubles the per-site deviation in d = 2
        let g2 = GridSpec::new(2, 128).unwrap();
        assert_relative_eq!(site_std_dev(g2, 1.0, 0.01), 2.0 * sd, max_relative = 1e-14);
    }

    #[test]
    fn increments_are_deterministic_across_threads() {
        let g = GridSpec::new(2, 16).unwrap();
        let spec = NoiseSpec::new(1.5, 77, 3).unwrap();
        let here = sample_increment(g, &spec, 0.05, 9);
        let there = std::thread::spawn(move || sample_increment(g, &spec, 0.05, 9))
            .join()
            .unwrap();
        for (a, b) in here.field.values().iter().zip(there.field.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // a different step index gives a different draw
        let other = sample_increment(g, &spec, 0.05, 10);
        assert_ne!(here.field.values(), other.field.values());
    }

    #[test]
    fn spectral_increment_is_symmetric_and_zero_on_zero() {
        let g = GridSpec::new(2, 16).unwrap();
        let spec = NoiseSpec::new(1.0, 5, 0).unwrap();
        let inc = sample_increment(g, &spec, 0.01, 0);
        assert_eq!(spectral_increment(&inc).symmetry_defect(), 0.0);
        let zero = NoiseIncrement {
            field: RealField::zeros(g),
            dt: 0.01,
        };
        assert!(spectral_increment(&zero).coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn disc_truncation_counts() {
        let g = GridSpec::new(2, 8).unwrap();
        let mut hat = SpectralField::zeros(g);
        for c in hat.coeffs_mut() {
            *c = num_complex::Complex64::new(1.0, 0.0);
        }
        // cutoff 1 keeps the same five modes as the first annulus
        let kept1 = truncate_noise(&hat, 1);
        assert_eq!(kept1.coeffs().iter().filter(|c| c.norm() > 0.0).count(), 5);
        // cutoff 0 keeps only DC
        let kept0 = truncate_noise(&hat, 0);
        assert_eq!(kept0.coeffs().iter().filter(|c| c.norm() > 0.0).count(), 1);
        assert!(kept0.coeff_at(&[0, 0]).norm() > 0.0);
        // a cutoff covering the corners is the identity
        let all = truncate_noise(&hat, 6); // ceil(8 / sqrt(2)) = 6
        assert_eq!(all, hat);
    }

    #[test]
    fn aggregation_edge_cases() {
        let g = GridSpec::new(2, 8).unwrap();
        let spec = NoiseSpec::new(1.0, 9, 0).unwrap();
        let one = sample_increment(g, &spec, 0.02, 0);
        let same = aggregate_increments(std::slice::from_ref(&one)).unwrap();
        assert_eq!(same, one);
        let zeros = NoiseIncrement {
            field: RealField::zeros(g),
            dt: 0.1,
        };
        let agg = aggregate_increments(&[zeros.clone(), zeros]).unwrap();
        assert!(agg.field.values().iter().all(|&v| v == 0.0));
        assert_relative_eq!(agg.dt, 0.2);
        assert!(aggregate_increments(&[]).is_err());
        let other_grid = NoiseIncrement {
            field: RealField::zeros(GridSpec::new(2, 16).unwrap()),
            dt: 0.02,
        };
        assert!(matches!(
            aggregate_increments(&[one, other_grid]),
            Err(SpdeError::GridMismatch(_))
        ));
    }
}
