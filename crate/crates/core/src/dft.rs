//! Discrete Fourier transforms in the symmetric `1/N^{d/2}` convention.
//!
//! The forward transform is
//! `u_hat(k) = N^{-d/2} sum_j u(x_j) exp(+ 2 pi i k.j / N)`
//! over signed indices, and the inverse uses the conjugate kernel with the
//! same scaling, so the pair is unitary. Note the sign: the *forward*
//! transform here carries the `+` kernel, which maps onto the FFT library's
//! unnormalized inverse plan.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Result, SpdeError};
use crate::grid::{GridSpec, RealField, SpectralField};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match direction {
            FftDirection::Forward => p.plan_fft_forward(n),
            FftDirection::Inverse => p.plan_fft_inverse(n),
        }
    })
}

/// Move between signed storage order (index `a = j + N/2`) and the FFT's
/// natural order (`j mod N`). The shift by `N/2` is an involution for even
/// `N`, so one function serves both directions.
fn half_shift(buf: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let n = grid.points_per_axis();
    let half = n / 2;
    let mut out = vec![Complex64::ZERO; buf.len()];
    match grid.dim() {
        1 => {
            for (a, &v) in buf.iter().enumerate() {
                out[(a + half) % n] = v;
            }
        }
        _ => {
            for a1 in 0..n {
                let s1 = (a1 + half) % n;
                for a2 in 0..n {
                    out[s1 * n + (a2 + half) % n] = buf[a1 * n + a2];
                }
            }
        }
    }
    out
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Apply the length-`N` FFT along every axis of the shifted buffer.
fn fft_all_axes(buf: &mut [Complex64], grid: &GridSpec, direction: FftDirection) {
    let n = grid.points_per_axis();
    let fft = plan(n, direction);
    match grid.dim() {
        1 => fft.process(buf),
        _ => {
            for row in buf.chunks_mut(n) {
                fft.process(row);
            }
            transpose(buf, n);
            for row in buf.chunks_mut(n) {
                fft.process(row);
            }
            transpose(buf, n);
        }
    }
}

fn scaled_transform(input: &[Complex64], grid: &GridSpec, direction: FftDirection) -> Vec<Complex64> {
    let mut buf = half_shift(input, grid);
    fft_all_axes(&mut buf, grid, direction);
    let mut out = half_shift(&buf, grid);
    let scale = 1.0 / (grid.num_points() as f64).sqrt();
    for c in &mut out {
        *c *= scale;
    }
    out
}

/// Force exact conjugate symmetry by averaging each mode with the conjugate
/// of its mirror. For transforms of real data this only removes float
/// round-off, but it makes the symmetry contract exact.
fn symmetrize(field: &mut SpectralField) {
    for idx in 0..field.coeffs().len() {
        let m = field.mirror_flat(idx);
        if m < idx {
            continue;
        }
        if m == idx {
            let c = field.coeffs()[idx];
            field.coeffs_mut()[idx] = Complex64::new(c.re, 0.0);
        } else {
            let avg = 0.5 * (field.coeffs()[idx] + field.coeffs()[m].conj());
            field.coeffs_mut()[idx] = avg;
            field.coeffs_mut()[m] = avg.conj();
        }
    }
}

/// Forward transform of a real field; the result is exactly conjugate
/// symmetric.
pub fn forward_dft(f: &RealField) -> SpectralField {
    let grid = f.grid();
    let input: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    // The `+` kernel of the forward convention is the library's inverse plan.
    let coeffs = scaled_transform(&input, &grid, FftDirection::Inverse);
    let mut out = SpectralField::new(grid, coeffs).expect("length preserved");
    symmetrize(&mut out);
    out
}

/// Inverse transform back to a real field. Fails if the input is not
/// conjugate symmetric (i.e. does not represent real data); the tolerance is
/// `1e-10` relative to the largest coefficient.
pub fn inverse_dft(field: &SpectralField) -> Result<RealField> {
    let defect = field.symmetry_defect();
    let scale = field.max_abs().max(1.0);
    if defect > 1e-10 * scale {
        return Err(SpdeError::SymmetryViolation(format!(
            "defect {defect:.3e} exceeds 1e-10 x max|coeff| = {:.3e}",
            1e-10 * scale
        )));
    }
    let grid = field.grid();
    let out = scaled_transform(field.coeffs(), &grid, FftDirection::Forward);
    let values = out.into_iter().map(|c| c.re).collect();
    Ok(RealField::new(grid, values).expect("length preserved"))
}

/// Inverse transform without the symmetry check, for internal use on fields
/// that are symmetric by construction.
pub(crate) fn inverse_dft_unchecked(field: &SpectralField) -> RealField {
    let grid = field.grid();
    let out = scaled_transform(field.coeffs(), &grid, FftDirection::Forward);
    let values = out.into_iter().map(|c| c.re).collect();
    RealField::new(grid, values).expect("length preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Direct O(N^{2d}) evaluation of the defining sum; the oracle the FFT
    /// path is checked against.
    fn brute_forward(f: &RealField) -> Vec<Complex64> {
        let grid = f.grid();
        let n = grid.points_per_axis();
        let scale = 1.0 / (grid.num_points() as f64).sqrt();
        let mut out = vec![Complex64::ZERO; grid.num_points()];
        for (kidx, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (jidx, &v) in f.values().iter().enumerate() {
                let phase = match grid.dim() {
                    1 => grid.signed_index(kidx) * grid.signed_index(jidx),
                    _ => {
                        grid.signed_index(kidx / n) * grid.signed_index(jidx / n)
                            + grid.signed_index(kidx % n) * grid.signed_index(jidx % n)
                    }
                };
                let theta = std::f64::consts::TAU * phase as f64 / n as f64;
                acc += v * Complex64::new(theta.cos(), theta.sin());
            }
            *o = scale * acc;
        }
        out
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let g = GridSpec::new(2, 8).unwrap();
        let f = forward_dft(&RealField::zeros(g));
        assert!(f.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn constant_field_concentrates_at_dc() {
        let g = GridSpec::new(2, 8).unwrap();
        let f = RealField::from_fn(g, |_, _| 1.0);
        let hat = forward_dft(&f);
        assert_relative_eq!(hat.coeff_at(&[0, 0]).re, 8.0, max_relative = 1e-13);
        for idx in 0..hat.coeffs().len() {
            if idx != g.flat_index(&[0, 0]) {
                assert!(hat.coeffs()[idx].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sine_concentrates_on_first_modes() {
        let g = GridSpec::new(2, 8).unwrap();
        let n = 8.0;
        let f = RealField::from_fn(g, |x1, _| x1.sin());
        let hat = forward_dft(&f);
        let plus = hat.coeff_at(&[1, 0]);
        let minus = hat.coeff_at(&[-1, 0]);
        // u_hat(1,0) = i N / 2, u_hat(-1,0) = -i N / 2 (conjugate pair).
        assert_relative_eq!(plus.im, n / 2.0, max_relative = 1e-12);
        assert!(plus.re.abs() < 1e-12);
        assert_relative_eq!(plus.norm_sqr(), n * n / 4.0, max_relative = 1e-12);
        assert_relative_eq!(minus.norm_sqr(), n * n / 4.0, max_relative = 1e-12);
        assert_relative_eq!((plus - minus.conj()).norm(), 0.0, epsilon = 1e-14);
        let energy: f64 = hat.coeffs().iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(energy, n * n / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn fft_matches_brute_force() {
        for (d, n) in [(1, 8), (2, 8), (2, 6)] {
            let g = GridSpec::new(d, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let f = RealField::from_fn(g, |_, _| rng.random_range(-1.0..1.0));
            let fast = forward_dft(&f);
            let slow = brute_forward(&f);
            for (a, b) in fast.coeffs().iter().zip(slow.iter()) {
                assert!((a - b).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn round_trip_is_identity() {
        for (d, n) in [(1, 1024), (2, 64)] {
            let g = GridSpec::new(d, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let f = RealField::from_fn(g, |_, _| rng.random_range(-3.0..3.0));
            let back = inverse_dft(&forward_dft(&f)).unwrap();
            let worst = f
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-12, "round trip error {worst}");
        }
    }

    #[test]
    fn dc_spike_inverts_to_constant() {
        let g = GridSpec::new(2, 8).unwrap();
        let mut hat = SpectralField::zeros(g);
        let dc = g.flat_index(&[0, 0]);
        hat.coeffs_mut()[dc] = Complex64::new(8.0, 0.0);
        let f = inverse_dft(&hat).unwrap();
        for &v in f.values() {
            assert_relative_eq!(v, 1.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn inverse_rejects_asymmetric_input() {
        let g = GridSpec::new(2, 8).unwrap();
        let mut hat = SpectralField::zeros(g);
        hat.coeffs_mut()[g.flat_index(&[1, 0])] = Complex64::new(1.0, 0.0);
        // mirror mode left at zero: not the transform of real data
        assert!(matches!(
            inverse_dft(&hat),
            Err(SpdeError::SymmetryViolation(_))
        ));
    }

    #[test]
    fn forward_output_is_exactly_symmetric() {
        let g = GridSpec::new(2, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = RealField::from_fn(g, |_, _| rng.random_range(-1.0..1.0));
        assert_eq!(forward_dft(&f).symmetry_defect(), 0.0);
    }
}
