//! Discrete Sobolev norms, `||u||_s^2 = rho^{-d/2} sum_k (1+|k|^2)^s |u_hat(k)|^2`.
//!
//! At `s = 0` this reduces, by Parseval, to the grid Riemann sum of `|u|^2`.

use crate::dft::forward_dft;
use crate::grid::{RealField, SobolevOrder, SpectralField};

impl SpectralField {
    /// Squared weighted norm evaluated directly on the coefficients.
    pub fn sobolev_norm_sq(&self, s: SobolevOrder) -> f64 {
        let grid = self.grid();
        let weight_exp = s.exponent();
        let sum: f64 = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let ksq = grid.wave_sq(idx) as f64;
                (1.0 + ksq).powf(weight_exp) * c.norm_sqr()
            })
            .sum();
        grid.cell_volume() * sum
    }

    pub fn sobolev_norm(&self, s: SobolevOrder) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }
}

impl RealField {
    /// Squared discrete `H^s` norm of the sampled field.
    pub fn sobolev_norm_sq(&self, s: SobolevOrder) -> f64 {
        forward_dft(self).sobolev_norm_sq(s)
    }

    pub fn sobolev_norm(&self, s: SobolevOrder) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    /// Grid Riemann sum of `|u|^2`; equals the `s = 0` squared norm by
    /// Parseval.
    pub fn riemann_norm_sq(&self) -> f64 {
        self.grid().cell_volume() * self.values().iter().map(|v| v * v).sum::<f64>()
    }
}
