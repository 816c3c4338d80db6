//! IMEX time stepping for the three torus equations: the stochastic heat
//! equation (spectral), the diffusion-free double-well equation (direct
//! space) and the full stochastic phase-field equation (pseudospectral with
//! a dealiased cubic).
//!
//! All three schemes treat the linear part with the implicit trapezoidal
//! rule and the noise (and cubic, where present) with an explicit
//! Euler-Maruyama step:
//!
//! * heat:      `u_hat' = [(1 - dt/2 (g + a|k|^2)) u_hat + W_hat] / (1 + dt/2 (g + a|k|^2))`
//! * decoupled: `u' = [u (1 + g dt/2) - g dt u^3 + W] / (1 - g dt/2)`
//! * full:      `u_hat' = [(1 + dt/2 (g - a|k|^2)) u_hat - g dt (u^3)_hat + W_hat] / (1 - dt/2 (g - a|k|^2))`
//!
//! where the cubic is evaluated pointwise in direct space (inverse
//! transform, cube, forward transform) under the Two-Thirds mask.

use num_complex::Complex64;

use crate::dft::{forward_dft, inverse_dft, inverse_dft_unchecked};
use crate::error::{Result, SpdeError};
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::noise::{sample_increment, aggregate_increments, NoiseIncrement, NoiseSpec};
use crate::spectrum::two_thirds_dealias;

/// Which equation the scheme integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Equation {
    Heat,
    DecoupledAc,
    AllenCahn,
}

impl Equation {
    pub fn token(&self) -> &'static str {
        match self {
            Equation::Heat => "heat",
            Equation::DecoupledAc => "dac",
            Equation::AllenCahn => "ac",
        }
    }
}

impl std::str::FromStr for Equation {
    type Err = SpdeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(Equation::Heat),
            "dac" | "decoupled" | "decoupled_ac" => Ok(Equation::DecoupledAc),
            "ac" | "allen_cahn" => Ok(Equation::AllenCahn),
            other => Err(SpdeError::Config(format!("unknown equation {other:?}"))),
        }
    }
}

/// Time-stepping configuration: equation selector, rates, noise intensity,
/// horizon and step count.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SchemeConfig {
    pub equation: Equation,
    /// Diffusion rate in front of the Laplacian.
    pub alpha: f64,
    /// Reaction rate in front of the (linearized) double-well drift.
    pub g: f64,
    /// Noise intensity.
    pub sigma: f64,
    /// Final time `T`.
    pub t_final: f64,
    /// Number of steps `M`; `dt = T / M`. `M = 0` integrates nothing and
    /// returns the sampled initial condition.
    pub steps: usize,
    /// Apply the Two-Thirds mask to the cubic term. On by default for the
    /// full equation, off for the others.
    pub dealias: bool,
}

impl SchemeConfig {
    pub fn new(
        equation: Equation,
        alpha: f64,
        g: f64,
        sigma: f64,
        t_final: f64,
        steps: usize,
    ) -> Result<Self> {
        if !(alpha >= 0.0) || !(g >= 0.0) || !(sigma >= 0.0) {
            return Err(SpdeError::Config(format!(
                "rates must be nonnegative: alpha={alpha}, g={g}, sigma={sigma}"
            )));
        }
        if !(t_final >= 0.0) || !t_final.is_finite() {
            return Err(SpdeError::Config(format!("bad final time {t_final}")));
        }
        Ok(SchemeConfig {
            equation,
            alpha,
            g,
            sigma,
            t_final,
            steps,
            dealias: equation == Equation::AllenCahn,
        })
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn dt(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.t_final / self.steps as f64
        }
    }
}

/// Initial state of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// `u_0 = sin(2 x_1)`.
    Sin2X,
    /// An already sampled field (e.g. loaded from a snapshot).
    Field(RealField),
}

impl InitialCondition {
    pub fn sample(&self, grid: GridSpec) -> Result<RealField> {
        match self {
            InitialCondition::Zero => Ok(RealField::zeros(grid)),
            InitialCondition::Sin2X => Ok(RealField::sin_2x(grid)),
            InitialCondition::Field(f) => {
                if f.grid() != grid {
                    return Err(SpdeError::GridMismatch(
                        "initial condition sampled on a different grid".into(),
                    ));
                }
                Ok(f.clone())
            }
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            InitialCondition::Zero => "zero",
            InitialCondition::Sin2X => "sin2x",
            InitialCondition::Field(_) => "field",
        }
    }
}

/// Current field of a trajectory: spectral for the schemes stepped in
/// Fourier space, direct for the decoupled equation.
#[derive(Debug, Clone)]
pub enum FieldState {
    Direct(RealField),
    Spectral(SpectralField),
}

/// One realization's stepping engine with the per-mode implicit factors
/// precomputed. Configurations with a vanishing implicit factor are rejected
/// here, before any stepping.
#[derive(Debug, Clone)]
pub struct Solver {
    grid: GridSpec,
    config: SchemeConfig,
    step_index: usize,
    state: FieldState,
    /// Per-mode numerator factor (spectral schemes).
    numer: Vec<f64>,
    /// Per-mode denominator factor (spectral schemes).
    denom: Vec<f64>,
}

impl Solver {
    pub fn new(config: &SchemeConfig, grid: GridSpec, ic: &InitialCondition) -> Result<Self> {
        let u0 = ic.sample(grid)?;
        let dt = config.dt();
        let half = 0.5 * dt;
        let (numer, denom, state) = match config.equation {
            Equation::Heat => {
                let mut numer = Vec::with_capacity(grid.num_points());
                let mut denom = Vec::with_capacity(grid.num_points());
                for idx in 0..grid.num_points() {
                    let a = config.g + config.alpha * grid.wave_sq(idx) as f64;
                    numer.push(1.0 - half * a);
                    denom.push(1.0 + half * a);
                }
                (numer, denom, FieldState::Spectral(forward_dft(&u0)))
            }
            Equation::AllenCahn => {
                let mut numer = Vec::with_capacity(grid.num_points());
                let mut denom = Vec::with_capacity(grid.num_points());
                for idx in 0..grid.num_points() {
                    let a = config.g - config.alpha * grid.wave_sq(idx) as f64;
                    let den = 1.0 - half * a;
                    if den == 0.0 {
                        return Err(SpdeError::Config(format!(
                            "implicit factor vanishes at |k|^2 = {}: adjust dt, g or alpha",
                            grid.wave_sq(idx)
                        )));
                    }
                    numer.push(1.0 + half * a);
                    denom.push(den);
                }
                (numer, denom, FieldState::Spectral(forward_dft(&u0)))
            }
            Equation::DecoupledAc => {
                if config.g * dt == 2.0 {
                    return Err(SpdeError::Config(
                        "implicit factor 1 - g dt / 2 vanishes: g dt = 2".into(),
                    ));
                }
                (Vec::new(), Vec::new(), FieldState::Direct(u0))
            }
        };
        Ok(Solver {
            grid,
            config: *config,
            step_index: 0,
            state,
            numer,
            denom,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    /// Current field in direct space.
    pub fn current_field(&self) -> Result<RealField> {
        match &self.state {
            FieldState::Direct(f) => Ok(f.clone()),
            FieldState::Spectral(f) => inverse_dft(f),
        }
    }

    /// Advance one step, consuming the given Wiener increment.
    pub fn step(&mut self, noise: &NoiseIncrement) -> Result<()> {
        if noise.field.grid() != self.grid {
            return Err(SpdeError::GridMismatch(
                "noise increment sampled on a different grid".into(),
            ));
        }
        match self.config.equation {
            Equation::Heat => self.step_linear_spectral(noise),
            Equation::AllenCahn => self.step_allen_cahn(noise),
            Equation::DecoupledAc => self.step_decoupled(noise),
        }
        self.step_index += 1;
        Ok(())
    }

    fn spectral_noise(&self, noise: &NoiseIncrement) -> Option<SpectralField> {
        if noise.field.max_abs() == 0.0 {
            None
        } else {
            Some(forward_dft(&noise.field))
        }
    }

    fn step_linear_spectral(&mut self, noise: &NoiseIncrement) {
        let w = self.spectral_noise(noise);
        let FieldState::Spectral(u) = &mut self.state else {
            unreachable!("heat state is spectral")
        };
        match w {
            Some(w) => {
                for ((c, wk), (num, den)) in u
                    .coeffs_mut()
                    .iter_mut()
                    .zip(w.coeffs())
                    .zip(self.numer.iter().zip(&self.denom))
                {
                    *c = (*c * *num + wk) / *den;
                }
            }
            None => {
                for (c, (num, den)) in u
                    .coeffs_mut()
                    .iter_mut()
                    .zip(self.numer.iter().zip(&self.denom))
                {
                    *c = *c * (*num / *den);
                }
            }
        }
    }

    fn step_decoupled(&mut self, noise: &NoiseIncrement) {
        let g_dt = self.config.g * noise.dt;
        let lin = 1.0 + 0.5 * g_dt;
        let inv = 1.0 / (1.0 - 0.5 * g_dt);
        let FieldState::Direct(u) = &mut self.state else {
            unreachable!("decoupled state is direct")
        };
        for (v, w) in u.values_mut().iter_mut().zip(noise.field.values()) {
            let cube = *v * *v * *v;
            *v = (*v * lin - g_dt * cube + w) * inv;
        }
    }

    fn step_allen_cahn(&mut self, noise: &NoiseIncrement) {
        let g_dt = self.config.g * noise.dt;
        let dealias = self.config.dealias;
        let w = self.spectral_noise(noise);
        let FieldState::Spectral(u) = &mut self.state else {
            unreachable!("phase-field state is spectral")
        };
        // cubic term <u^3, e_k>: inverse transform, cube pointwise, forward
        // transform, masked on both sides when dealiasing is on
        let band_limited;
        let cube_input = if dealias {
            band_limited = two_thirds_dealias(u);
            &band_limited
        } else {
            &*u
        };
        let mut direct = inverse_dft_unchecked(cube_input);
        for v in direct.values_mut() {
            *v = *v * *v * *v;
        }
        let mut cube = forward_dft(&direct);
        if dealias {
            cube = two_thirds_dealias(&cube);
        }
        let zero = Complex64::ZERO;
        for (idx, c) in u.coeffs_mut().iter_mut().enumerate() {
            let wk = w.as_ref().map_or(zero, |w| w.coeffs()[idx]);
            *c = (*c * self.numer[idx] - g_dt * cube.coeffs()[idx] + wk) / self.denom[idx];
        }
    }
}

/// Integrate to `t = T`, consuming increments `0 .. M-1` of the realization's
/// noise stream, and return the direct-space field at the final time.
pub fn integrate(
    config: &SchemeConfig,
    ic: &InitialCondition,
    spec: &NoiseSpec,
    grid: GridSpec,
) -> Result<RealField> {
    let mut solver = Solver::new(config, grid, ic)?;
    let dt = config.dt();
    for m in 0..config.steps {
        let inc = sample_increment(grid, spec, dt, m as u64);
        solver.step(&inc)?;
    }
    let field = solver.current_field()?;
    if !field.is_finite() {
        return Err(SpdeError::Numerical(
            "trajectory left the finite range".into(),
        ));
    }
    Ok(field)
}

/// Like [`integrate`], but additionally records the field after each step
/// index listed in `schedule` (0 records the initial condition).
pub fn integrate_with_snapshots(
    config: &SchemeConfig,
    ic: &InitialCondition,
    spec: &NoiseSpec,
    grid: GridSpec,
    schedule: &[usize],
) -> Result<(RealField, Vec<(usize, RealField)>)> {
    let mut solver = Solver::new(config, grid, ic)?;
    let dt = config.dt();
    let mut snapshots = Vec::new();
    if schedule.contains(&0) {
        snapshots.push((0, solver.current_field()?));
    }
    for m in 0..config.steps {
        let inc = sample_increment(grid, spec, dt, m as u64);
        solver.step(&inc)?;
        if schedule.contains(&(m + 1)) {
            snapshots.push((m + 1, solver.current_field()?));
        }
    }
    let field = solver.current_field()?;
    if !field.is_finite() {
        return Err(SpdeError::Numerical(
            "trajectory left the finite range".into(),
        ));
    }
    Ok((field, snapshots))
}

/// Integrate with externally supplied increments (one per step). Used to run
/// several step sizes on a shared Wiener path.
pub fn integrate_with_increments(
    config: &SchemeConfig,
    ic: &InitialCondition,
    increments: &[NoiseIncrement],
    grid: GridSpec,
) -> Result<RealField> {
    if increments.len() != config.steps {
        return Err(SpdeError::Config(format!(
            "{} increments supplied for {} steps",
            increments.len(),
            config.steps
        )));
    }
    let mut solver = Solver::new(config, grid, ic)?;
    for inc in increments {
        solver.step(inc)?;
    }
    solver.current_field()
}

/// Result of a time-step self-convergence comparison.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceReport {
    /// `|| u_{2dt} - u_{dt} ||_0`
    pub diff_coarse: f64,
    /// `|| u_{dt} - u_{dt/2} ||_0`
    pub diff_fine: f64,
    /// `diff_coarse / diff_fine`; `None` when the fine difference vanishes.
    pub ratio: Option<f64>,
}

/// Integrate with step sizes `2 dt`, `dt` and `dt/2` on one shared Wiener
/// path and compare the final fields pairwise. The fine path is sampled at
/// `dt/2` and the coarser increments are sums of the fine ones, so all three
/// runs see the same underlying noise.
pub fn self_convergence_check(
    config: &SchemeConfig,
    ic: &InitialCondition,
    spec: &NoiseSpec,
    grid: GridSpec,
) -> Result<ConvergenceReport> {
    if config.steps == 0 || config.steps % 2 != 0 {
        return Err(SpdeError::Config(format!(
            "self-convergence needs an even positive step count, got {}",
            config.steps
        )));
    }
    let fine_steps = 2 * config.steps;
    let dt_fine = config.t_final / fine_steps as f64;
    let fine: Vec<NoiseIncrement> = (0..fine_steps)
        .map(|m| sample_increment(grid, spec, dt_fine, m as u64))
        .collect();
    let mid: Vec<NoiseIncrement> = fine
        .chunks(2)
        .map(aggregate_increments)
        .collect::<Result<_>>()?;
    let coarse: Vec<NoiseIncrement> = mid
        .chunks(2)
        .map(aggregate_increments)
        .collect::<Result<_>>()?;

    let mut cfg_fine = *config;
    cfg_fine.steps = fine_steps;
    let mut cfg_coarse = *config;
    cfg_coarse.steps = config.steps / 2;

    let u_fine = integrate_with_increments(&cfg_fine, ic, &fine, grid)?;
    let u_mid = integrate_with_increments(config, ic, &mid, grid)?;
    let u_coarse = integrate_with_increments(&cfg_coarse, ic, &coarse, grid)?;

    let l2_diff = |a: &RealField, b: &RealField| -> f64 {
        let sq: f64 = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        (grid.cell_volume() * sq).sqrt()
    };
    let diff_coarse = l2_diff(&u_coarse, &u_mid);
    let diff_fine = l2_diff(&u_mid, &u_fine);
    let ratio = (diff_fine > 0.0).then(|| diff_coarse / diff_fine);
    Ok(ConvergenceReport {
        diff_coarse,
        diff_fine,
        ratio,
    })
}

/// Discrete Lyapunov functional of the deterministic flow,
/// `E[u] = a/2 ||grad u||^2 + g sum_j V(u_j) dx^d` with the double well
/// `V(x) = x^4/4 - x^2/2`. Nonincreasing along noiseless trajectories.
pub fn gradient_flow_energy(u: &RealField, alpha: f64, g: f64) -> f64 {
    let grid = u.grid();
    let hat = forward_dft(u);
    let grad_sq: f64 = hat
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| grid.wave_sq(idx) as f64 * c.norm_sqr())
        .sum();
    let potential: f64 = u
        .values()
        .iter()
        .map(|&v| 0.25 * v.powi(4) - 0.5 * v * v)
        .sum();
    grid.cell_volume() * (0.5 * alpha * grad_sq + g * potential)
}
