//! Simulation and analysis toolkit for white-noise-driven parabolic SPDEs on
//! the periodic torus.
//!
//! The crate has five parts:
//!
//! * [`grid`], [`dft`], [`sobolev`], [`spectrum`], [`io`] — torus grids, the
//!   symmetric-convention discrete Fourier transform, discrete Sobolev
//!   norms, radial energy binning, Two-Thirds dealiasing, test-function
//!   pairings and the file formats;
//! * [`noise`] — reproducible discrete space-time white noise with
//!   counter-based streams;
//! * [`solver`] — IMEX time stepping for the stochastic heat equation, the
//!   diffusion-free double-well equation, and the full stochastic
//!   phase-field equation, plus time-step self-convergence checks;
//! * [`renorm`] — the closed-form side: mode covariances, truncated norm
//!   series, the renormalization constant `C_N`, predicted spectral decay
//!   and the stationary double-well moments;
//! * [`ensemble`] — seeded parallel Monte Carlo ensembles, spectrum and
//!   interval statistics with error bars, figure presets, slope fits,
//!   prediction overlays and artifact export.

pub mod dft;
pub mod ensemble;
pub mod error;
pub mod grid;
pub mod io;
pub mod noise;
pub mod renorm;
pub mod sobolev;
pub mod solver;
pub mod spectrum;

pub use dft::{forward_dft, inverse_dft};
pub use error::{Result, SpdeError};
pub use grid::{
    interval_averages, pair_with_test_function, GridSpec, RealField, SobolevOrder, SpectralField,
};
pub use noise::{
    aggregate_increments, realization_seed, sample_increment, site_std_dev, spectral_increment,
    truncate_noise, NoiseIncrement, NoiseSpec,
};
pub use renorm::{
    asymptotic_cn, asymptotic_cn_leading, heat_norm_series, ou_covariance, predicted_mode_energy,
    predicted_norm, solve_cn, stationary_moment_bessel, stationary_moment_quadrature,
    stationary_site_constant, stationary_site_constant_with_rate, theorem2_scaling, LimitClass,
    PredictionCurve, RenormResult, SeriesClass, StationaryDensity,
};
pub use solver::{
    gradient_flow_energy, integrate, integrate_with_increments, integrate_with_snapshots,
    self_convergence_check, ConvergenceReport, Equation, FieldState, InitialCondition,
    SchemeConfig, Solver,
};
pub use spectrum::{
    binned_sobolev_norm_sq, max_annulus, radial_energy_density, two_thirds_dealias, RadialBin,
    RadialSpectrum,
};
pub use ensemble::{
    export_ensemble, fit_loglog_slope, overlay_prediction, preset, run_ensemble,
    run_ensemble_with_workers, EnsembleStats, ExperimentConfig, FitResult, Preset, RunManifest,
};
