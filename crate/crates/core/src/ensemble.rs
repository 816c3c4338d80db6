//! Seeded Monte Carlo ensembles over grids of increasing resolution, their
//! aggregation into spectra / interval statistics with error bars, the
//! figure presets, slope fits, prediction overlays, and the export surface
//! (CSV artifacts plus a reproducibility manifest).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::error::{Result, SpdeError};
use crate::grid::{interval_averages, GridSpec, RealField, SobolevOrder};
use crate::io::{fmt_f64, sha256_file, write_field_snapshot};
use crate::noise::{realization_seed, NoiseSpec};
use crate::renorm::PredictionCurve;
use crate::solver::{integrate, Equation, InitialCondition, SchemeConfig};
use crate::spectrum::radial_energy_density;

/// Figure-reproduction presets and the cheap linear-equation validation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig4F,
    Heat1dValidation,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig4F,
        Preset::Heat1dValidation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig4F => "fig4f",
            Preset::Heat1dValidation => "heat1d_validation",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = SpdeError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| SpdeError::Config(format!("unknown preset {s:?}")))
    }
}

/// A full experiment: scheme parameters, the list of grid resolutions, the
/// realization count and the seeding.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    pub equation: Equation,
    pub dim: usize,
    pub n_values: Vec<usize>,
    pub alpha: f64,
    pub g: f64,
    pub sigma: f64,
    pub t_final: f64,
    pub steps: usize,
    pub dealias: bool,
    pub ic: InitialCondition,
    pub realizations: usize,
    pub master_seed: u64,
    /// Collect x1-interval integrals with this many intervals per realization.
    pub collect_intervals: Option<usize>,
    /// Keep the final field of realization 0 for each resolution.
    pub save_final_fields: bool,
}

impl ExperimentConfig {
    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        Ok(SchemeConfig::new(
            self.equation,
            self.alpha,
            self.g,
            self.sigma,
            self.t_final,
            self.steps,
        )?
        .with_dealias(self.dealias))
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(SpdeError::Config("need at least one realization".into()));
        }
        if self.n_values.is_empty() {
            return Err(SpdeError::Config("no grid resolutions requested".into()));
        }
        for &n in &self.n_values {
            GridSpec::new(self.dim, n)?;
        }
        self.scheme_config().map(|_| ())
    }

    /// Restore the caption-exact resolution list (up to `N = 2^11`); the
    /// desk-scale default caps the grids at `N = 256`.
    pub fn with_full_resolution(mut self) -> Self {
        if let Some(p) = self.preset {
            self.n_values = preset_n_values(p, true);
        }
        self
    }
}

fn preset_n_values(p: Preset, full: bool) -> Vec<usize> {
    match p {
        Preset::Fig1 | Preset::Fig2 | Preset::Fig3 => {
            let max = if full { 2048 } else { 256 };
            let mut n = 32;
            let mut out = Vec::new();
            while n <= max {
                out.push(n);
                n *= 2;
            }
            out
        }
        Preset::Fig4 | Preset::Fig4F => {
            if full {
                vec![8, 32, 128, 512]
            } else {
                vec![8, 32, 128]
            }
        }
        Preset::Heat1dValidation => vec![64],
    }
}

/// Caption-exact experiment configuration at desk scale.
pub fn preset(p: Preset) -> ExperimentConfig {
    use std::f64::consts::PI;
    let base = |equation, alpha, g, sigma, t_final, steps, ic, realizations| ExperimentConfig {
        preset: Some(p),
        equation,
        dim: 2,
        n_values: preset_n_values(p, false),
        alpha,
        g,
        sigma,
        t_final,
        steps,
        dealias: equation == Equation::AllenCahn,
        ic,
        realizations,
        master_seed: 0,
        collect_intervals: None,
        save_final_fields: false,
    };
    match p {
        Preset::Fig1 => base(
            Equation::Heat,
            0.5,
            1.0,
            PI / 50.0,
            1.0,
            2000,
            InitialCondition::Zero,
            40,
        ),
        Preset::Fig2 => base(
            Equation::DecoupledAc,
            0.0,
            0.1,
            PI / 5.0,
            2.0,
            4000,
            InitialCondition::Zero,
            40,
        ),
        // the caption's noise amplitude 2 pi / 5 is taken as sigma
        Preset::Fig3 => base(
            Equation::AllenCahn,
            6.4e-3,
            0.5,
            2.0 * PI / 5.0,
            1.0,
            2000,
            InitialCondition::Zero,
            40,
        ),
        Preset::Fig4 => {
            let mut cfg = base(
                Equation::AllenCahn,
                6.4e-3,
                0.5,
                PI / 8.0,
                1.0,
                1000,
                InitialCondition::Sin2X,
                1,
            );
            cfg.save_final_fields = true;
            cfg
        }
        Preset::Fig4F => {
            let mut cfg = base(
                Equation::AllenCahn,
                6.4e-3,
                0.5,
                PI / 8.0,
                1.0,
                1000,
                InitialCondition::Sin2X,
                120,
            );
            cfg.collect_intervals = Some(4);
            cfg
        }
        Preset::Heat1dValidation => {
            let mut cfg = base(
                Equation::Heat,
                1.0,
                1.0,
                0.5,
                1.0,
                1000,
                InitialCondition::Zero,
                400,
            );
            cfg.dim = 1;
            cfg.n_values = preset_n_values(p, false);
            cfg
        }
    }
}

/// Sample mean and standard error of the mean (zero for one sample).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarStat {
    pub mean: f64,
    pub stderr: f64,
}

fn scalar_stat(samples: &[f64]) -> ScalarStat {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let stderr = if n < 2 {
        0.0
    } else {
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    ScalarStat { mean, stderr }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinStat {
    pub kappa: usize,
    pub mean_energy: f64,
    pub stderr: f64,
    pub cardinality: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumStats {
    pub n: usize,
    pub bins: Vec<BinStat>,
}

impl SpectrumStats {
    pub fn bin(&self, kappa: usize) -> Option<&BinStat> {
        self.bins.iter().find(|b| b.kappa == kappa)
    }

    /// Bins in the conventional plotting range `kappa = 1, ..., N/2 - 1`.
    pub fn plot_bins(&self) -> &[BinStat] {
        let limit = self.n / 2 - 1;
        let end = self.bins.iter().take_while(|b| b.kappa <= limit).count();
        &self.bins[..end]
    }

    /// Largest error bar over the bins, the per-resolution figure annotation.
    pub fn largest_stderr(&self) -> f64 {
        self.bins.iter().fold(0.0, |m, b| m.max(b.stderr))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalStats {
    pub n: usize,
    pub entries: Vec<ScalarStat>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentStats {
    pub n: usize,
    pub site_second_moment: ScalarStat,
    pub norm_sq: ScalarStat,
}

/// Aggregated ensemble output. Means and error bars are reduced in
/// realization order, so the result is identical for any worker count.
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub realizations: usize,
    pub spectra: Vec<SpectrumStats>,
    pub intervals: Vec<IntervalStats>,
    pub moments: Vec<MomentStats>,
    pub final_fields: Vec<(usize, RealField)>,
}

impl EnsembleStats {
    pub fn spectrum(&self, n: usize) -> Option<&SpectrumStats> {
        self.spectra.iter().find(|s| s.n == n)
    }

    pub fn interval(&self, n: usize) -> Option<&IntervalStats> {
        self.intervals.iter().find(|s| s.n == n)
    }

    pub fn moment(&self, n: usize) -> Option<&MomentStats> {
        self.moments.iter().find(|s| s.n == n)
    }
}

struct RealizationOutput {
    bin_energies: Option<Vec<f64>>,
    intervals: Option<Vec<f64>>,
    site_m2: f64,
    norm_sq: f64,
    field: Option<RealField>,
}

/// Run every (resolution, realization) pair of the experiment and aggregate.
/// Realizations are independent tasks; any failure aborts the ensemble with
/// the realization recorded in the error.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<EnsembleStats> {
    config.validate()?;
    let scheme = config.scheme_config()?;
    let mut spectra = Vec::new();
    let mut intervals = Vec::new();
    let mut moments = Vec::new();
    let mut final_fields = Vec::new();
    for &n in &config.n_values {
        let grid = GridSpec::new(config.dim, n)?;
        let outputs: Vec<RealizationOutput> = (0..config.realizations)
            .into_par_iter()
            .map(|r| -> Result<RealizationOutput> {
                let spec = NoiseSpec::new(config.sigma, config.master_seed, r as u64)?;
                let field = integrate(&scheme, &config.ic, &spec, grid).map_err(|e| {
                    SpdeError::Numerical(format!("realization {r} at N={n} failed: {e}"))
                })?;
                let bin_energies = if config.dim == 2 {
                    let spectrum = radial_energy_density(&crate::dft::forward_dft(&field))?;
                    Some(spectrum.bins().iter().map(|b| b.energy).collect())
                } else {
                    None
                };
                let ivals = match config.collect_intervals {
                    Some(k) => Some(interval_averages(&field, k)?),
                    None => None,
                };
                Ok(RealizationOutput {
                    bin_energies,
                    intervals: ivals,
                    site_m2: field.site_second_moment(),
                    norm_sq: field.sobolev_norm_sq(SobolevOrder::L2),
                    field: (config.save_final_fields && r == 0).then_some(field),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        if let Some(first) = outputs[0].bin_energies.as_ref() {
            let template = radial_energy_density(&crate::dft::forward_dft(&RealField::zeros(
                grid,
            )))?;
            let bins = template
                .bins()
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    debug_assert!(i < first.len());
                    let samples: Vec<f64> = outputs
                        .iter()
                        .map(|o| o.bin_energies.as_ref().expect("d=2 output")[i])
                        .collect();
                    let stat = scalar_stat(&samples);
                    BinStat {
                        kappa: b.kappa,
                        mean_energy: stat.mean,
                        stderr: stat.stderr,
                        cardinality: b.cardinality,
                    }
                })
                .collect();
            spectra.push(SpectrumStats { n, bins });
        }

        if let Some(k) = config.collect_intervals {
            let entries = (0..k)
                .map(|i| {
                    let samples: Vec<f64> = outputs
                        .iter()
                        .map(|o| o.intervals.as_ref().expect("intervals requested")[i])
                        .collect();
                    scalar_stat(&samples)
                })
                .collect();
            intervals.push(IntervalStats { n, entries });
        }

        let m2: Vec<f64> = outputs.iter().map(|o| o.site_m2).collect();
        let nsq: Vec<f64> = outputs.iter().map(|o| o.norm_sq).collect();
        moments.push(MomentStats {
            n,
            site_second_moment: scalar_stat(&m2),
            norm_sq: scalar_stat(&nsq),
        });

        for o in outputs {
            if let Some(f) = o.field {
                final_fields.push((n, f));
            }
        }
    }
    Ok(EnsembleStats {
        realizations: config.realizations,
        spectra,
        intervals,
        moments,
        final_fields,
    })
}

/// Run the ensemble on a dedicated thread pool of the given size.
pub fn run_ensemble_with_workers(config: &ExperimentConfig, workers: usize) -> Result<EnsembleStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SpdeError::Config(format!("cannot build {workers}-thread pool: {e}")))?;
    pool.install(|| run_ensemble(config))
}

#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> FitResult {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    FitResult {
        slope,
        intercept,
        r_squared,
    }
}

/// Least-squares fit of `log E` against `log kappa` over the requested
/// annulus range of one resolution's mean spectrum.
pub fn fit_loglog_slope(
    stats: &EnsembleStats,
    n: usize,
    kappa_range: (usize, usize),
) -> Result<FitResult> {
    let spectrum = stats
        .spectrum(n)
        .ok_or_else(|| SpdeError::Config(format!("no spectrum for N={n}")))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for b in &spectrum.bins {
        if b.kappa < kappa_range.0 || b.kappa > kappa_range.1 || b.cardinality == 0 {
            continue;
        }
        if b.mean_energy <= 0.0 {
            return Err(SpdeError::Domain(format!(
                "nonpositive energy {} in bin kappa={} of N={n}",
                b.mean_energy, b.kappa
            )));
        }
        xs.push((b.kappa as f64).ln());
        ys.push(b.mean_energy.ln());
    }
    if xs.len() < 3 {
        return Err(SpdeError::Config(format!(
            "need at least 3 bins in [{}, {}], found {}",
            kappa_range.0,
            kappa_range.1,
            xs.len()
        )));
    }
    Ok(linear_fit(&xs, &ys))
}

/// One row of a measurement / prediction comparison.
#[derive(Debug, Clone, Copy)]
pub struct OverlayRow {
    pub x: f64,
    pub measured: f64,
    pub predicted: f64,
    /// `measured / predicted`; undefined (not infinite) where the prediction
    /// vanishes.
    pub ratio: Option<f64>,
}

/// Join a resolution's mean spectrum with an analytic curve on the shared
/// kappa axis.
pub fn overlay_prediction(
    stats: &EnsembleStats,
    n: usize,
    curve: &PredictionCurve,
) -> Result<Vec<OverlayRow>> {
    let spectrum = stats
        .spectrum(n)
        .ok_or_else(|| SpdeError::Config(format!("no spectrum for N={n}")))?;
    let mut rows = Vec::new();
    for b in &spectrum.bins {
        let kappa = b.kappa as f64;
        if let Some(i) = curve.xs.iter().position(|&x| (x - kappa).abs() < 1e-9) {
            let predicted = curve.values[i];
            rows.push(OverlayRow {
                x: kappa,
                measured: b.mean_energy,
                predicted,
                ratio: (predicted != 0.0).then(|| b.mean_energy / predicted),
            });
        }
    }
    if rows.is_empty() {
        return Err(SpdeError::Config(
            "overlay axes share no abscissae".into(),
        ));
    }
    Ok(rows)
}

/// Configuration echo recorded in the run manifest.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ConfigEcho {
    pub preset: Option<String>,
    pub equation: String,
    pub dim: usize,
    pub n_values: Vec<usize>,
    pub alpha: f64,
    pub g: f64,
    pub sigma: f64,
    pub t_final: f64,
    pub steps: usize,
    pub dealias: bool,
    pub ic: String,
    pub realizations: usize,
    pub collect_intervals: Option<usize>,
}

impl ConfigEcho {
    fn of(config: &ExperimentConfig) -> Self {
        ConfigEcho {
            preset: config.preset.map(|p| p.name().to_string()),
            equation: config.equation.token().to_string(),
            dim: config.dim,
            n_values: config.n_values.clone(),
            alpha: config.alpha,
            g: config.g,
            sigma: config.sigma,
            t_final: config.t_final,
            steps: config.steps,
            dealias: config.dealias,
            ic: config.ic.token().to_string(),
            realizations: config.realizations,
            collect_intervals: config.collect_intervals,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run: configuration echo, the master seed
/// and the derived per-realization seeds, artifact checksums and timing.
/// Written last, as the commit marker of an export.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub created_unix: u64,
    pub wall_clock_seconds: f64,
    pub master_seed: u64,
    pub realization_seeds: Vec<u64>,
    pub config: ConfigEcho,
    pub artifacts: Vec<ArtifactRecord>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, wall_clock_seconds: f64) -> Self {
        RunManifest {
            version: format!("torus-spde-core {}", env!("CARGO_PKG_VERSION")),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            wall_clock_seconds,
            master_seed: config.master_seed,
            realization_seeds: (0..config.realizations as u64)
                .map(|r| realization_seed(config.master_seed, r))
                .collect(),
            config: ConfigEcho::of(config),
            artifacts: Vec::new(),
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let file = File::create(path).map_err(|e| SpdeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, manifest)
        .map_err(|e| SpdeError::Config(format!("manifest serialization: {e}")))?;
    w.write_all(b"\n").map_err(|e| SpdeError::io(path, e))?;
    w.flush().map_err(|e| SpdeError::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| SpdeError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| SpdeError::Config(format!("{}: bad manifest: {e}", path.display())))
}

/// Ensemble spectra, one row per (resolution, annulus).
pub fn write_spectra_csv(path: &Path, stats: &EnsembleStats) -> Result<()> {
    let file = File::create(path).map_err(|e| SpdeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| SpdeError::io(path, e);
    writeln!(w, "N,kappa,mean_energy,stderr,cardinality").map_err(io_err)?;
    for s in &stats.spectra {
        for b in &s.bins {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.n,
                b.kappa,
                fmt_f64(b.mean_energy),
                fmt_f64(b.stderr),
                b.cardinality
            )
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

pub fn read_spectra_csv(path: &Path) -> Result<Vec<SpectrumStats>> {
    let text = std::fs::read_to_string(path).map_err(|e| SpdeError::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("N,kappa,mean_energy,stderr,cardinality") => {}
        other => {
            return Err(SpdeError::Config(format!(
                "{}: unexpected spectra header {other:?}",
                path.display()
            )))
        }
    }
    let mut out: Vec<SpectrumStats> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(SpdeError::Config(format!(
                "{}: expected 5 columns",
                path.display()
            )));
        }
        let bad = |what: &str| SpdeError::Config(format!("{}: bad {what}", path.display()));
        let n: usize = fields[0].parse().map_err(|_| bad("N"))?;
        let bin = BinStat {
            kappa: fields[1].parse().map_err(|_| bad("kappa"))?,
            mean_energy: fields[2].parse().map_err(|_| bad("mean_energy"))?,
            stderr: fields[3].parse().map_err(|_| bad("stderr"))?,
            cardinality: fields[4].parse().map_err(|_| bad("cardinality"))?,
        };
        match out.last_mut() {
            Some(s) if s.n == n => s.bins.push(bin),
            _ => out.push(SpectrumStats { n, bins: vec![bin] }),
        }
    }
    Ok(out)
}

/// Interval integrals, one row per (resolution, interval).
pub fn write_intervals_csv(path: &Path, stats: &EnsembleStats) -> Result<()> {
    let file = File::create(path).map_err(|e| SpdeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| SpdeError::io(path, e);
    writeln!(w, "N,interval_index,mean,stderr").map_err(io_err)?;
    for s in &stats.intervals {
        for (i, e) in s.entries.iter().enumerate() {
            writeln!(w, "{},{},{},{}", s.n, i, fmt_f64(e.mean), fmt_f64(e.stderr))
                .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// Per-site second moments and squared norms, one row per resolution.
pub fn write_moments_csv(path: &Path, stats: &EnsembleStats) -> Result<()> {
    let file = File::create(path).map_err(|e| SpdeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| SpdeError::io(path, e);
    writeln!(w, "N,site_second_moment,site_stderr,norm_sq,norm_stderr").map_err(io_err)?;
    for m in &stats.moments {
        writeln!(
            w,
            "{},{},{},{},{}",
            m.n,
            fmt_f64(m.site_second_moment.mean),
            fmt_f64(m.site_second_moment.stderr),
            fmt_f64(m.norm_sq.mean),
            fmt_f64(m.norm_sq.stderr)
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Write every artifact of an ensemble run into `dir` and finish with the
/// manifest. Returns the manifest path.
pub fn export_ensemble(
    dir: &Path,
    config: &ExperimentConfig,
    stats: &EnsembleStats,
    wall_clock_seconds: f64,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| SpdeError::io(dir, e))?;
    let mut written: Vec<PathBuf> = Vec::new();

    if !stats.spectra.is_empty() {
        let p = dir.join("spectra.csv");
        write_spectra_csv(&p, stats)?;
        written.push(p);
    }
    if !stats.intervals.is_empty() {
        let p = dir.join("intervals.csv");
        write_intervals_csv(&p, stats)?;
        written.push(p);
    }
    let p = dir.join("moments.csv");
    write_moments_csv(&p, stats)?;
    written.push(p);

    for (n, field) in &stats.final_fields {
        let p = dir.join(format!("field_n{n}.tspd"));
        write_field_snapshot(&p, field)?;
        written.push(p);
    }

    let mut manifest = RunManifest::new(config, wall_clock_seconds);
    for p in &written {
        manifest.artifacts.push(ArtifactRecord {
            path: p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: sha256_file(p)?,
        });
    }
    let manifest_path = dir.join("manifest.json");
    write_manifest(&manifest_path, &manifest)?;
    Ok(manifest_path)
}
