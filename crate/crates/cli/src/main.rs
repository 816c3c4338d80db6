//! Command-line driver: single trajectories, Monte Carlo ensembles,
//! analytic prediction curves, and spectrum analysis.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use torus_spde_core as core;
use torus_spde_core::{SpdeError, SobolevOrder};

#[derive(Parser)]
#[command(name = "torus-spde", version, about = "Simulate and analyze white-noise-driven parabolic SPDEs on the periodic torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a single realization and write the final field snapshot.
    Simulate(SimulateArgs),
    /// Run a preset Monte Carlo ensemble and export its statistics.
    Ensemble(EnsembleArgs),
    /// Evaluate analytic prediction curves.
    Renorm(RenormArgs),
    /// Fit slopes and overlay predictions on exported spectra.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Equation: heat, dac (decoupled), or ac (full phase field).
    #[arg(long)]
    equation: String,
    /// Torus dimension (1 or 2).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Grid points per axis (even).
    #[arg(long)]
    n: usize,
    /// Time step.
    #[arg(long)]
    dt: f64,
    /// Final time.
    #[arg(long, value_name = "T")]
    t_final: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// Initial condition: zero, sin2x, or file:<snapshot path>.
    #[arg(long, default_value = "zero")]
    ic: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the cubic-term dealiasing (on/off).
    #[arg(long)]
    dealias: Option<Switch>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EnsembleArgs {
    /// One of fig1, fig2, fig3, fig4, fig4f, heat1d_validation.
    #[arg(long)]
    preset: String,
    /// Restore the caption-exact resolutions (up to N = 2048; long runtime).
    #[arg(long)]
    full: bool,
    /// Override the preset's realization count.
    #[arg(long)]
    realizations: Option<usize>,
    /// Worker threads (defaults to the available cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenormArgs {
    #[arg(long)]
    sigma: f64,
    /// Spectral cutoff.
    #[arg(long)]
    n: usize,
    /// Which curve to evaluate.
    #[arg(long, value_enum, default_value_t = Curve::Cn)]
    curve: Curve,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Ensemble spectra CSV (N,kappa,mean_energy,stderr,cardinality).
    #[arg(long)]
    spectra: PathBuf,
    /// Fit range `kmin:kmax` for the log-log slope.
    #[arg(long)]
    fit: Option<String>,
    /// Prediction curve CSV to overlay (x,value,source_equation).
    #[arg(long)]
    overlay: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    /// Fixed-point constant against the cutoff.
    Cn,
    /// Predicted mode energy against the annulus radius.
    ModeEnergy,
    /// Predicted squared L2 norm against the cutoff.
    Norm,
    /// Partial sums of the linear-equation norm series.
    HeatSeries,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                SpdeError::Config(_)
                | SpdeError::GridMismatch(_)
                | SpdeError::UnsupportedDimension(_)
                | SpdeError::Domain(_) => 2,
                SpdeError::SymmetryViolation(_) | SpdeError::Numerical(_) => 3,
                SpdeError::Io { .. } => 4,
            })
        }
    }
}

fn run(cli: Cli) -> core::Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Ensemble(args) => ensemble(args),
        Command::Renorm(args) => renorm(args),
        Command::Analyze(args) => analyze(args),
    }
}

fn parse_ic(token: &str) -> core::Result<core::InitialCondition> {
    match token {
        "zero" => Ok(core::InitialCondition::Zero),
        "sin2x" => Ok(core::InitialCondition::Sin2X),
        other => match other.strip_prefix("file:") {
            Some(path) => Ok(core::InitialCondition::Field(core::io::read_field_snapshot(
                std::path::Path::new(path),
            )?)),
            None => Err(SpdeError::Config(format!(
                "initial condition must be zero, sin2x or file:<path>, got {other:?}"
            ))),
        },
    }
}

fn simulate(args: SimulateArgs) -> core::Result<()> {
    let started = Instant::now();
    let equation: core::Equation = args.equation.parse()?;
    let grid = core::GridSpec::new(args.dim, args.n)?;
    if args.dt <= 0.0 || args.t_final < args.dt {
        return Err(SpdeError::Config(format!(
            "need 0 < dt <= t_final, got dt={}, t_final={}",
            args.dt, args.t_final
        )));
    }
    let steps = (args.t_final / args.dt).round() as usize;
    let mut scheme =
        core::SchemeConfig::new(equation, args.alpha, args.g, args.sigma, args.t_final, steps)?;
    if let Some(flag) = args.dealias {
        scheme = scheme.with_dealias(matches!(flag, Switch::On));
    }
    let ic = parse_ic(&args.ic)?;
    let spec = core::NoiseSpec::new(args.sigma, args.seed, 0)?;

    let field = core::integrate(&scheme, &ic, &spec, grid)?;

    std::fs::create_dir_all(&args.out).map_err(|e| SpdeError::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let field_path = args.out.join("field.tspd");
    core::io::write_field_snapshot(&field_path, &field)?;
    println!("wrote {}", field_path.display());
    if args.dim == 2 {
        let spectrum = core::radial_energy_density(&core::forward_dft(&field))?;
        let spectrum_path = args.out.join("spectrum.csv");
        core::io::write_radial_spectrum_csv(&spectrum_path, &spectrum)?;
        println!("wrote {}", spectrum_path.display());
    }
    println!(
        "norm0_sq = {:.6e}, site second moment = {:.6e}",
        field.sobolev_norm_sq(SobolevOrder::L2),
        field.site_second_moment()
    );

    // single-realization manifest through the ensemble machinery
    let config = core::ExperimentConfig {
        preset: None,
        equation,
        dim: args.dim,
        n_values: vec![args.n],
        alpha: args.alpha,
        g: args.g,
        sigma: args.sigma,
        t_final: args.t_final,
        steps,
        dealias: scheme.dealias,
        ic,
        realizations: 1,
        master_seed: args.seed,
        collect_intervals: None,
        save_final_fields: false,
    };
    let mut manifest = core::RunManifest::new(&config, started.elapsed().as_secs_f64());
    for name in ["field.tspd", "spectrum.csv"] {
        let p = args.out.join(name);
        if p.exists() {
            manifest.artifacts.push(core::ensemble::ArtifactRecord {
                path: name.to_string(),
                sha256: core::io::sha256_file(&p)?,
            });
        }
    }
    let manifest_path = args.out.join("manifest.json");
    core::ensemble::write_manifest(&manifest_path, &manifest)?;
    println!("wrote {}", manifest_path.display());
    Ok(())
}

fn ensemble(args: EnsembleArgs) -> core::Result<()> {
    let started = Instant::now();
    let preset: core::Preset = args.preset.parse()?;
    let mut config = core::preset(preset);
    if args.full {
        config = config.with_full_resolution();
    }
    if let Some(r) = args.realizations {
        config.realizations = r;
    }
    config.master_seed = args.seed;

    let stats = match args.workers {
        Some(w) => core::run_ensemble_with_workers(&config, w)?,
        None => core::run_ensemble(&config)?,
    };
    let manifest_path =
        core::export_ensemble(&args.out, &config, &stats, started.elapsed().as_secs_f64())?;
    println!(
        "{}: {} realizations x N in {:?}, artifacts in {}",
        preset.name(),
        config.realizations,
        config.n_values,
        args.out.display()
    );
    println!("manifest: {}", manifest_path.display());
    Ok(())
}

fn renorm(args: RenormArgs) -> core::Result<()> {
    let curve = match args.curve {
        Curve::Cn => core::renorm::cn_curve(args.sigma, args.n)?,
        Curve::ModeEnergy => core::renorm::mode_energy_curve(args.sigma, args.n)?,
        Curve::Norm => core::renorm::norm_curve(args.sigma, args.n)?,
        Curve::HeatSeries => {
            core::renorm::heat_series_curve(2, args.sigma, 1.0, SobolevOrder::L2, args.n)?
        }
    };
    std::fs::create_dir_all(&args.out).map_err(|e| SpdeError::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let path = args.out.join("prediction.csv");
    core::renorm::write_prediction_csv(&path, &curve)?;
    println!("wrote {} ({} points, {})", path.display(), curve.xs.len(), curve.source);
    Ok(())
}

fn parse_fit_range(token: &str) -> core::Result<(usize, usize)> {
    let parts: Vec<&str> = token.split(':').collect();
    if parts.len() != 2 {
        return Err(SpdeError::Config(format!(
            "fit range must be kmin:kmax, got {token:?}"
        )));
    }
    let lo = parts[0]
        .parse()
        .map_err(|_| SpdeError::Config(format!("bad kmin {:?}", parts[0])))?;
    let hi = parts[1]
        .parse()
        .map_err(|_| SpdeError::Config(format!("bad kmax {:?}", parts[1])))?;
    Ok((lo, hi))
}

fn analyze(args: AnalyzeArgs) -> core::Result<()> {
    let spectra = core::ensemble::read_spectra_csv(&args.spectra)?;
    let stats = core::EnsembleStats {
        realizations: 0,
        spectra,
        intervals: vec![],
        moments: vec![],
        final_fields: vec![],
    };
    println!("N,bins,largest_stderr");
    for s in &stats.spectra {
        println!("{},{},{}", s.n, s.bins.len(), s.largest_stderr());
    }
    if let Some(token) = &args.fit {
        let range = parse_fit_range(token)?;
        println!("fit range kappa in [{}, {}]:", range.0, range.1);
        println!("N,slope,intercept,r_squared");
        for s in &stats.spectra {
            match core::fit_loglog_slope(&stats, s.n, range) {
                Ok(fit) => println!(
                    "{},{:.6},{:.6},{:.6}",
                    s.n, fit.slope, fit.intercept, fit.r_squared
                ),
                Err(e) => println!("{},skipped ({e})", s.n),
            }
        }
    }
    if let Some(path) = &args.overlay {
        let curve = core::renorm::read_prediction_csv(path)?;
        for s in &stats.spectra {
            match core::overlay_prediction(&stats, s.n, &curve) {
                Ok(rows) => {
                    println!("overlay N={} ({}):", s.n, curve.source);
                    println!("x,measured,predicted,ratio");
                    for row in rows {
                        match row.ratio {
                            Some(r) => println!(
                                "{},{:.6e},{:.6e},{:.4}",
                                row.x, row.measured, row.predicted, r
                            ),
                            None => println!(
                                "{},{:.6e},{:.6e},undefined",
                                row.x, row.measured, row.predicted
                            ),
                        }
                    }
                }
                Err(e) => println!("overlay N={} skipped ({e})", s.n),
            }
        }
    }
    Ok(())
}
