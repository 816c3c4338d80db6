//! Property tests over the measurement apparatus: transform round trips,
//! Parseval, binning partitions, dealiasing as a projection, pairing
//! bilinearity, and determinism of the ensemble layer.

mod common;

use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use torus_spde_core::*;

fn arb_grid() -> impl Strategy<Value = GridSpec> {
    (1usize..=2, prop::sample::select(vec![2usize, 4, 8, 16, 32]))
        .prop_map(|(d, n)| GridSpec::new(d, n).unwrap())
}

fn arb_field(grid: GridSpec) -> impl Strategy<Value = RealField> {
    prop::collection::vec(-10.0..10.0f64, grid.num_points())
        .prop_map(move |values| RealField::new(grid, values).unwrap())
}

fn arb_grid_field() -> impl Strategy<Value = RealField> {
    arb_grid().prop_flat_map(arb_field)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_within_ten_eps(f in arb_grid_field()) {
        let back = inverse_dft(&forward_dft(&f)).unwrap();
        let bound = 10.0 * f64::EPSILON * f.max_abs().max(1.0);
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= bound);
        }
    }

    #[test]
    fn parseval_identity(f in arb_grid_field()) {
        let spectral = f.sobolev_norm_sq(SobolevOrder::L2);
        let direct = f.riemann_norm_sq();
        prop_assert!((spectral - direct).abs() <= 1e-10 * spectral.max(1.0));
    }

    #[test]
    fn norm_monotone_in_order(f in arb_grid_field(), s1 in -3.0..3.0f64, s2 in -3.0..3.0f64) {
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let a = f.sobolev_norm_sq(SobolevOrder(lo));
        let b = f.sobolev_norm_sq(SobolevOrder(hi));
        prop_assert!(a <= b * (1.0 + 1e-12));
    }

    #[test]
    fn dealias_projects_and_never_grows(f in arb_grid_field()) {
        let hat = forward_dft(&f);
        let once = two_thirds_dealias(&hat);
        let twice = two_thirds_dealias(&once);
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.sobolev_norm_sq(SobolevOrder::L2)
            <= hat.sobolev_norm_sq(SobolevOrder::L2) * (1.0 + 1e-12));
    }

    #[test]
    fn pairing_is_bilinear_and_symmetric(
        grid in arb_grid(),
        a in -5.0..5.0f64,
        b in -5.0..5.0f64,
        seed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = RealField::from_fn(grid, |_, _| rng.random_range(-1.0..1.0));
        let g = RealField::from_fn(grid, |_, _| rng.random_range(-1.0..1.0));
        let phi = RealField::from_fn(grid, |_, _| rng.random_range(-1.0..1.0));
        let combo = RealField::new(
            grid,
            f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect(),
        ).unwrap();
        let lhs = pair_with_test_function(&combo, &phi).unwrap();
        let rhs = a * pair_with_test_function(&f, &phi).unwrap()
            + b * pair_with_test_function(&g, &phi).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        let sym = pair_with_test_function(&phi, &combo).unwrap();
        prop_assert!((lhs - sym).abs() <= 1e-12 * scale);
    }

    #[test]
    fn radial_bins_partition_every_grid(n in prop::sample::select(vec![4usize, 8, 16, 32, 64])) {
        let grid = GridSpec::new(2, n).unwrap();
        let spectrum = radial_energy_density(&SpectralField::zeros(grid)).unwrap();
        let total: usize = spectrum.bins().iter().map(|b| b.cardinality).sum();
        prop_assert_eq!(total, n * n);
        prop_assert_eq!(spectrum.bins().last().unwrap().kappa, max_annulus(n));
    }
}

#[test]
fn interval_sums_equal_unit_pairing() {
    let grid = GridSpec::new(2, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let f = RealField::from_fn(grid, |_, _| rng.random_range(-2.0..2.0));
    let one = RealField::from_fn(grid, |_, _| 1.0);
    for n_intervals in [2usize, 4, 8, 16] {
        let total: f64 = interval_averages(&f, n_intervals).unwrap().iter().sum();
        let paired = pair_with_test_function(&f, &one).unwrap();
        assert!((total - paired).abs() < 1e-11);
    }
}

#[test]
fn trajectories_and_increments_are_reproducible() {
    // same tuple -> bit-identical increments; same seeds -> bit-identical
    // trajectories, independent of the thread that runs them
    let grid = GridSpec::new(2, 16).unwrap();
    let spec = NoiseSpec::new(0.8, 1234, 7).unwrap();
    let inc_here = sample_increment(grid, &spec, 0.01, 3);
    let inc_there = std::thread::spawn(move || sample_increment(grid, &spec, 0.01, 3))
        .join()
        .unwrap();
    assert_eq!(inc_here, inc_there);

    let config = SchemeConfig::new(Equation::AllenCahn, 6.4e-3, 0.5, 0.8, 0.1, 20).unwrap();
    let run = move || integrate(&config, &InitialCondition::Sin2X, &spec, grid).unwrap();
    let a = run();
    let b = std::thread::spawn(run).join().unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn ensemble_statistics_do_not_depend_on_worker_count() {
    let config = ExperimentConfig {
        preset: None,
        equation: Equation::Heat,
        dim: 2,
        n_values: vec![16, 32],
        alpha: 0.5,
        g: 1.0,
        sigma: std::f64::consts::PI / 50.0,
        t_final: 0.2,
        steps: 40,
        dealias: false,
        ic: InitialCondition::Zero,
        realizations: 6,
        master_seed: 2,
        collect_intervals: Some(4),
        save_final_fields: false,
    };
    let single = run_ensemble_with_workers(&config, 1).unwrap();
    let double = run_ensemble_with_workers(&config, 2).unwrap();
    let many = run_ensemble_with_workers(&config, 8).unwrap();
    for other in [&double, &many] {
        for (a, b) in single.spectra.iter().zip(&other.spectra) {
            for (x, y) in a.bins.iter().zip(&b.bins) {
                assert_eq!(x.mean_energy.to_bits(), y.mean_energy.to_bits());
                assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
            }
        }
        for (a, b) in single.intervals.iter().zip(&other.intervals) {
            for (x, y) in a.entries.iter().zip(&b.entries) {
                assert_eq!(x.mean.to_bits(), y.mean.to_bits());
            }
        }
    }
}

#[test]
fn manifest_seed_replays_a_single_realization() {
    let config = ExperimentConfig {
        preset: None,
        equation: Equation::DecoupledAc,
        dim: 2,
        n_values: vec![16],
        alpha: 0.0,
        g: 0.1,
        sigma: 0.5,
        t_final: 0.2,
        steps: 50,
        dealias: false,
        ic: InitialCondition::Zero,
        realizations: 5,
        master_seed: 99,
        collect_intervals: None,
        save_final_fields: false,
    };
    let dir = tempfile::tempdir().unwrap();
    let stats = run_ensemble(&config).unwrap();
    let manifest_path = ensemble::export_ensemble(dir.path(), &config, &stats, 0.5).unwrap();
    let manifest = ensemble::read_manifest(&manifest_path).unwrap();

    // replay realization 3 from the manifest's seeds alone
    let r = 3u64;
    assert_eq!(
        manifest.realization_seeds[r as usize],
        realization_seed(manifest.master_seed, r)
    );
    let grid = GridSpec::new(manifest.config.dim, manifest.config.n_values[0]).unwrap();
    let scheme = SchemeConfig::new(
        manifest.config.equation.parse().unwrap(),
        manifest.config.alpha,
        manifest.config.g,
        manifest.config.sigma,
        manifest.config.t_final,
        manifest.config.steps,
    )
    .unwrap()
    .with_dealias(manifest.config.dealias);
    let spec = NoiseSpec::new(manifest.config.sigma, manifest.master_seed, r).unwrap();
    let replay_a = integrate(&scheme, &InitialCondition::Zero, &spec, grid).unwrap();
    let replay_b = integrate(&scheme, &InitialCondition::Zero, &spec, grid).unwrap();
    for (x, y) in replay_a.values().iter().zip(replay_b.values()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn solver_states_remain_real_under_noise() {
    // conjugate symmetry (hence a real field) holds after every spectral step
    let grid = GridSpec::new(2, 16).unwrap();
    for equation in [Equation::Heat, Equation::AllenCahn] {
        let config = SchemeConfig::new(equation, 0.1, 0.5, 0.6, 0.1, 25).unwrap();
        let spec = NoiseSpec::new(config.sigma, 5, 0).unwrap();
        let mut solver = Solver::new(&config, grid, &InitialCondition::Sin2X).unwrap();
        for m in 0..config.steps {
            let inc = sample_increment(grid, &spec, config.dt(), m as u64);
            solver.step(&inc).unwrap();
            if let FieldState::Spectral(u) = solver.state() {
                let defect = u.symmetry_defect();
                assert!(defect <= 1e-10 * u.max_abs().max(1.0));
            }
        }
    }
}
