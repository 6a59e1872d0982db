mod common;

use kwem::engine::{
    ensemble_run, init_population, mc_step, run_realization, AgentPopulation, EquilibrationPolicy,
    InitialWealth, RandomStream, SimulationConfig, CONSERVATION_TOLERANCE,
};
use kwem::kernels::{LambdaLaw, ModelSpec};
use kwem::statistics::{build_histogram, moments, BinScheme};

fn small(seed: u64) -> SimulationConfig {
    SimulationConfig {
        n_agents: 200,
        total_wealth: 200.0,
        realizations: 6,
        sample_steps: 30,
        master_seed: seed,
        ..SimulationConfig::default()
    }
}

fn models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::NoSaving,
        ModelSpec::UniformSaving { lambda: 0.6 },
        ModelSpec::DistributedSaving {
            lambda_law: LambdaLaw::Uniform { lo: 0.0, hi: 0.99 },
        },
        ModelSpec::BiDirectional,
    ]
}

#[test]
fn replay_is_bit_identical_and_seeds_matter() {
    for model in models() {
        let a = ensemble_run(&small(4), &model).unwrap();
        let b = ensemble_run(&small(4), &model).unwrap();
        let c = ensemble_run(&small(5), &model).unwrap();
        assert_eq!(a, b, "{}", model.name());
        assert_ne!(a.samples, c.samples, "{}", model.name());
    }
}

#[test]
fn ensemble_is_independent_of_thread_count() {
    let model = &models()[2];
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| ensemble_run(&small(6), model).unwrap());
    let b = four.install(|| ensemble_run(&small(6), model).unwrap());
    assert_eq!(a, b);
}

#[test]
fn single_realization_ensemble_matches_run_realization() {
    let config = SimulationConfig {
        realizations: 1,
        ..small(7)
    };
    let e = ensemble_run(&config, &ModelSpec::NoSaving).unwrap();
    let r = run_realization(&config, &ModelSpec::NoSaving, 0).unwrap();
    assert_eq!(e.samples, r.samples);
    assert_eq!(e.realizations, vec![r.diagnostics]);
}

#[test]
fn conservation_and_pooled_mean() {
    for model in models() {
        for init in [InitialWealth::UniformEqual, InitialWealth::RandomUniform] {
            let config = SimulationConfig { init, ..small(8) };
            let run = ensemble_run(&config, &model).unwrap();
            assert!(run.max_conservation_error() <= CONSERVATION_TOLERANCE);
            for r in &run.realizations {
                assert!((r.mean - 1.0).abs() <= 1e-9, "{} {:?}", model.name(), r);
            }
            assert_eq!(run.samples.len(), 200 * 30 * 6);
        }
    }
}

#[test]
fn pooled_size_is_n_times_sample_steps() {
    let config = SimulationConfig {
        sample_steps: 17,
        sample_interval: 3,
        realizations: 1,
        ..small(9)
    };
    let r = run_realization(&config, &ModelSpec::NoSaving, 0).unwrap();
    assert_eq!(r.samples.len(), 200 * 17);
}

#[test]
fn non_convergence_is_flagged_not_truncated() {
    let config = SimulationConfig {
        equilibration: EquilibrationPolicy {
            checkpoint_interval: 1,
            ks_tolerance: 1e-9,
            consecutive_passes: 3,
            max_steps: 20,
        },
        realizations: 2,
        ..small(10)
    };
    let run = ensemble_run(&config, &ModelSpec::NoSaving).unwrap();
    assert!(!run.all_converged());
    for r in &run.realizations {
        assert_eq!(r.equilibration_steps, 20);
        assert_eq!(r.checkpoints, 20);
    }
    assert_eq!(run.samples.len(), 2 * 200 * 30);
}

#[test]
fn saving_narrows_the_distribution() {
    let var = |lambda| {
        let run = ensemble_run(&small(11), &ModelSpec::UniformSaving { lambda }).unwrap();
        moments(&run.samples).unwrap().variance
    };
    assert!(var(0.9) < var(0.3));
}

#[test]
fn no_saving_mode_is_lowest_bin() {
    let run = ensemble_run(&small(12), &ModelSpec::NoSaving).unwrap();
    let h = build_histogram(&run.samples, &BinScheme::linear(50, 0.0, 5.0)).unwrap();
    assert_eq!(h.mode_bin_center(), Some(h.bin_center(0)));
}

#[test]
fn relabeled_initial_state_gives_same_distribution() {
    let config = SimulationConfig {
        n_agents: 500,
        total_wealth: 500.0,
        init: InitialWealth::RandomUniform,
        ..SimulationConfig::default()
    };
    let model = ModelSpec::UniformSaving { lambda: 0.5 };
    let start = init_population(&config, &model, &mut RandomStream::new(13, 0)).unwrap();
    let mut reversed = start.wealth().to_vec();
    reversed.reverse();
    let relabeled = AgentPopulation::new(reversed, None).unwrap();

    let pool = |mut pop: AgentPopulation, seed: u64| {
        let mut draws = RandomStream::new(seed, 0);
        for _ in 0..300 {
            mc_step(&mut pop, &model, &mut draws).unwrap();
        }
        let mut out = Vec::new();
        for _ in 0..200 {
            mc_step(&mut pop, &model, &mut draws).unwrap();
            out.extend_from_slice(pop.wealth());
        }
        out
    };
    let a = pool(start, 100);
    let b = pool(relabeled, 200);
    assert!(a.len() >= 100_000);
    let d = common::ks_two_sample(&a, &b);
    assert!(d < 0.02, "{d}");
}

#[test]
fn distributed_lambdas_are_redrawn_per_realization() {
    let config = small(14);
    let model = ModelSpec::DistributedSaving {
        lambda_law: LambdaLaw::Uniform { lo: 0.0, hi: 0.5 },
    };
    let a = init_population(&config, &model, &mut RandomStream::new(14, 0)).unwrap();
    let b = init_population(&config, &model, &mut RandomStream::new(14, 1)).unwrap();
    let (la, lb) = (a.lambdas().unwrap(), b.lambdas().unwrap());
    assert!(la.iter().chain(lb).all(|l| (0.0..0.5).contains(l)));
    assert_ne!(la, lb);
}
