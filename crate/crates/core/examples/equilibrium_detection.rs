//! The detector compares the wealth histograms of successive checkpoint
//! windows; this walks through the same loop by hand and prints the trace.

use kwem::engine::{
    detect_equilibrium, init_population, mc_step, EquilibrationPolicy, InitialWealth, RandomStream,
    SimulationConfig,
};
use kwem::kernels::ModelSpec;
use kwem::statistics::Histogram;

fn main() -> kwem::Result<()> {
    let config = SimulationConfig {
        n_agents: 1000,
        total_wealth: 1000.0,
        init: InitialWealth::UniformEqual,
        ..SimulationConfig::default()
    };
    let policy = EquilibrationPolicy {
        checkpoint_interval: 20,
        ..EquilibrationPolicy::default()
    };
    let model = ModelSpec::UniformSaving { lambda: 0.8 };
    let mut draws = RandomStream::new(7, 0);
    let mut pop = init_population(&config, &model, &mut draws)?;

    let edges = config.equilibrium_edges()?;
    let mut prev: Option<Histogram> = None;
    let mut passes = 0;
    for checkpoint in 1..=50 {
        let mut window = Histogram::empty(edges.clone())?;
        for _ in 0..policy.checkpoint_interval {
            mc_step(&mut pop, &model, &mut draws)?;
            window.extend_from(pop.wealth());
        }
        if let Some(p) = &prev {
            let d = p.ks_distance(&window)?;
            let done = detect_equilibrium(p, &window, &policy, &mut passes)?;
            println!(
                "checkpoint {checkpoint:>2} (step {:>4}): KS {d:.4}  passes {passes}",
                checkpoint * policy.checkpoint_interval
            );
            if done {
                println!("equilibrium detected");
                return Ok(());
            }
        }
        prev = Some(window);
    }
    println!("no equilibrium within 50 checkpoints");
    Ok(())
}
