//! Agent-specific saving propensities λ_i ~ U(0, 0.9999) produce a Pareto
//! tail with α ≈ 1. Pass the number of realizations as the first argument
//! (default 20; the acceptance run uses 100).

use kwem::engine::{ensemble_run, SimulationConfig};
use kwem::fitting::{fit_piecewise, hill_estimate, PiecewiseOptions};
use kwem::kernels::{LambdaLaw, ModelSpec};
use kwem::statistics::empirical_ccdf;

fn main() -> kwem::Result<()> {
    let realizations = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("realizations must be an integer"))
        .unwrap_or(20);
    let config = SimulationConfig {
        n_agents: 1000,
        total_wealth: 1000.0,
        realizations,
        burn_in_exchanges: 20_000 * 1000,
        sample_steps: 20,
        sample_interval: 50,
        master_seed: 5,
        ..SimulationConfig::default()
    };
    let model = ModelSpec::DistributedSaving {
        lambda_law: LambdaLaw::Uniform {
            lo: 0.0,
            hi: 0.9999,
        },
    };
    let run = ensemble_run(&config, &model)?;
    let mut s = run.samples.clone();
    s.sort_by(|a, b| a.total_cmp(b));

    println!("{} samples from {realizations} realizations", s.len());
    println!("{:>8} {:>10} {:>8}", "top", "w_min", "Hill α");
    for frac in [0.2, 0.1, 0.05, 0.02, 0.01, 0.005] {
        let k = (s.len() as f64 * frac) as usize;
        let w_min = s[s.len() - k];
        println!(
            "{:>7}% {w_min:>10.3} {:>8.3}",
            100.0 * frac,
            hill_estimate(&s[s.len() - k..], w_min)?
        );
    }

    let w1 = s[s.len() - s.len() / 100];
    let ccdf = empirical_ccdf(&s)?;
    println!(
        "CCDF slope on [w_1%, 10 w_1%]: {:.3}",
        ccdf.decade_slope_from(w1)?
    );

    let fit = fit_piecewise(&s, &PiecewiseOptions::default())?;
    match (fit.crossover(), fit.alpha()) {
        (Some(w_c), Some(a)) => {
            println!("piecewise: w_c = {w_c:.3}, α = {a:.3}, KS = {:.4}", fit.ks)
        }
        _ => println!("piecewise: tail rejected {:?}", fit.warnings),
    }
    Ok(())
}
