//! Without saving, the equilibrium wealth distribution is the exponential
//! Boltzmann–Gibbs law with temperature W/N.

use kwem::engine::{ensemble_run, SimulationConfig};
use kwem::fitting::{exponential_cdf, fit_exponential};
use kwem::kernels::ModelSpec;
use kwem::statistics::{build_histogram, ks_distance, ks_pvalue, BinScheme};

fn main() -> kwem::Result<()> {
    let config = SimulationConfig {
        n_agents: 1000,
        total_wealth: 1000.0,
        realizations: 4,
        sample_steps: 100,
        master_seed: 1,
        ..SimulationConfig::default()
    };
    let run = ensemble_run(&config, &ModelSpec::NoSaving)?;
    let t = config.mean_wealth();
    let fit = fit_exponential(&run.samples)?;
    let d = ks_distance(&run.samples, |w| exponential_cdf(t, w))?;
    println!(
        "{} samples, converged={}, fitted {:?}",
        run.samples.len(),
        run.all_converged(),
        fit.params
    );
    println!(
        "KS vs exp(T={t}) = {d:.5} (p = {:.3})",
        ks_pvalue(d, run.samples.len())
    );

    let hist = build_histogram(&run.samples, &BinScheme::linear(12, 0.0, 6.0))?;
    println!("\n{:>6} {:>10} {:>10}", "w", "density", "e^{-w}");
    for (k, p) in hist.density().iter().enumerate() {
        let w = hist.bin_center(k);
        println!("{w:>6.2} {p:>10.5} {:>10.5}", (-w / t).exp() / t);
    }
    Ok(())
}
