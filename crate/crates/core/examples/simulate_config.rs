//! The `simulate` and `sweep` commands driven from configuration text, as
//! the `kwem` binary does from a file.

use kwem::cli::{cmd_simulate, cmd_sweep, parse_config_str};

const CONFIG: &str = "
# N = 200 with 50 000 exchanges of burn-in
model = no_saving
n_agents = 200
seed = 1
realizations = 4
burn_in_exchanges = 50000
sample_steps = 250
output.format = both
";

fn main() -> kwem::Result<()> {
    let out = std::env::temp_dir().join("kwem_simulate");
    let mut manifest = parse_config_str(CONFIG)?;
    manifest.output_dir = out.join("fig4");
    let report = cmd_simulate(&manifest)?;
    println!(
        "{:?}, exit code {}",
        report.completion,
        report.completion.exit_code()
    );
    for (family, fit) in &report.fits {
        match fit {
            Ok(f) => println!("  {:<12} KS {:.4}", family.name(), f.ks),
            Err(e) => println!("  {:<12} failed: {e}", family.name()),
        }
    }

    manifest.output_dir = out.join("sweep");
    let (_, rows) = cmd_sweep(&manifest, &[0.0, 0.25, 0.5, 0.75])?;
    for r in rows {
        println!(
            "  λ={:<5} var {:.4}  gini {:.4}  n̂ {:.3}",
            r.lambda, r.variance, r.gini, r.gamma_n
        );
    }
    println!("outputs under {}", out.display());
    Ok(())
}
