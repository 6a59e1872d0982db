//! Fit an expenditure/income file: `cargo run --example fit_dataset -- FILE [COLUMN]`.
//! Without arguments a synthetic log-normal + Pareto file is generated.

use std::fmt::Write as _;
use std::path::PathBuf;

use kwem::cli::{cmd_fit, ingest_dataset, ColumnSelector, FitChoice, OutputFormats};
use kwem::fitting::Family;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic() -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut text = String::from("household,expenditure\n");
    for i in 0..50_000 {
        // log-normal body (σ = 0.7) with a Pareto(1.5) tail past 5
        let w = loop {
            let z = (-2.0 * rng.random::<f64>().max(1e-300).ln()).sqrt()
                * (std::f64::consts::TAU * rng.random::<f64>()).cos();
            let w = (0.7 * z).exp();
            if w < 5.0 {
                break w;
            }
            if rng.random::<f64>() < 0.5 {
                break 5.0 * (1.0 - rng.random::<f64>()).powf(-1.0 / 1.5);
            }
        };
        writeln!(text, "{i},{:.6}", 300.0 * w).unwrap();
    }
    let path = std::env::temp_dir().join("kwem_synthetic_expenditure.csv");
    std::fs::write(&path, text).expect("write synthetic file");
    path
}

fn main() -> kwem::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(synthetic);
    let column = args
        .next()
        .map(|c| ColumnSelector::parse(&c))
        .unwrap_or_else(|| ColumnSelector::Name("expenditure".into()));

    let data = ingest_dataset(&path, &column)?;
    println!(
        "{}: {} values, {} rows dropped",
        path.display(),
        data.values.len(),
        data.dropped
    );

    let out = std::env::temp_dir().join("kwem_fit");
    for choice in [
        FitChoice::Family(Family::Exponential),
        FitChoice::Family(Family::Gamma),
        FitChoice::Family(Family::LogNormal),
        FitChoice::Auto,
    ] {
        let fit = cmd_fit(&data, choice, &out, OutputFormats::BOTH)?;
        println!(
            "{:<24} KS {:.4}  {:?}",
            format!("{choice:?}"),
            fit.ks,
            fit.params
        );
    }
    println!("fit.json and overlay.csv (last fit) in {}", out.display());
    Ok(())
}
