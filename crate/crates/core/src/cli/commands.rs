use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{OutputFormats, RunManifest};
use super::dataset::{ingest_dataset, ColumnSelector, IngestedDataset};
use super::output::{
    format_float, write_ccdf_csv, write_histogram_csv, write_json, write_rows, OutputSet,
};
use super::Completion;
use crate::engine::{ensemble_run, EnsembleResult, SimulationConfig};
use crate::error::{Error, Result};
use crate::fitting::{
    effective_dimension, fit_exponential, fit_gamma, fit_lognormal, fit_piecewise,
    fit_powerlaw_tail, gamma_raw_moment, DimensionFormula, Family, FitParams, FitResult,
    PiecewiseOptions,
};
use crate::kernels::ModelSpec;
use crate::statistics::{
    build_histogram, empirical_ccdf, moments, normalize_by_mean, summarize, BinScheme, SummaryStats,
};

/// Most rows written to any CCDF-style CSV.
const CCDF_ROWS: usize = 2000;

/// Histogram layout for summaries and `histogram.csv`: 100 linear bins over
/// `[0, 5 W/N)` for the thin-tailed models, 64 logarithmic bins over the
/// sample span for distributed saving.
pub fn summary_histogram_scheme(config: &SimulationConfig, model: &ModelSpec) -> BinScheme {
    match model {
        ModelSpec::DistributedSaving { .. } => BinScheme::Logarithmic {
            bins: 64,
            min_positive: None,
            max: None,
        },
        _ => BinScheme::linear(100, 0.0, 5.0 * config.mean_wealth()),
    }
}

fn applicable_families(model: &ModelSpec) -> Vec<Family> {
    let mut v = vec![Family::Exponential, Family::Gamma, Family::LogNormal];
    if model.has_agent_lambdas() {
        v.push(Family::PowerLawTail);
        v.push(Family::PiecewiseBulkTail);
    }
    v
}

fn run_fit(family: Family, samples: &[f64]) -> Result<FitResult> {
    match family {
        Family::Exponential => fit_exponential(samples),
        Family::Gamma => fit_gamma(samples),
        Family::LogNormal => fit_lognormal(samples),
        Family::PowerLawTail => fit_powerlaw_tail(samples, None),
        Family::PiecewiseBulkTail => fit_piecewise(samples, &PiecewiseOptions::default()),
    }
}

/// Outcome of one `simulate` run.
#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub completion: Completion,
    pub summary: SummaryStats,
    pub fits: Vec<(Family, std::result::Result<FitResult, String>)>,
    pub ensemble: EnsembleResult,
    pub summary_json: Value,
}

impl SimulateReport {
    pub fn fit(&self, family: Family) -> Option<&FitResult> {
        self.fits
            .iter()
            .find(|(f, _)| *f == family)
            .and_then(|(_, r)| r.as_ref().ok())
    }
}

fn fit_entry(family: Family, result: &std::result::Result<FitResult, String>) -> Value {
    match result {
        Ok(fit) => json!({ "family": family.name(), "result": fit }),
        Err(msg) => json!({ "family": family.name(), "error": msg }),
    }
}

fn gamma_moment_check(fit: &FitResult, summary: &SummaryStats) -> Option<Value> {
    let FitParams::Gamma { n, temperature, .. } = fit.params else {
        return None;
    };
    let rel: Vec<f64> = (1..=4)
        .map(|j| {
            let model = gamma_raw_moment(n, temperature, j);
            let sample = summary.raw_moments[j as usize - 1];
            (model - sample) / sample
        })
        .collect();
    Some(json!({ "relative_discrepancy_m1_to_m4": rel }))
}

fn dimension_entry(model: &ModelSpec) -> Value {
    let ModelSpec::UniformSaving { lambda } = *model else {
        return Value::Null;
    };
    let entry = |f| match effective_dimension(lambda, f) {
        Ok(d) => json!({ "d": d.d, "n": d.n }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    json!({
        "paper_d": entry(DimensionFormula::PaperD),
        "half_d": entry(DimensionFormula::HalfD),
    })
}

/// Runs the ensemble and writes `histogram.csv`, `ccdf.csv` and
/// `summary.json` (as selected) into the manifest's output directory.
///
/// Non-convergence is not a failure: outputs are written and the report
/// carries [`Completion::NonConvergence`]. On any error, files already
/// written by this call are removed.
pub fn cmd_simulate(manifest: &RunManifest) -> Result<SimulateReport> {
    let mut outputs = OutputSet::default();
    match simulate_into(manifest, &mut outputs) {
        Ok(report) => Ok(report),
        Err(e) => {
            outputs.discard();
            Err(e)
        }
    }
}

fn simulate_into(manifest: &RunManifest, outputs: &mut OutputSet) -> Result<SimulateReport> {
    manifest.validate()?;
    let dir = &manifest.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let ensemble = ensemble_run(&manifest.config, &manifest.model)?;
    let samples = &ensemble.samples;
    let scheme = summary_histogram_scheme(&manifest.config, &manifest.model);
    let summary = summarize(samples, &scheme)?;
    let hist = build_histogram(samples, &scheme)?;
    let ccdf = empirical_ccdf(samples)?.thinned(CCDF_ROWS);

    let fits: Vec<(Family, std::result::Result<FitResult, String>)> =
        applicable_families(&manifest.model)
            .into_iter()
            .map(|f| (f, run_fit(f, samples).map_err(|e| e.to_string())))
            .collect();

    let completion = if ensemble.all_converged() {
        Completion::Success
    } else {
        Completion::NonConvergence
    };

    let gamma_check = fits
        .iter()
        .find(|(f, _)| *f == Family::Gamma)
        .and_then(|(_, r)| r.as_ref().ok())
        .and_then(|g| gamma_moment_check(g, &summary));

    let summary_json = json!({
        "artifact_version": manifest.artifact_version,
        "master_seed": manifest.config.master_seed,
        "config": manifest.config,
        "model": manifest.model,
        "histogram_scheme": scheme,
        "n_samples": samples.len(),
        "summary": summary,
        "histogram": {
            "underflow": hist.underflow,
            "overflow": hist.overflow,
        },
        "fits": fits.iter().map(|(f, r)| fit_entry(*f, r)).collect::<Vec<_>>(),
        "gamma_moment_check": gamma_check,
        "effective_dimension": dimension_entry(&manifest.model),
        "equilibration": {
            "all_converged": ensemble.all_converged(),
            "max_conservation_error": ensemble.max_conservation_error(),
            "realizations": ensemble.realizations,
        },
    });

    if manifest.formats.csv {
        write_histogram_csv(&outputs.record(dir.join("histogram.csv")), &hist)?;
        write_ccdf_csv(&outputs.record(dir.join("ccdf.csv")), &ccdf)?;
    }
    if manifest.formats.json {
        write_json(&outputs.record(dir.join("summary.json")), &summary_json)?;
    }

    Ok(SimulateReport {
        completion,
        summary,
        fits,
        ensemble,
        summary_json,
    })
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub mean: f64,
    pub variance: f64,
    pub mode_bin: f64,
    pub gamma_n: f64,
    pub gamma_t: f64,
    pub gini: f64,
}

fn cell_dir_name(lambda: f64) -> String {
    format!("lambda_{lambda}")
}

/// Runs `simulate` once per λ of the grid under the uniform-saving rule,
/// each into `<output_dir>/lambda_<λ>/`, and writes `sweep.csv`.
pub fn cmd_sweep(manifest: &RunManifest, grid: &[f64]) -> Result<(Completion, Vec<SweepRow>)> {
    if grid.is_empty() {
        return Err(Error::config("lambda_grid", "grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|l| !(0.0..1.0).contains(*l)) {
        return Err(Error::config(
            "lambda_grid",
            format!("values must lie in [0, 1), got {bad}"),
        ));
    }
    manifest.validate()?;
    let mut all = OutputSet::default();
    let result = sweep_into(manifest, grid, &mut all);
    if result.is_err() {
        all.discard();
    }
    result
}

fn sweep_into(
    manifest: &RunManifest,
    grid: &[f64],
    all: &mut OutputSet,
) -> Result<(Completion, Vec<SweepRow>)> {
    let mut rows = Vec::with_capacity(grid.len());
    let mut completion = Completion::Success;
    for &lambda in grid {
        let cell_error = |e: Error| -> Error {
            let cell = format!("sweep cell lambda={lambda}");
            match e {
                Error::Config { key, message } => Error::Config {
                    key,
                    message: format!("{cell}: {message}"),
                },
                Error::Fit { family, message } => Error::Fit {
                    family,
                    message: format!("{cell}: {message}"),
                },
                other => Error::Usage(format!("{cell}: {other}")),
            }
        };
        let mut cell = manifest.clone();
        cell.model = ModelSpec::UniformSaving { lambda };
        cell.output_dir = manifest.output_dir.join(cell_dir_name(lambda));
        let mut cell_outputs = OutputSet::default();
        let report = simulate_into(&cell, &mut cell_outputs);
        all.absorb(cell_outputs);
        let report = report.map_err(cell_error)?;
        if report.completion == Completion::NonConvergence {
            completion = Completion::NonConvergence;
        }
        let gamma = report
            .fits
            .iter()
            .find(|(f, _)| *f == Family::Gamma)
            .map(|(_, r)| r.clone())
            .expect("gamma is always attempted")
            .map_err(|m| cell_error(Error::fit(Family::Gamma.name(), m)))?;
        let FitParams::Gamma { n, temperature, .. } = gamma.params else {
            unreachable!("gamma fit returns gamma params")
        };
        let s = &report.summary;
        rows.push(SweepRow {
            lambda,
            mean: s.mean,
            variance: s.variance,
            mode_bin: s.mode_bin_center.unwrap_or(f64::NAN),
            gamma_n: n,
            gamma_t: temperature,
            gini: s.gini,
        });
    }

    if manifest.formats.csv {
        fs::create_dir_all(&manifest.output_dir).map_err(|e| Error::io(&manifest.output_dir, e))?;
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    format_float(r.lambda),
                    format_float(r.mean),
                    format_float(r.variance),
                    format_float(r.mode_bin),
                    format_float(r.gamma_n),
                    format_float(r.gamma_t),
                    format_float(r.gini),
                ]
            })
            .collect();
        write_rows(
            &all.record(manifest.output_dir.join("sweep.csv")),
            "lambda,mean,variance,mode_bin,gamma_n,gamma_T,gini",
            &table,
        )?;
    }
    Ok((completion, rows))
}

/// Fit family for `cmd_fit`; `Auto` is the piecewise log-normal + Pareto fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitChoice {
    Auto,
    Family(Family),
}

impl FitChoice {
    pub fn parse(s: &str) -> Result<FitChoice> {
        if s == "auto" {
            return Ok(FitChoice::Auto);
        }
        Family::parse(s).map(FitChoice::Family).ok_or_else(|| {
            Error::config(
                "family",
                format!(
                    "expected auto, exponential, gamma, power_law_tail, log_normal or \
                     piecewise; got `{s}`"
                ),
            )
        })
    }

    fn family(self) -> Family {
        match self {
            FitChoice::Auto => Family::PiecewiseBulkTail,
            FitChoice::Family(f) => f,
        }
    }
}

/// Normalizes the dataset to unit mean, fits it, and writes `fit.json` and
/// `overlay.csv` (as selected) into `out_dir`.
pub fn cmd_fit(
    dataset: &IngestedDataset,
    choice: FitChoice,
    out_dir: &Path,
    formats: OutputFormats,
) -> Result<FitResult> {
    let family = choice.family();
    let normalized = normalize_by_mean(&dataset.values)?;
    let raw_mean = moments(&dataset.values)?.mean;
    let fit = run_fit(family, &normalized)?;

    let mut outputs = OutputSet::default();
    let written = (|| -> Result<()> {
        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        if formats.csv {
            let curve = empirical_ccdf(&normalized)?.thinned(CCDF_ROWS);
            let rows: Vec<Vec<String>> = curve
                .points
                .iter()
                .map(|&(w, s)| vec![format_float(w), format_float(s), format_float(fit.ccdf(w))])
                .collect();
            write_rows(
                &outputs.record(out_dir.join("overlay.csv")),
                "w,empirical_ccdf,model_ccdf",
                &rows,
            )?;
        }
        if formats.json {
            let doc = json!({
                "artifact_version": crate::ARTIFACT_VERSION,
                "source": dataset.source,
                "n_values": dataset.values.len(),
                "dropped": dataset.dropped,
                "normalization_mean": raw_mean,
                "requested": match choice {
                    FitChoice::Auto => "auto",
                    FitChoice::Family(f) => f.name(),
                },
                "result": fit,
            });
            write_json(&outputs.record(out_dir.join("fit.json")), &doc)?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        outputs.discard();
        return Err(e);
    }
    debug_assert!(!outputs.paths().is_empty() || !(formats.csv || formats.json));
    Ok(fit)
}

/// Ingests a dataset and reports what was kept and dropped.
pub fn cmd_ingest_check(path: &Path, column: &ColumnSelector) -> Result<Value> {
    let d = ingest_dataset(path, column)?;
    let m = moments(&d.values)?;
    let (lo, hi) = d
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    Ok(json!({
        "artifact_version": crate::ARTIFACT_VERSION,
        "source": d.source,
        "n_values": d.values.len(),
        "dropped": d.dropped,
        "min": lo,
        "max": hi,
        "mean": m.mean,
    }))
}
