//! Command-line front end: configuration loading and merging, run
//! orchestration, and machine-readable outputs for the `estimate`,
//! `highdim`, and `simulate` subcommands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::counterfactual::TreatmentMode;
use crate::data::{load_csv, Dataset, Schema};
use crate::effects::{
    estimate_effects, DrawMode, EffectDecomposition, EstimatorOptions, ReferenceArm,
};
use crate::error::{Error, Result};
use crate::glm::LinkFunction;
use crate::highdim::{run_all, HighdimConfig};
use crate::inference::{bootstrap, IntervalType};
use crate::rng;
use crate::sim;

/// Shared run configuration. A JSON file supplies base values and CLI flags
/// override individual fields; the seed is mandatory (no wall-clock
/// seeding).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub mode: TreatmentMode,
    pub link: Option<LinkFunction>,
    /// Extra pairwise interaction terms for the outcome model, as
    /// (column, column) pairs.
    pub outcome_interactions: Vec<(String, String)>,
    /// Monte Carlo draws per (individual, duplicated row).
    pub draws: usize,
    pub bootstrap_replicates: usize,
    /// Draw count inside bootstrap replicates; defaults to `draws`.
    pub bootstrap_draws: Option<usize>,
    pub interval: IntervalType,
    pub level: f64,
    /// Elastic net mixing parameter for high-dimensional screening.
    pub alpha: f64,
    pub cv_folds: usize,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub reference: ReferenceArm,
    pub penalize_covariates: bool,
    pub reselect_lambda_in_bootstrap: bool,
    pub one_se_rule: bool,
    /// highdim: JSON manifest path (defaults next to the output CSV).
    pub manifest: Option<PathBuf>,
    /// highdim: optional per-mediator scatter data file.
    pub scatter_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            schema: None,
            output: None,
            mode: TreatmentMode::Randomized,
            link: None,
            outcome_interactions: Vec::new(),
            draws: 100,
            bootstrap_replicates: 500,
            bootstrap_draws: None,
            interval: IntervalType::Bca,
            level: 0.95,
            alpha: 0.5,
            cv_folds: 10,
            seed: None,
            threads: None,
            reference: ReferenceArm::Control,
            penalize_covariates: true,
            reselect_lambda_in_bootstrap: false,
            one_se_rule: false,
            manifest: None,
            scatter_file: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config JSON: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.draws < 1 {
            return Err(Error::Config("draws (K) must be at least 1".into()));
        }
        if self.bootstrap_replicates < 100 {
            return Err(Error::Config(
                "bootstrap replicates (B) must be at least 100".into(),
            ));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config("cv folds must be at least 2".into()));
        }
        if !(0.0 < self.level && self.level < 1.0) {
            return Err(Error::Config("level must be in (0,1)".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config("alpha must be in [0,1]".into()));
        }
        if self.seed.is_none() {
            return Err(Error::Config("seed is mandatory".into()));
        }
        Ok(())
    }

    fn require_io(&self) -> Result<(&PathBuf, &PathBuf, &PathBuf)> {
        let input = self
            .input
            .as_ref()
            .ok_or_else(|| Error::Config("input path required".into()))?;
        let schema = self
            .schema
            .as_ref()
            .ok_or_else(|| Error::Config("schema path required".into()))?;
        let output = self
            .output
            .as_ref()
            .ok_or_else(|| Error::Config("output path required".into()))?;
        Ok((input, schema, output))
    }

    /// Stable hash of the canonical config JSON, embedded in outputs.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).unwrap_or_default();
        let words: Vec<u64> = json
            .as_bytes()
            .chunks(8)
            .map(|c| {
                let mut buf = [0u8; 8];
                buf[..c.len()].copy_from_slice(c);
                u64::from_le_bytes(buf)
            })
            .collect();
        format!("{:016x}", rng::hash_words(json.len() as u64, &words))
    }

    pub fn configure_threads(&self) {
        if let Some(t) = self.threads {
            // ignore the error if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }

    fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions {
            draws: self.draws,
            seed: self.seed.unwrap_or(0),
            mode: self.mode,
            link: self.link,
            outcome_interactions: self.outcome_interactions.clone(),
            reference: self.reference,
        }
    }

    fn highdim_config(&self) -> HighdimConfig {
        HighdimConfig {
            alpha: self.alpha,
            cv_folds: self.cv_folds,
            draws: self.draws,
            bootstrap_draws: self.bootstrap_draws,
            bootstrap_replicates: self.bootstrap_replicates,
            interval: self.interval,
            level: self.level,
            seed: self.seed.unwrap_or(0),
            mode: self.mode,
            penalize_covariates: self.penalize_covariates,
            reselect_lambda_in_bootstrap: self.reselect_lambda_in_bootstrap,
            one_se_rule: self.one_se_rule,
            link: self.link,
        }
    }
}

fn load_dataset(input: &Path, schema_path: &Path) -> Result<Dataset> {
    let schema = Schema::from_json_file(schema_path)?;
    let (dataset, report) = load_csv(input, &schema)?;
    if !report.rows_dropped_missing.is_empty() {
        eprintln!(
            "warning: dropped {} rows with missing cells (rows {:?})",
            report.rows_dropped_missing.len(),
            report.rows_dropped_missing
        );
    }
    Ok(dataset)
}

#[derive(Debug, Serialize)]
pub struct EffectReport {
    pub name: String,
    pub estimate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

#[derive(Debug, Serialize)]
pub struct EstimandReport {
    pub mode: DrawMode,
    pub a0: u8,
    pub arms: Vec<u8>,
    pub estimate: f64,
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub link: LinkFunction,
    pub mode: TreatmentMode,
    pub draws: usize,
    pub bootstrap_replicates: usize,
    pub failed_replicates: usize,
    pub interval: IntervalType,
    pub level: f64,
    pub effects: Vec<EffectReport>,
    pub estimands: Vec<EstimandReport>,
}

/// Full-pipeline estimation with bootstrap intervals, written as JSON.
pub fn run_estimate(config: &RunConfig) -> Result<EstimateReport> {
    config.validate()?;
    config.configure_threads();
    let (input, schema, output) = config.require_io()?;
    let dataset = load_dataset(input, schema)?;
    let options = config.estimator_options();

    let (table, point) = estimate_effects(&dataset, &options, 0)?;
    let names = EffectDecomposition::names(dataset.mediator_names());
    let estimator =
        |ds: &Dataset, rep: u64| -> Result<Vec<f64>> { Ok(estimate_effects(ds, &options, rep)?.1.values()) };
    let boot = bootstrap(
        &dataset,
        estimator,
        config.bootstrap_replicates,
        config.seed.unwrap_or(0),
        config.interval,
        config.level,
        names.clone(),
    )?;

    let effects = names
        .iter()
        .zip(point.values())
        .zip(&boot.intervals)
        .map(|((name, estimate), interval)| EffectReport {
            name: name.clone(),
            estimate,
            ci_lower: interval.lower,
            ci_upper: interval.upper,
        })
        .collect();
    let estimands = table
        .rows
        .iter()
        .map(|r| EstimandReport {
            mode: r.assignment.mode,
            a0: r.assignment.a0,
            arms: r.assignment.arms.clone(),
            estimate: r.estimate,
        })
        .collect();
    let report = EstimateReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.config_hash(),
        seed: config.seed.unwrap_or(0),
        n: dataset.n(),
        p: dataset.p(),
        q: dataset.q(),
        link: options.effective_link(&dataset),
        mode: config.mode,
        draws: config.draws,
        bootstrap_replicates: config.bootstrap_replicates,
        failed_replicates: boot.failed,
        interval: config.interval,
        level: config.level,
        effects,
        estimands,
    };
    std::fs::write(output, serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct HighdimManifest {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub mediators_estimated: usize,
    pub interval: IntervalType,
    pub level: f64,
    pub bootstrap_replicates: usize,
    pub failures: Vec<(String, String)>,
}

/// Per-mediator double-selection run: CSV table sorted by ascending CI
/// lower bound, a JSON manifest, and optionally a scatter data file.
pub fn run_highdim(config: &RunConfig) -> Result<HighdimManifest> {
    config.validate()?;
    config.configure_threads();
    let (input, schema, output) = config.require_io()?;
    let dataset = load_dataset(input, schema)?;
    let report = run_all(&dataset, &config.highdim_config())?;

    let mut w = csv::Writer::from_path(output)?;
    w.write_record(["mediator", "estimate", "ci_lower", "ci_upper", "selected"])?;
    for r in &report.results {
        w.write_record(&[
            r.mediator.clone(),
            format!("{}", r.estimate),
            format!("{}", r.ci_lower),
            format!("{}", r.ci_upper),
            format!("{}", r.selected),
        ])?;
    }
    w.flush()?;

    if let Some(scatter) = &config.scatter_file {
        let mut w = csv::Writer::from_path(scatter)?;
        w.write_record(["mediator", "a_to_m_coef", "m_to_y_coef", "abs_indirect"])?;
        let mut by_name = report.results.clone();
        by_name.sort_by(|a, b| a.mediator.cmp(&b.mediator));
        for r in &by_name {
            w.write_record(&[
                r.mediator.clone(),
                format!("{}", r.selection.a_to_m_coef),
                format!("{}", r.selection.m_to_y_coef),
                format!("{}", r.estimate.abs()),
            ])?;
        }
        w.flush()?;
    }

    let manifest = HighdimManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.config_hash(),
        seed: config.seed.unwrap_or(0),
        n: dataset.n(),
        p: dataset.p(),
        mediators_estimated: report.results.len(),
        interval: config.interval,
        level: config.level,
        bootstrap_replicates: config.bootstrap_replicates,
        failures: report.failures.clone(),
    };
    let manifest_path = config
        .manifest
        .clone()
        .unwrap_or_else(|| output.with_extension("manifest.json"));
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

/// Arguments for the `simulate` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateConfig {
    /// Built-in DGP name or path to a DGP spec JSON.
    pub dgp: String,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    /// Dataset CSV output path.
    pub output: Option<PathBuf>,
    /// Oracle JSON sidecar path (defaults next to the dataset).
    pub oracle_output: Option<PathBuf>,
    /// Schema JSON path to write alongside the dataset.
    pub schema_output: Option<PathBuf>,
    pub oracle_samples: usize,
    pub link: Option<LinkFunction>,
    /// When set, run a bias/coverage study with this many replicates.
    pub replicates: Option<usize>,
    pub summary_output: Option<PathBuf>,
    pub draws: usize,
    pub bootstrap_replicates: usize,
    pub interval: IntervalType,
    pub level: f64,
    pub threads: Option<usize>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            dgp: String::new(),
            n: None,
            seed: None,
            output: None,
            oracle_output: None,
            schema_output: None,
            oracle_samples: 1_000_000,
            link: None,
            replicates: None,
            summary_output: None,
            draws: 100,
            bootstrap_replicates: 200,
            interval: IntervalType::Percentile,
            level: 0.95,
            threads: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EffectSummary {
    pub name: String,
    pub oracle: f64,
    pub oracle_se: f64,
    pub mean_estimate: f64,
    pub mean_bias: f64,
    pub empirical_se: f64,
    pub coverage: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub version: String,
    pub dgp: String,
    pub n: usize,
    pub replicates: usize,
    pub draws: usize,
    pub bootstrap_replicates: usize,
    pub seed: u64,
    pub effects: Vec<EffectSummary>,
}

/// Generate a dataset (CSV plus oracle JSON sidecar) and optionally run a
/// replicated bias/coverage study against the oracle.
pub fn run_simulate(config: &SimulateConfig) -> Result<Option<SimulationSummary>> {
    if config.seed.is_none() {
        return Err(Error::Config("seed is mandatory".into()));
    }
    if let Some(t) = config.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let seed = config.seed.unwrap();
    let mut spec = sim::resolve_dgp(&config.dgp)?;
    if let Some(n) = config.n {
        spec.n = n;
    }
    let link = config.link.unwrap_or(if spec.outcome.binary {
        LinkFunction::Logit
    } else {
        LinkFunction::Identity
    });

    let output = config
        .output
        .as_ref()
        .ok_or_else(|| Error::Config("output path required".into()))?;
    let dataset = sim::generate(&spec, seed)?;
    dataset.write_csv_file(output)?;
    if let Some(schema_path) = &config.schema_output {
        std::fs::write(schema_path, serde_json::to_string_pretty(&dataset.schema())? + "\n")?;
    }
    let oracle = sim::oracle(&spec, config.oracle_samples, link, seed ^ 0x6f72_61636c65)?;
    let oracle_path = config
        .oracle_output
        .clone()
        .unwrap_or_else(|| output.with_extension("oracle.json"));
    std::fs::write(&oracle_path, serde_json::to_string_pretty(&oracle)? + "\n")?;

    let Some(replicates) = config.replicates else {
        return Ok(None);
    };

    let options = EstimatorOptions {
        draws: config.draws,
        seed,
        mode: match spec.treatment {
            sim::TreatmentAssignment::Randomized { .. } => TreatmentMode::Randomized,
            sim::TreatmentAssignment::Logistic { .. } => TreatmentMode::Observational,
        },
        link: Some(link),
        outcome_interactions: spec
            .outcome
            .mediator_interactions
            .iter()
            .map(|i| {
                (
                    spec.mediators[i.first].name.clone(),
                    spec.mediators[i.second].name.clone(),
                )
            })
            .collect(),
        reference: ReferenceArm::Control,
    };
    let names = EffectDecomposition::names(
        &spec.mediators.iter().map(|m| m.name.clone()).collect::<Vec<_>>(),
    );
    let oracle_values = oracle.effects.values();

    let per_rep: Vec<Result<(Vec<f64>, Vec<bool>)>> = (0..replicates)
        .map(|r| {
            let rep_seed = rng::hash_words(seed, &[0x7369_6d00, r as u64]);
            let data = sim::generate(&spec, rep_seed)?;
            let rep_options = EstimatorOptions { seed: rep_seed, ..options.clone() };
            let estimator = |ds: &Dataset, rep: u64| -> Result<Vec<f64>> {
                Ok(estimate_effects(ds, &rep_options, rep)?.1.values())
            };
            let boot = bootstrap(
                &data,
                estimator,
                config.bootstrap_replicates,
                rep_seed,
                config.interval,
                config.level,
                names.clone(),
            )?;
            let covered = boot
                .intervals
                .iter()
                .zip(&oracle_values)
                .map(|(ci, &truth)| ci.lower <= truth && truth <= ci.upper)
                .collect();
            Ok((boot.point, covered))
        })
        .collect();

    let mut estimates: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut covered: Vec<usize> = vec![0; names.len()];
    let mut ok = 0usize;
    for rep in per_rep {
        let (point, cover) = rep?;
        ok += 1;
        for (e, v) in estimates.iter_mut().zip(&point) {
            e.push(*v);
        }
        for (c, hit) in covered.iter_mut().zip(&cover) {
            if *hit {
                *c += 1;
            }
        }
    }

    let effects = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let vals = &estimates[j];
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (vals.len() as f64 - 1.0).max(1.0);
            EffectSummary {
                name: name.clone(),
                oracle: oracle_values[j],
                oracle_se: oracle.effect_se[j],
                mean_estimate: mean,
                mean_bias: mean - oracle_values[j],
                empirical_se: var.sqrt(),
                coverage: covered[j] as f64 / ok as f64,
            }
        })
        .collect();
    let summary = SimulationSummary {
        version: env!("CARGO_PKG_VERSION").to_string(),
        dgp: spec.name.clone(),
        n: spec.n,
        replicates: ok,
        draws: config.draws,
        bootstrap_replicates: config.bootstrap_replicates,
        seed,
        effects,
    };
    if let Some(path) = &config.summary_output {
        std::fs::write(path, serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(Some(summary))
}

/// Exit code classification: configuration and input-description problems
/// exit 2, computation failures exit 1.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::Schema(_) | Error::Config(_) | Error::Io(_) => 2,
        _ => 1,
    }
}
