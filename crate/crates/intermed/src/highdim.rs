//! Per-mediator double-selection pipeline for wide mediator blocks:
//! penalized outcome and mediator screens, union of the selected
//! predictors, unpenalized refit, and per-mediator indirect effects with
//! bootstrap confidence intervals.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counterfactual::{donor_pool, TreatmentMode};
use crate::data::Dataset;
use crate::effects::{estimate_estimands, DrawContext, HypotheticalAssignment};
use crate::elasticnet::{active_set, cv_select, fit_enet_with_init, CvLoss, PenaltySpec};
use crate::error::{Error, Result};
use crate::glm::{Family, FittedModel, LinkFunction, TermSpec};
use crate::inference::{bootstrap, IntervalType};
use crate::rng;

const MEDIATOR_SEED_TAG: u64 = 0x6d65_6400;
/// Covariates are always carried into the refit when there are at most
/// this many of them.
const FORCE_COVARIATE_LIMIT: usize = 10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HighdimConfig {
    /// Elastic net mixing parameter for both screens.
    pub alpha: f64,
    pub cv_folds: usize,
    /// Monte Carlo draws for point estimates.
    pub draws: usize,
    /// Draw count inside bootstrap replicates (bootstrap noise dominates,
    /// so this may be smaller); defaults to `draws`.
    pub bootstrap_draws: Option<usize>,
    pub bootstrap_replicates: usize,
    pub interval: IntervalType,
    pub level: f64,
    pub seed: u64,
    pub mode: TreatmentMode,
    /// Penalize covariates in the screens (only A and the focal mediator
    /// are ever forced).
    pub penalize_covariates: bool,
    /// Re-run lambda selection inside every bootstrap replicate instead of
    /// reusing the original CV choice.
    pub reselect_lambda_in_bootstrap: bool,
    /// Select lambda by the one-standard-error rule instead of the minimum.
    pub one_se_rule: bool,
    pub link: Option<LinkFunction>,
}

impl Default for HighdimConfig {
    fn default() -> Self {
        HighdimConfig {
            alpha: 0.5,
            cv_folds: 10,
            draws: 100,
            bootstrap_draws: None,
            bootstrap_replicates: 500,
            interval: IntervalType::Bca,
            level: 0.95,
            seed: 0,
            mode: TreatmentMode::Randomized,
            penalize_covariates: true,
            reselect_lambda_in_bootstrap: false,
            one_se_rule: false,
            link: None,
        }
    }
}

impl HighdimConfig {
    fn effective_link(&self, dataset: &Dataset) -> LinkFunction {
        self.link.unwrap_or(if dataset.outcome_is_binary() {
            LinkFunction::Logit
        } else {
            LinkFunction::Identity
        })
    }

    fn mediator_seed(&self, s: usize) -> u64 {
        rng::hash_words(self.seed, &[MEDIATOR_SEED_TAG, s as u64])
    }
}

/// Names selected by the two screens for one focal mediator, their union,
/// and the penalized coefficients used for scatter output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionSets {
    pub focal: String,
    /// Selected by the penalized outcome model (excluding forced columns).
    pub outcome_selected: Vec<String>,
    /// Selected by the penalized mediator model (excluding forced columns).
    pub mediator_selected: Vec<String>,
    pub union: Vec<String>,
    /// Penalized coefficient of the focal mediator in the outcome screen.
    pub m_to_y_coef: f64,
    /// Penalized coefficient of treatment in the mediator screen.
    pub a_to_m_coef: f64,
    pub outcome_lambda: f64,
    pub mediator_lambda: f64,
}

/// Point estimate and interval for one mediator's indirect effect.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerMediatorResult {
    pub mediator: String,
    /// Indirect effect on the link scale.
    pub estimate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub selected: usize,
    pub refit_terms: usize,
    pub failed_bootstrap: usize,
    pub selection: SelectionSets,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HighdimReport {
    pub results: Vec<PerMediatorResult>,
    /// (mediator, error) pairs for mediators that could not be estimated.
    pub failures: Vec<(String, String)>,
}

fn outcome_screen_design(dataset: &Dataset) -> (Array2<f64>, Vec<String>) {
    let n = dataset.n();
    let p = dataset.p();
    let q = dataset.q();
    let mut design = Array2::zeros((n, 1 + p + q));
    let mut names = Vec::with_capacity(1 + p + q);
    for i in 0..n {
        design[[i, 0]] = dataset.treatment()[i];
    }
    names.push(dataset.treatment_name().to_string());
    for j in 0..p {
        for i in 0..n {
            design[[i, 1 + j]] = dataset.mediators()[[i, j]];
        }
    }
    names.extend(dataset.mediator_names().iter().cloned());
    for c in 0..q {
        for i in 0..n {
            design[[i, 1 + p + c]] = dataset.covariates()[[i, c]];
        }
    }
    names.extend(dataset.covariate_names().iter().cloned());
    (design, names)
}

fn mediator_screen_design(dataset: &Dataset, s: usize) -> (Array2<f64>, Vec<String>, Vec<f64>) {
    let n = dataset.n();
    let p = dataset.p();
    let q = dataset.q();
    let mut design = Array2::zeros((n, p + q)); // A + other mediators + covariates
    let mut names = Vec::with_capacity(p + q);
    for i in 0..n {
        design[[i, 0]] = dataset.treatment()[i];
    }
    names.push(dataset.treatment_name().to_string());
    let mut col = 1;
    for j in 0..p {
        if j == s {
            continue;
        }
        for i in 0..n {
            design[[i, col]] = dataset.mediators()[[i, j]];
        }
        names.push(dataset.mediator_names()[j].clone());
        col += 1;
    }
    for c in 0..q {
        for i in 0..n {
            design[[i, col]] = dataset.covariates()[[i, c]];
        }
        names.push(dataset.covariate_names()[c].clone());
        col += 1;
    }
    let response = dataset.mediator(s).to_vec();
    (design, names, response)
}

fn penalty_factors(names: &[String], forced: &[&str], covariates: &[String], penalize_covs: bool) -> Vec<f64> {
    names
        .iter()
        .map(|name| {
            if forced.iter().any(|f| f == name) {
                0.0
            } else if !penalize_covs && covariates.contains(name) {
                0.0
            } else {
                1.0
            }
        })
        .collect()
}

struct ScreenFits {
    sets: SelectionSets,
    outcome_fit: FittedModel,
    mediator_fit: FittedModel,
}

/// Run both screens for focal mediator `s`. When `lambdas` is given the CV
/// step is skipped and the penalized fits reuse those strengths (the
/// bootstrap path); `init` warm-starts them.
fn screen_fits(
    dataset: &Dataset,
    s: usize,
    config: &HighdimConfig,
    lambdas: Option<(f64, f64)>,
    init: Option<(&FittedModel, &FittedModel)>,
) -> Result<ScreenFits> {
    let focal_name = dataset.mediator_names()[s].clone();
    if dataset
        .mediator(s)
        .iter()
        .all(|&v| v == dataset.mediators()[[0, s]])
    {
        return Err(Error::Validation(format!(
            "focal mediator {focal_name} is constant"
        )));
    }
    let covariate_names: Vec<String> = dataset.covariate_names().to_vec();
    let seed = config.mediator_seed(s);

    // outcome screen: Y on (A, all mediators, L), A and M_s unpenalized
    let (y_design, y_names) = outcome_screen_design(dataset);
    let y_family = if dataset.outcome_is_binary() {
        Family::Logistic
    } else {
        Family::Linear
    };
    let y_loss = if y_family == Family::Logistic {
        CvLoss::Misclassification
    } else {
        CvLoss::Mse
    };
    let y_pf = penalty_factors(
        &y_names,
        &[dataset.treatment_name(), focal_name.as_str()],
        &covariate_names,
        config.penalize_covariates,
    );
    let outcome_lambda = match lambdas {
        Some((ly, _)) => ly,
        None => {
            let cv = cv_select(
                y_design.view(),
                &y_names,
                dataset.outcome(),
                y_family,
                config.alpha,
                &y_pf,
                config.cv_folds,
                y_loss,
                rng::hash_words(seed, &[1]),
            )
            .map_err(|e| Error::CrossValidation(format!("outcome screen for {focal_name}: {e}")))?;
            if config.one_se_rule {
                cv.lambdas[crate::elasticnet::one_se_index(&cv)]
            } else {
                cv.selected_lambda
            }
        }
    };
    let outcome_fit = fit_enet_with_init(
        y_design.view(),
        &y_names,
        dataset.outcome(),
        y_family,
        &PenaltySpec {
            alpha: config.alpha,
            lambda: outcome_lambda,
            penalty_factors: y_pf,
        },
        init.map(|(o, _)| o.coefficients.as_slice()),
    )?;
    let outcome_selected = active_set(&outcome_fit)?;

    // mediator screen: M_s on (A, other mediators, L), A unpenalized
    let (m_design, m_names, m_response) = mediator_screen_design(dataset, s);
    let m_family = if dataset.mediator_is_binary(s) {
        Family::Logistic
    } else {
        Family::Linear
    };
    let m_loss = if m_family == Family::Logistic {
        CvLoss::Misclassification
    } else {
        CvLoss::Mse
    };
    let m_pf = penalty_factors(
        &m_names,
        &[dataset.treatment_name()],
        &covariate_names,
        config.penalize_covariates,
    );
    let mediator_lambda = match lambdas {
        Some((_, lm)) => lm,
        None => {
            let cv = cv_select(
                m_design.view(),
                &m_names,
                &m_response,
                m_family,
                config.alpha,
                &m_pf,
                config.cv_folds,
                m_loss,
                rng::hash_words(seed, &[2]),
            )
            .map_err(|e| Error::CrossValidation(format!("mediator screen for {focal_name}: {e}")))?;
            if config.one_se_rule {
                cv.lambdas[crate::elasticnet::one_se_index(&cv)]
            } else {
                cv.selected_lambda
            }
        }
    };
    let mediator_fit = fit_enet_with_init(
        m_design.view(),
        &m_names,
        &m_response,
        m_family,
        &PenaltySpec {
            alpha: config.alpha,
            lambda: mediator_lambda,
            penalty_factors: m_pf,
        },
        init.map(|(_, m)| m.coefficients.as_slice()),
    )?;
    let mediator_selected = active_set(&mediator_fit)?;

    let mut union = outcome_selected.clone();
    union.extend(mediator_selected.iter().cloned());
    union.sort();
    union.dedup();
    if union.len() >= dataset.n().saturating_sub(dataset.q() + 3) {
        return Err(Error::Validation(format!(
            "refit infeasible for {focal_name}: {} selected columns for n={}, increase penalty",
            union.len(),
            dataset.n()
        )));
    }

    let m_to_y_coef = outcome_fit.coefficient(&focal_name).unwrap_or(0.0);
    let a_to_m_coef = mediator_fit.coefficient(dataset.treatment_name()).unwrap_or(0.0);
    Ok(ScreenFits {
        sets: SelectionSets {
            focal: focal_name,
            outcome_selected,
            mediator_selected,
            union,
            m_to_y_coef,
            a_to_m_coef,
            outcome_lambda,
            mediator_lambda,
        },
        outcome_fit,
        mediator_fit,
    })
}

/// Double-selection screen for one focal mediator: CV-tuned penalized
/// outcome and mediator models, returning the union of their active sets.
pub fn screen(dataset: &Dataset, s: usize, config: &HighdimConfig) -> Result<SelectionSets> {
    screen_fits(dataset, s, config, None, None).map(|f| f.sets)
}

/// Refit term spec: treatment and the focal mediator always, the selected
/// union, and all covariates when there are few of them.
pub fn refit_spec(dataset: &Dataset, s: usize, union: &[String]) -> TermSpec {
    let mut columns: Vec<String> = vec![
        dataset.treatment_name().to_string(),
        dataset.mediator_names()[s].clone(),
    ];
    for name in union {
        if !columns.contains(name) {
            columns.push(name.clone());
        }
    }
    if dataset.q() <= FORCE_COVARIATE_LIMIT {
        for name in dataset.covariate_names() {
            if !columns.contains(name) {
                columns.push(name.clone());
            }
        }
    }
    TermSpec::main_effects(columns)
}

/// The two marginal duplicated-data rows that identify one indirect effect:
/// all arms at control, and the focal arm switched to treated.
fn focal_rows(p: usize, s: usize) -> Vec<HypotheticalAssignment> {
    let baseline = HypotheticalAssignment::marginal(0, vec![0; p]);
    let mut arms = vec![0; p];
    arms[s] = 1;
    vec![baseline, HypotheticalAssignment::marginal(0, arms)]
}

/// Unpenalized refit and Monte Carlo estimate of the indirect effect via
/// mediator `s`, given selection sets. Marginal draws are taken for the
/// focal mediator and every mediator in the refit model.
pub fn indirect_effect_for(
    dataset: &Dataset,
    s: usize,
    union: &[String],
    pool: &crate::counterfactual::DonorPool,
    config: &HighdimConfig,
    draws: usize,
    replicate: u64,
) -> Result<(f64, usize)> {
    let spec = refit_spec(dataset, s, union);
    let family = if dataset.outcome_is_binary() {
        Family::Logistic
    } else {
        Family::Linear
    };
    let refit = FittedModel::fit(dataset, &spec, dataset.outcome(), family)?;
    let rows = focal_rows(dataset.p(), s);
    let ctx = DrawContext::new(config.mediator_seed(s), replicate, dataset.p());
    let table = estimate_estimands(dataset, &refit, pool, &rows, draws, &ctx)?;
    let link = config.effective_link(dataset);
    let g0 = link.apply(table.rows[0].estimate)?;
    let g1 = link.apply(table.rows[1].estimate)?;
    Ok((g1 - g0, spec.len()))
}

/// Screen, estimate, and bootstrap one mediator.
fn run_one(dataset: &Dataset, s: usize, config: &HighdimConfig) -> Result<PerMediatorResult> {
    let fits = screen_fits(dataset, s, config, None, None)?;
    let pool = donor_pool(dataset, config.mode)?;
    let (estimate, refit_terms) =
        indirect_effect_for(dataset, s, &fits.sets.union, &pool, config, config.draws, 0)?;

    let boot_draws = config.bootstrap_draws.unwrap_or(config.draws);
    let lambdas = (fits.sets.outcome_lambda, fits.sets.mediator_lambda);
    let outcome_fit = &fits.outcome_fit;
    let mediator_fit = &fits.mediator_fit;
    let estimator = |ds: &Dataset, rep: u64| -> Result<Vec<f64>> {
        let rep_fits = if config.reselect_lambda_in_bootstrap {
            screen_fits(ds, s, config, None, None)?
        } else {
            screen_fits(ds, s, config, Some(lambdas), Some((outcome_fit, mediator_fit)))?
        };
        let rep_pool = donor_pool(ds, config.mode)?;
        let (ie, _) =
            indirect_effect_for(ds, s, &rep_fits.sets.union, &rep_pool, config, boot_draws, rep)?;
        Ok(vec![ie])
    };
    let boot = bootstrap(
        dataset,
        estimator,
        config.bootstrap_replicates,
        config.mediator_seed(s),
        config.interval,
        config.level,
        vec![format!("indirect_{}", fits.sets.focal)],
    )?;

    Ok(PerMediatorResult {
        mediator: fits.sets.focal.clone(),
        estimate,
        ci_lower: boot.intervals[0].lower,
        ci_upper: boot.intervals[0].upper,
        selected: fits.sets.union.len(),
        refit_terms,
        failed_bootstrap: boot.failed,
        selection: fits.sets,
    })
}

/// Run the double-selection pipeline for every mediator in turn. Results
/// are sorted by ascending CI lower bound; per-mediator failures are
/// recorded and skipped.
pub fn run_all(dataset: &Dataset, config: &HighdimConfig) -> Result<HighdimReport> {
    let p = dataset.p();
    let outputs: Vec<(usize, Result<PerMediatorResult>)> = (0..p)
        .into_par_iter()
        .map(|s| (s, run_one(dataset, s, config)))
        .collect();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (s, out) in outputs {
        match out {
            Ok(r) => results.push(r),
            Err(e) => failures.push((dataset.mediator_names()[s].clone(), e.to_string())),
        }
    }
    results.sort_by(|a, b| a.ci_lower.partial_cmp(&b.ci_lower).unwrap());
    Ok(HighdimReport { results, failures })
}
