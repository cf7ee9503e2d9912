//! Penalized linear and logistic regression by cyclic coordinate descent
//! with per-coefficient penalty factors, warm-started lambda paths, and
//! k-fold cross-validation.
//!
//! Columns with a zero penalty factor are never shrunk (their coordinate
//! update has no soft threshold), which is how the treatment and the focal
//! mediator are forced into screening models.

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{expit, Family, FittedModel, PenaltyInfo, TermSpec};
use crate::rng::KeyStream;

/// Total coordinate sweeps allowed before a fit is declared non-convergent.
const MAX_SWEEPS: usize = 100_000;
/// Inner tolerance on standardized coefficient moves.
const INNER_TOL: f64 = 1e-11;
/// KKT residual enforced on the standardized scale before a fit returns.
const KKT_TOL: f64 = 1e-7;
/// Relative deviance tolerance for the outer logistic loop.
const OUTER_TOL: f64 = 1e-7;
/// Path geometry: 100 points down to 1e-4 of lambda_max.
const PATH_LEN: usize = 100;
const PATH_MIN_RATIO: f64 = 1e-4;

/// Mixing, strength, and per-coefficient weights of an elastic net penalty.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PenaltySpec {
    /// 1 = lasso, 0 = ridge.
    pub alpha: f64,
    pub lambda: f64,
    /// One non-negative factor per design column; zero exempts a column.
    pub penalty_factors: Vec<f64>,
}

/// Cross-validation loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvLoss {
    Mse,
    Misclassification,
}

/// Cross-validation summary over the lambda path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvResult {
    /// Strictly decreasing path.
    pub lambdas: Vec<f64>,
    pub mean_loss: Vec<f64>,
    pub se_loss: Vec<f64>,
    pub selected_lambda: f64,
    pub selected_index: usize,
    pub seed: u64,
}

/// Standardized coordinate-descent problem. Penalized columns are centered
/// and scaled to unit (population) standard deviation; unpenalized columns
/// are centered only; the intercept is an explicit unpenalized coordinate.
struct Problem {
    n: usize,
    k: usize,
    cols: Vec<Vec<f64>>,
    xvar: Vec<f64>,
    centers: Vec<f64>,
    scales: Vec<f64>,
    alive: Vec<bool>,
    y: Vec<f64>,
    family: Family,
    alpha: f64,
    pf: Vec<f64>,
}

struct SolveState {
    beta: Vec<f64>,
    b0: f64,
    /// Linear family: residual y - b0 - Xs beta. Logistic: linear predictor.
    work: Vec<f64>,
    sweeps: usize,
}

impl Problem {
    fn new(
        design: ArrayView2<'_, f64>,
        response: &[f64],
        family: Family,
        alpha: f64,
        penalty_factors: &[f64],
    ) -> Result<Problem> {
        let (n, k) = (design.nrows(), design.ncols());
        if n == 0 || response.len() != n {
            return Err(Error::Validation("design/response size mismatch".into()));
        }
        if penalty_factors.len() != k {
            return Err(Error::Validation(format!(
                "penalty factor count {} != column count {k}",
                penalty_factors.len()
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Validation(format!("alpha must be in [0,1], got {alpha}")));
        }
        if penalty_factors.iter().any(|&w| w < 0.0) {
            return Err(Error::Validation("penalty factors must be non-negative".into()));
        }
        if family == Family::Logistic {
            let ones = response.iter().filter(|&&v| v > 0.5).count();
            if ones == 0 || ones == n {
                return Err(Error::Validation(
                    "logistic response must contain both classes".into(),
                ));
            }
        }
        let mut cols = Vec::with_capacity(k);
        let mut centers = vec![0.0; k];
        let mut scales = vec![1.0; k];
        let mut alive = vec![true; k];
        let mut xvar = vec![0.0; k];
        for j in 0..k {
            let mut col: Vec<f64> = design.column(j).to_vec();
            let mean = col.iter().sum::<f64>() / n as f64;
            centers[j] = mean;
            for v in col.iter_mut() {
                *v -= mean;
            }
            let var = col.iter().map(|v| v * v).sum::<f64>() / n as f64;
            if var <= 0.0 {
                alive[j] = false;
                cols.push(col);
                continue;
            }
            if penalty_factors[j] > 0.0 {
                let sd = var.sqrt();
                scales[j] = sd;
                for v in col.iter_mut() {
                    *v /= sd;
                }
                xvar[j] = 1.0;
            } else {
                xvar[j] = var;
            }
            cols.push(col);
        }
        Ok(Problem {
            n,
            k,
            cols,
            xvar,
            centers,
            scales,
            alive,
            y: response.to_vec(),
            family,
            alpha,
            pf: penalty_factors.to_vec(),
        })
    }

    fn fresh_state(&self) -> SolveState {
        let work = match self.family {
            Family::Linear => self.y.clone(), // residual with beta=0, b0=0
            Family::Logistic => vec![0.0; self.n],
        };
        SolveState {
            beta: vec![0.0; self.k],
            b0: 0.0,
            work,
            sweeps: 0,
        }
    }

    /// Alpha surrogate that keeps the path start finite for small alpha.
    fn path_alpha(&self) -> f64 {
        self.alpha.max(1e-3)
    }

    /// Fit the unpenalized coordinates only (lambda = infinity on the rest)
    /// and return the smallest lambda that zeroes every penalized column.
    fn lambda_max(&self, state: &mut SolveState) -> Result<f64> {
        self.solve(f64::INFINITY, state)?;
        let grad = self.gradient(state);
        let mut lmax: f64 = 0.0;
        for j in 0..self.k {
            if self.alive[j] && self.pf[j] > 0.0 {
                lmax = lmax.max(grad[j].abs() / (self.path_alpha() * self.pf[j]));
            }
        }
        if lmax <= 0.0 || !lmax.is_finite() {
            lmax = 1.0;
        }
        Ok(lmax)
    }

    /// Loss gradient per coordinate on the standardized scale:
    /// -(1/n) <xs_j, r> (linear) or -(1/n) <xs_j, y - p> (logistic).
    fn gradient(&self, state: &SolveState) -> Vec<f64> {
        let mut grad = vec![0.0; self.k];
        match self.family {
            Family::Linear => {
                for j in 0..self.k {
                    if !self.alive[j] {
                        continue;
                    }
                    let dot: f64 = self.cols[j].iter().zip(&state.work).map(|(x, r)| x * r).sum();
                    grad[j] = -dot / self.n as f64;
                }
            }
            Family::Logistic => {
                let resid: Vec<f64> = state
                    .work
                    .iter()
                    .zip(&self.y)
                    .map(|(&eta, &y)| y - expit(eta + state.b0))
                    .collect();
                for j in 0..self.k {
                    if !self.alive[j] {
                        continue;
                    }
                    let dot: f64 = self.cols[j].iter().zip(&resid).map(|(x, r)| x * r).sum();
                    grad[j] = -dot / self.n as f64;
                }
            }
        }
        grad
    }

    /// Largest KKT violation at `lambda` on the standardized scale.
    fn kkt_violation(&self, lambda: f64, state: &SolveState) -> f64 {
        let grad = self.gradient(state);
        let mut worst: f64 = 0.0;
        for j in 0..self.k {
            if !self.alive[j] {
                continue;
            }
            let w = self.pf[j];
            let ridge = lambda * (1.0 - self.alpha) * w * state.beta[j];
            let l1 = lambda * self.alpha * w;
            let v = if state.beta[j] != 0.0 || w == 0.0 {
                ((grad[j] + ridge).abs() - l1).abs()
            } else {
                (grad[j].abs() - l1).max(0.0)
            };
            worst = worst.max(v);
        }
        // intercept / unpenalized mean condition
        let mean_resid = match self.family {
            Family::Linear => state.work.iter().sum::<f64>() / self.n as f64,
            Family::Logistic => {
                state
                    .work
                    .iter()
                    .zip(&self.y)
                    .map(|(&eta, &y)| y - expit(eta + state.b0))
                    .sum::<f64>()
                    / self.n as f64
            }
        };
        worst.max(mean_resid.abs())
    }

    fn solve(&self, lambda: f64, state: &mut SolveState) -> Result<()> {
        match self.family {
            Family::Linear => self.solve_linear(lambda, state),
            Family::Logistic => self.solve_logistic(lambda, state),
        }
    }

    /// One full or active-set coordinate sweep (linear family). Returns the
    /// largest squared standardized move.
    fn sweep_linear(&self, lambda: f64, state: &mut SolveState, active_only: bool) -> f64 {
        let n = self.n as f64;
        let mut max_delta: f64 = 0.0;
        // intercept
        let mean_r = state.work.iter().sum::<f64>() / n;
        if mean_r != 0.0 {
            state.b0 += mean_r;
            for r in state.work.iter_mut() {
                *r -= mean_r;
            }
            max_delta = max_delta.max(mean_r * mean_r);
        }
        for j in 0..self.k {
            if !self.alive[j] {
                continue;
            }
            let old = state.beta[j];
            if active_only && old == 0.0 && self.pf[j] > 0.0 {
                continue;
            }
            let col = &self.cols[j];
            let dot: f64 = col.iter().zip(&state.work).map(|(x, r)| x * r).sum();
            let rho = dot / n + self.xvar[j] * old;
            let w = self.pf[j];
            let new = if lambda.is_infinite() {
                if w > 0.0 {
                    0.0
                } else {
                    rho / self.xvar[j]
                }
            } else {
                let num = soft_threshold(rho, lambda * self.alpha * w);
                num / (self.xvar[j] + lambda * (1.0 - self.alpha) * w)
            };
            let delta = new - old;
            if delta != 0.0 {
                for (r, x) in state.work.iter_mut().zip(col) {
                    *r -= delta * x;
                }
                state.beta[j] = new;
                max_delta = max_delta.max(self.xvar[j] * delta * delta);
            }
        }
        max_delta
    }

    fn solve_linear(&self, lambda: f64, state: &mut SolveState) -> Result<()> {
        loop {
            let moved = self.sweep_linear(lambda, state, false);
            state.sweeps += 1;
            if state.sweeps > MAX_SWEEPS {
                return Err(Error::NonConvergence(format!(
                    "coordinate descent exceeded {MAX_SWEEPS} sweeps"
                )));
            }
            if moved >= INNER_TOL {
                loop {
                    let moved = self.sweep_linear(lambda, state, true);
                    state.sweeps += 1;
                    if state.sweeps > MAX_SWEEPS {
                        return Err(Error::NonConvergence(format!(
                            "coordinate descent exceeded {MAX_SWEEPS} sweeps"
                        )));
                    }
                    if moved < INNER_TOL {
                        break;
                    }
                }
                continue;
            }
            if lambda.is_infinite() || self.kkt_violation(lambda, state) <= KKT_TOL {
                return Ok(());
            }
        }
    }

    fn solve_logistic(&self, lambda: f64, state: &mut SolveState) -> Result<()> {
        let n = self.n as f64;
        let mut dev = self.logistic_deviance(state);
        loop {
            // quadratic approximation at the current linear predictor
            let mut v = vec![0.0; self.n];
            let mut wres = vec![0.0; self.n];
            for i in 0..self.n {
                let p = expit(state.work[i] + state.b0);
                v[i] = (p * (1.0 - p)).max(1e-5);
                wres[i] = self.y[i] - p;
            }
            let mut wv = vec![0.0; self.k];
            for j in 0..self.k {
                if self.alive[j] {
                    wv[j] = self.cols[j].iter().zip(&v).map(|(x, w)| w * x * x).sum::<f64>() / n;
                }
            }
            let vsum: f64 = v.iter().sum();

            // inner coordinate descent on the weighted least-squares problem
            let mut inner_rounds = 0;
            loop {
                let mut max_delta: f64 = 0.0;
                let d0 = wres.iter().sum::<f64>() / vsum;
                if d0 != 0.0 {
                    state.b0 += d0;
                    for i in 0..self.n {
                        wres[i] -= d0 * v[i];
                    }
                    max_delta = max_delta.max(d0 * d0);
                }
                for j in 0..self.k {
                    if !self.alive[j] {
                        continue;
                    }
                    let old = state.beta[j];
                    let col = &self.cols[j];
                    let dot: f64 = col.iter().zip(&wres).map(|(x, r)| x * r).sum();
                    let rho = dot / n + wv[j] * old;
                    let w = self.pf[j];
                    let new = if lambda.is_infinite() {
                        if w > 0.0 {
                            0.0
                        } else {
                            rho / wv[j]
                        }
                    } else {
                        soft_threshold(rho, lambda * self.alpha * w)
                            / (wv[j] + lambda * (1.0 - self.alpha) * w)
                    };
                    let delta = new - old;
                    if delta != 0.0 {
                        for i in 0..self.n {
                            wres[i] -= delta * v[i] * col[i];
                            state.work[i] += delta * col[i];
                        }
                        state.beta[j] = new;
                        max_delta = max_delta.max(wv[j] * delta * delta);
                    }
                }
                state.sweeps += 1;
                inner_rounds += 1;
                if state.sweeps > MAX_SWEEPS {
                    return Err(Error::NonConvergence(format!(
                        "coordinate descent exceeded {MAX_SWEEPS} sweeps"
                    )));
                }
                if max_delta < INNER_TOL || inner_rounds >= 250 {
                    break;
                }
            }

            let new_dev = self.logistic_deviance(state);
            let converged = (dev - new_dev).abs() <= OUTER_TOL * (new_dev.abs() + 0.1);
            dev = new_dev;
            if converged
                && (lambda.is_infinite() || self.kkt_violation(lambda, state) <= KKT_TOL)
            {
                return Ok(());
            }
        }
    }

    fn logistic_deviance(&self, state: &SolveState) -> f64 {
        let mut dev = 0.0;
        for i in 0..self.n {
            let p = expit(state.work[i] + state.b0).clamp(1e-12, 1.0 - 1e-12);
            dev += if self.y[i] > 0.5 { -p.ln() } else { -(1.0 - p).ln() };
        }
        2.0 * dev
    }

    fn linear_deviance(&self, state: &SolveState) -> f64 {
        state.work.iter().map(|r| r * r).sum()
    }

    fn deviance(&self, state: &SolveState) -> f64 {
        match self.family {
            Family::Linear => self.linear_deviance(state),
            Family::Logistic => self.logistic_deviance(state),
        }
    }

    /// Back-transform to the original column scale.
    fn original_coefficients(&self, state: &SolveState) -> (f64, Vec<f64>) {
        let mut beta = vec![0.0; self.k];
        let mut b0 = state.b0;
        for j in 0..self.k {
            beta[j] = state.beta[j] / self.scales[j];
            b0 -= beta[j] * self.centers[j];
        }
        (b0, beta)
    }

    /// Load original-scale coefficients as a standardized warm start.
    fn warm_state(&self, intercept: f64, beta_orig: &[f64]) -> SolveState {
        let mut state = self.fresh_state();
        let mut b0 = intercept;
        for j in 0..self.k {
            if !self.alive[j] {
                continue;
            }
            state.beta[j] = beta_orig[j] * self.scales[j];
            b0 += beta_orig[j] * self.centers[j];
        }
        state.b0 = b0;
        match self.family {
            Family::Linear => {
                for i in 0..self.n {
                    let mut eta = state.b0;
                    for j in 0..self.k {
                        eta += self.cols[j][i] * state.beta[j];
                    }
                    state.work[i] = self.y[i] - eta;
                }
            }
            Family::Logistic => {
                for i in 0..self.n {
                    let mut eta = 0.0;
                    for j in 0..self.k {
                        eta += self.cols[j][i] * state.beta[j];
                    }
                    state.work[i] = eta;
                }
            }
        }
        state
    }

    /// Geometric path from lambda_max down to `min_ratio * lambda_max`.
    fn lambda_path(lmax: f64, len: usize, min_ratio: f64) -> Vec<f64> {
        let lmin = lmax * min_ratio;
        let step = (lmin.ln() - lmax.ln()) / (len - 1) as f64;
        (0..len).map(|t| (lmax.ln() + step * t as f64).exp()).collect()
    }
}

#[inline]
fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn model_from(
    names: &[String],
    problem: &Problem,
    state: &SolveState,
    lambda: f64,
) -> FittedModel {
    let (b0, beta) = problem.original_coefficients(state);
    let mut coefficients = vec![b0];
    coefficients.extend(beta);
    FittedModel {
        spec: TermSpec::main_effects(names.iter().cloned()),
        link: problem.family.link(),
        coefficients,
        iterations: state.sweeps,
        deviance: problem.deviance(state),
        penalty: Some(PenaltyInfo {
            alpha: problem.alpha,
            lambda,
            penalty_factors: problem.pf.clone(),
        }),
    }
}

/// Fit an elastic net at the spec's lambda. The solution satisfies the
/// subgradient conditions at `1e-7` on the standardized scale; returned
/// coefficients are on the original scale with an unpenalized intercept.
pub fn fit_enet(
    design: ArrayView2<'_, f64>,
    names: &[String],
    response: &[f64],
    family: Family,
    spec: &PenaltySpec,
) -> Result<FittedModel> {
    fit_enet_with_init(design, names, response, family, spec, None)
}

/// Same as [`fit_enet`], warm-started from a previous fit's coefficients
/// (original scale, intercept first) when provided.
pub fn fit_enet_with_init(
    design: ArrayView2<'_, f64>,
    names: &[String],
    response: &[f64],
    family: Family,
    spec: &PenaltySpec,
    init: Option<&[f64]>,
) -> Result<FittedModel> {
    if spec.lambda < 0.0 {
        return Err(Error::Validation("lambda must be non-negative".into()));
    }
    let problem = Problem::new(design, response, family, spec.alpha, &spec.penalty_factors)?;
    let mut state = match init {
        Some(coefs) if coefs.len() == problem.k + 1 => problem.warm_state(coefs[0], &coefs[1..]),
        Some(_) => return Err(Error::Validation("warm start length mismatch".into())),
        None => problem.fresh_state(),
    };
    if init.is_none() && spec.lambda > 0.0 {
        // short geometric warm-up path for stability
        let lmax = problem.lambda_max(&mut state)?;
        if spec.lambda < lmax {
            let steps = 8;
            for t in 1..steps {
                let frac = t as f64 / steps as f64;
                let l = (lmax.ln() + frac * (spec.lambda.ln() - lmax.ln())).exp();
                problem.solve(l, &mut state)?;
            }
        }
    }
    problem.solve(spec.lambda, &mut state)?;
    Ok(model_from(names, &problem, &state, spec.lambda))
}

/// Warm-started fits along a shared lambda path; `visit` receives each
/// (index, lambda, state-derived model coefficients).
fn fit_path<F: FnMut(usize, f64, &Problem, &SolveState)>(
    problem: &Problem,
    lambdas: &[f64],
    mut visit: F,
) -> Result<()> {
    let mut state = problem.fresh_state();
    problem.solve(f64::INFINITY, &mut state)?;
    for (idx, &lambda) in lambdas.iter().enumerate() {
        problem.solve(lambda, &mut state)?;
        visit(idx, lambda, problem, &state);
    }
    Ok(())
}

/// Seeded fold assignment with sizes differing by at most one. When
/// `stratify` is given, classes are interleaved so every training set keeps
/// both classes whenever each class has at least two members.
fn make_folds(n: usize, k: usize, seed: u64, stratify: Option<&[f64]>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut stream = KeyStream::new(seed, &[0x666f6c64]); // "fold"
    match stratify {
        None => stream.shuffle(&mut order),
        Some(y) => {
            let mut zeros: Vec<usize> = (0..n).filter(|&i| y[i] <= 0.5).collect();
            let mut ones: Vec<usize> = (0..n).filter(|&i| y[i] > 0.5).collect();
            stream.shuffle(&mut zeros);
            stream.shuffle(&mut ones);
            order = ones;
            order.extend(zeros);
        }
    }
    let mut fold = vec![0usize; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % k;
    }
    fold
}

fn fold_keeps_both_classes(folds: &[usize], y: &[f64], k: usize) -> bool {
    for f in 0..k {
        let mut train_ones = 0usize;
        let mut train_zeros = 0usize;
        for (i, &fi) in folds.iter().enumerate() {
            if fi != f {
                if y[i] > 0.5 {
                    train_ones += 1;
                } else {
                    train_zeros += 1;
                }
            }
        }
        if train_ones == 0 || train_zeros == 0 {
            return false;
        }
    }
    true
}

/// K-fold cross-validation over the standard lambda path. The path is
/// anchored at the full-data lambda_max; each fold refits the whole path
/// with warm starts; the selected lambda minimizes mean validation loss
/// with ties broken toward the larger lambda.
#[allow(clippy::too_many_arguments)]
pub fn cv_select(
    design: ArrayView2<'_, f64>,
    names: &[String],
    response: &[f64],
    family: Family,
    alpha: f64,
    penalty_factors: &[f64],
    k_folds: usize,
    loss: CvLoss,
    seed: u64,
) -> Result<CvResult> {
    let n = design.nrows();
    if k_folds < 2 {
        return Err(Error::CrossValidation("need at least 2 folds".into()));
    }
    if n < 2 * k_folds {
        return Err(Error::CrossValidation(format!(
            "need n >= 2k rows for {k_folds}-fold CV, have {n}"
        )));
    }
    let full = Problem::new(design, response, family, alpha, penalty_factors)?;
    let lmax = {
        let mut state = full.fresh_state();
        full.lambda_max(&mut state)?
    };
    let lambdas = Problem::lambda_path(lmax, PATH_LEN, PATH_MIN_RATIO);

    let mut folds = make_folds(n, k_folds, seed, None);
    if family == Family::Logistic && !fold_keeps_both_classes(&folds, response, k_folds) {
        folds = make_folds(n, k_folds, seed, Some(response));
        if !fold_keeps_both_classes(&folds, response, k_folds) {
            return Err(Error::CrossValidation(
                "cannot stratify folds: a response class has too few members".into(),
            ));
        }
    }

    let per_fold: Result<Vec<Vec<f64>>> = (0..k_folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..n).filter(|&i| folds[i] != f).collect();
            let valid: Vec<usize> = (0..n).filter(|&i| folds[i] == f).collect();
            let mut sub_design = ndarray::Array2::zeros((train.len(), design.ncols()));
            let mut sub_y = Vec::with_capacity(train.len());
            for (r, &i) in train.iter().enumerate() {
                for j in 0..design.ncols() {
                    sub_design[[r, j]] = design[[i, j]];
                }
                sub_y.push(response[i]);
            }
            let problem = Problem::new(sub_design.view(), &sub_y, family, alpha, penalty_factors)?;
            let mut losses = vec![0.0; lambdas.len()];
            fit_path(&problem, &lambdas, |idx, _l, prob, state| {
                let (b0, beta) = prob.original_coefficients(state);
                let mut total = 0.0;
                for &i in &valid {
                    let mut eta = b0;
                    for j in 0..design.ncols() {
                        eta += design[[i, j]] * beta[j];
                    }
                    total += match (family, loss) {
                        (Family::Linear, CvLoss::Mse) => {
                            let d = response[i] - eta;
                            d * d
                        }
                        (Family::Logistic, CvLoss::Mse) => {
                            let d = response[i] - expit(eta);
                            d * d
                        }
                        (_, CvLoss::Misclassification) => {
                            let pred = if family == Family::Logistic {
                                expit(eta)
                            } else {
                                eta
                            };
                            let class = if pred > 0.5 { 1.0 } else { 0.0 };
                            if class != response[i] {
                                1.0
                            } else {
                                0.0
                            }
                        }
                    };
                }
                losses[idx] = total / valid.len() as f64;
            })?;
            Ok(losses)
        })
        .collect();
    let per_fold = per_fold?;

    let mut mean_loss = vec![0.0; lambdas.len()];
    let mut se_loss = vec![0.0; lambdas.len()];
    for idx in 0..lambdas.len() {
        let vals: Vec<f64> = per_fold.iter().map(|f| f[idx]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (vals.len() as f64 - 1.0).max(1.0);
        mean_loss[idx] = mean;
        se_loss[idx] = (var / vals.len() as f64).sqrt();
    }
    let mut selected_index = 0;
    for idx in 1..lambdas.len() {
        if mean_loss[idx] < mean_loss[selected_index] {
            selected_index = idx;
        }
    }
    Ok(CvResult {
        selected_lambda: lambdas[selected_index],
        lambdas,
        mean_loss,
        se_loss,
        selected_index,
        seed,
    })
}

/// Selection rule applied to a CV curve: minimum mean loss, or the largest
/// lambda within one standard error of the minimum.
pub fn one_se_index(cv: &CvResult) -> usize {
    let min = cv.selected_index;
    let bound = cv.mean_loss[min] + cv.se_loss[min];
    (0..=min).find(|&i| cv.mean_loss[i] <= bound).unwrap_or(min)
}

/// Names of penalized columns with non-zero coefficients. Forced columns
/// (penalty factor zero) are excluded; inspect the model directly for them.
pub fn active_set(model: &FittedModel) -> Result<Vec<String>> {
    let penalty = model
        .penalty
        .as_ref()
        .ok_or_else(|| Error::Validation("model was not fitted with a penalty".into()))?;
    let labels = model.spec.labels();
    let mut out = Vec::new();
    for (j, pf) in penalty.penalty_factors.iter().enumerate() {
        let coef = model.coefficients[j + 1];
        if *pf > 0.0 && coef != 0.0 {
            out.push(labels[j + 1].clone());
        }
    }
    Ok(out)
}
