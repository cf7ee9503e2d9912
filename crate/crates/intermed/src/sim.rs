//! Data-generating processes with known ground truth: structural-equation
//! specs, dataset generation, and direct Monte Carlo evaluation of the true
//! interventional effects (the oracle used to validate the estimator).

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::effects::{
    build_duplicated_rows, compute_effects, DrawMode, EffectDecomposition, EstimandRow,
    EstimandTable, HypotheticalAssignment, ReferenceArm,
};
use crate::error::{Error, Result};
use crate::glm::{expit, LinkFunction};
use crate::rng::KeyStream;

const GEN_TAG: u64 = 0x6765_6e00;
const ORACLE_TAG: u64 = 0x6f72_6100;

/// How treatment is assigned in a DGP.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreatmentAssignment {
    Randomized { prob: f64 },
    Logistic { intercept: f64, covariate_coefs: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParentLink {
    pub parent: usize,
    pub coef: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionLink {
    pub first: usize,
    pub second: usize,
    pub coef: f64,
}

fn default_noise() -> f64 {
    1.0
}

/// Structural equation for one mediator. Parents must have smaller indices,
/// so the mediator graph is acyclic by construction. Binary mediators are
/// thresholded latent Gaussians.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MediatorEquation {
    pub name: String,
    #[serde(default)]
    pub binary: bool,
    #[serde(default)]
    pub intercept: f64,
    #[serde(default)]
    pub treatment_coef: f64,
    #[serde(default)]
    pub covariate_coefs: Vec<f64>,
    #[serde(default)]
    pub factor_coefs: Vec<f64>,
    #[serde(default)]
    pub parent_coefs: Vec<ParentLink>,
    /// Treatment-by-parent interactions: these change the mediator
    /// dependence structure across arms.
    #[serde(default)]
    pub treatment_parent_coefs: Vec<ParentLink>,
    #[serde(default = "default_noise")]
    pub noise_sd: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeEquation {
    pub binary: bool,
    #[serde(default)]
    pub intercept: f64,
    #[serde(default)]
    pub treatment_coef: f64,
    #[serde(default)]
    pub mediator_coefs: Vec<f64>,
    #[serde(default)]
    pub mediator_interactions: Vec<InteractionLink>,
    #[serde(default)]
    pub covariate_coefs: Vec<f64>,
    #[serde(default = "default_noise")]
    pub noise_sd: f64,
}

/// A complete data-generating process. The estimator never sees the
/// structural equations, only datasets emitted by [`generate`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DgpSpec {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub covariates: usize,
    pub treatment: TreatmentAssignment,
    #[serde(default)]
    pub latent_factors: usize,
    pub mediators: Vec<MediatorEquation>,
    pub outcome: OutcomeEquation,
}

impl DgpSpec {
    pub fn from_json(text: &str) -> Result<DgpSpec> {
        let spec: DgpSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<DgpSpec> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn p(&self) -> usize {
        self.mediators.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mediators.is_empty() {
            return Err(Error::Validation("DGP needs at least one mediator".into()));
        }
        if self.n == 0 {
            return Err(Error::Validation("DGP needs n >= 1".into()));
        }
        for (j, med) in self.mediators.iter().enumerate() {
            for link in med.parent_coefs.iter().chain(&med.treatment_parent_coefs) {
                if link.parent >= j {
                    return Err(Error::Validation(format!(
                        "mediator {} has parent index {} not earlier than itself",
                        med.name, link.parent
                    )));
                }
            }
            if med.covariate_coefs.len() > self.covariates {
                return Err(Error::Validation(format!(
                    "mediator {} has more covariate coefficients than covariates",
                    med.name
                )));
            }
            if med.factor_coefs.len() > self.latent_factors {
                return Err(Error::Validation(format!(
                    "mediator {} has more factor loadings than latent factors",
                    med.name
                )));
            }
            if !med.noise_sd.is_finite() || med.noise_sd < 0.0 {
                return Err(Error::Validation("mediator noise sd must be >= 0".into()));
            }
        }
        if self.outcome.mediator_coefs.len() != self.mediators.len() {
            return Err(Error::Validation(
                "outcome mediator coefficient count must equal mediator count".into(),
            ));
        }
        for inter in &self.outcome.mediator_interactions {
            if inter.first >= self.p() || inter.second >= self.p() {
                return Err(Error::Validation("interaction index out of range".into()));
            }
        }
        if self.outcome.covariate_coefs.len() > self.covariates {
            return Err(Error::Validation(
                "outcome has more covariate coefficients than covariates".into(),
            ));
        }
        if let TreatmentAssignment::Logistic { covariate_coefs, .. } = &self.treatment {
            if covariate_coefs.len() > self.covariates {
                return Err(Error::Validation(
                    "treatment model has more coefficients than covariates".into(),
                ));
            }
        }
        Ok(())
    }

    /// Mediators that actually enter the outcome equation.
    fn outcome_relevant(&self) -> Vec<usize> {
        let mut relevant: Vec<usize> = Vec::new();
        for (j, &c) in self.outcome.mediator_coefs.iter().enumerate() {
            if c != 0.0 {
                relevant.push(j);
            }
        }
        for inter in &self.outcome.mediator_interactions {
            if inter.coef != 0.0 {
                relevant.push(inter.first);
                relevant.push(inter.second);
            }
        }
        relevant.sort_unstable();
        relevant.dedup();
        relevant
    }

    /// Simulate mediators 0..=upto under the given arm into `out`.
    /// Ancestors always precede children, so a prefix is self-contained.
    fn simulate_mediator_prefix(&self, arm: f64, upto: usize, stream: &mut KeyStream, out: &mut [f64]) {
        let q = self.covariates;
        let mut l = [0.0f64; 16];
        for lj in l.iter_mut().take(q.min(16)) {
            *lj = stream.next_normal();
        }
        let mut factors = [0.0f64; 16];
        for fj in factors.iter_mut().take(self.latent_factors.min(16)) {
            *fj = stream.next_normal();
        }
        for (j, med) in self.mediators.iter().enumerate().take(upto + 1) {
            let mut value = med.intercept + med.treatment_coef * arm;
            for (c, coef) in med.covariate_coefs.iter().enumerate() {
                value += coef * l[c];
            }
            for (f, coef) in med.factor_coefs.iter().enumerate() {
                value += coef * factors[f];
            }
            for link in &med.parent_coefs {
                value += link.coef * out[link.parent];
            }
            for link in &med.treatment_parent_coefs {
                value += link.coef * arm * out[link.parent];
            }
            value += med.noise_sd * stream.next_normal();
            out[j] = if med.binary {
                if value > 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                value
            };
        }
    }

    /// True conditional mean of the outcome given treatment, mediator
    /// values, and covariates.
    fn outcome_mean(&self, a0: f64, meds: &[f64], covs: &[f64]) -> f64 {
        let mut eta = self.outcome.intercept + self.outcome.treatment_coef * a0;
        for (j, coef) in self.outcome.mediator_coefs.iter().enumerate() {
            eta += coef * meds[j];
        }
        for inter in &self.outcome.mediator_interactions {
            eta += inter.coef * meds[inter.first] * meds[inter.second];
        }
        for (c, coef) in self.outcome.covariate_coefs.iter().enumerate() {
            eta += coef * covs[c];
        }
        if self.outcome.binary {
            expit(eta)
        } else {
            eta
        }
    }
}

/// Generate a dataset from the DGP. Rows are keyed independently by
/// (seed, row), so generation is parallel and bit-stable per seed.
pub fn generate(spec: &DgpSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n;
    let p = spec.p();
    let q = spec.covariates;
    let rows: Vec<(f64, Vec<f64>, f64, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut stream = KeyStream::new(seed, &[GEN_TAG, i as u64]);
            let covs: Vec<f64> = (0..q).map(|_| stream.next_normal()).collect();
            let a = match &spec.treatment {
                TreatmentAssignment::Randomized { prob } => {
                    if stream.next_bernoulli(*prob) {
                        1.0
                    } else {
                        0.0
                    }
                }
                TreatmentAssignment::Logistic {
                    intercept,
                    covariate_coefs,
                } => {
                    let mut eta = *intercept;
                    for (c, coef) in covariate_coefs.iter().enumerate() {
                        eta += coef * covs[c];
                    }
                    if stream.next_bernoulli(expit(eta)) {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            let mut factors = vec![0.0; spec.latent_factors];
            for f in factors.iter_mut() {
                *f = stream.next_normal();
            }
            let mut meds = vec![0.0; p];
            for (j, med) in spec.mediators.iter().enumerate() {
                let mut value = med.intercept + med.treatment_coef * a;
                for (c, coef) in med.covariate_coefs.iter().enumerate() {
                    value += coef * covs[c];
                }
                for (f, coef) in med.factor_coefs.iter().enumerate() {
                    value += coef * factors[f];
                }
                for link in &med.parent_coefs {
                    value += link.coef * meds[link.parent];
                }
                for link in &med.treatment_parent_coefs {
                    value += link.coef * a * meds[link.parent];
                }
                value += med.noise_sd * stream.next_normal();
                meds[j] = if med.binary {
                    if value > 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    value
                };
            }
            let mean = spec.outcome_mean(a, &meds, &covs);
            let y = if spec.outcome.binary {
                if stream.next_bernoulli(mean) {
                    1.0
                } else {
                    0.0
                }
            } else {
                mean + spec.outcome.noise_sd * stream.next_normal()
            };
            (a, meds, y, covs)
        })
        .collect();

    let mut treatment = Vec::with_capacity(n);
    let mut mediators = Array2::zeros((n, p));
    let mut outcome = Vec::with_capacity(n);
    let mut covariates = Array2::zeros((n, q));
    for (i, (a, meds, y, covs)) in rows.into_iter().enumerate() {
        treatment.push(a);
        for (j, m) in meds.into_iter().enumerate() {
            mediators[[i, j]] = m;
        }
        outcome.push(y);
        for (c, v) in covs.into_iter().enumerate() {
            covariates[[i, c]] = v;
        }
    }
    Dataset::new(
        treatment,
        mediators,
        outcome,
        spec.outcome.binary,
        covariates,
        "A".into(),
        "Y".into(),
        spec.mediators.iter().map(|m| m.name.clone()).collect(),
        (0..q).map(|c| format!("L{}", c + 1)).collect(),
    )
}

/// True effects evaluated by large-sample Monte Carlo directly from the
/// structural equations, plus delta-method MC standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleEffects {
    pub effects: EffectDecomposition,
    pub effect_names: Vec<String>,
    /// MC standard error per effect (same order as `effects.values()`).
    pub effect_se: Vec<f64>,
    pub n_samples: usize,
}

/// Draw specification for one oracle sample of one unique row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum UniqueRow {
    Joint { a0: u8, arm: u8 },
    Marginal { a0: u8, arms: Vec<u8> },
}

/// Evaluate the estimand definitions directly from the DGP: counterfactual
/// mediator vectors are simulated from the structural equations (never from
/// data), with common random numbers shared across rows exactly as in the
/// estimator.
pub fn oracle(spec: &DgpSpec, n_samples: usize, link: LinkFunction, seed: u64) -> Result<OracleEffects> {
    spec.validate()?;
    let p = spec.p();
    let relevant = spec.outcome_relevant();
    let max_relevant = relevant.iter().copied().max().unwrap_or(0);
    let rows = build_duplicated_rows(p);

    // Estimands depend on arms only through the outcome-relevant mediators,
    // so rows that agree there share one simulation.
    let mut unique: Vec<UniqueRow> = Vec::new();
    let mut row_to_unique: Vec<usize> = Vec::with_capacity(rows.len());
    for row in &rows {
        let key = match row.mode {
            DrawMode::Joint => UniqueRow::Joint {
                a0: row.a0,
                arm: row.arms[0],
            },
            DrawMode::Marginal => UniqueRow::Marginal {
                a0: row.a0,
                arms: relevant.iter().map(|&j| row.arms[j]).collect(),
            },
        };
        let idx = unique.iter().position(|u| *u == key).unwrap_or_else(|| {
            unique.push(key.clone());
            unique.len() - 1
        });
        row_to_unique.push(idx);
    }
    let u_count = unique.len();

    // Which marginal worlds are needed: (relevant mediator, arm) pairs.
    let mut need_marginal = vec![[false; 2]; p];
    let mut need_joint = [false; 2];
    for u in &unique {
        match u {
            UniqueRow::Joint { arm, .. } => need_joint[*arm as usize] = true,
            UniqueRow::Marginal { arms, .. } => {
                for (r, &j) in relevant.iter().enumerate() {
                    need_marginal[j][arms[r] as usize] = true;
                }
            }
        }
    }
    let alias_single = p == 1;
    if alias_single {
        for a in 0..2 {
            need_joint[a] = need_joint[a] || need_marginal[0][a];
        }
    }

    let q = spec.covariates;
    let block_size = 8192usize;
    let blocks = n_samples.div_ceil(block_size);

    // Per-block accumulators: sums and cross-products of the per-sample
    // h values over unique rows.
    let acc: Vec<(Vec<f64>, Vec<f64>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * block_size;
            let end = ((b + 1) * block_size).min(n_samples);
            let mut sums = vec![0.0; u_count];
            let mut cross = vec![0.0; u_count * u_count];
            let mut joint_world = [vec![0.0; p], vec![0.0; p]];
            let mut marginal_value = vec![[0.0f64; 2]; p];
            let mut covs = vec![0.0; q];
            let mut med_buf = vec![0.0; p];
            let mut h = vec![0.0; u_count];
            for j_sample in start..end {
                let js = j_sample as u64;
                let mut l_stream = KeyStream::new(seed, &[ORACLE_TAG, 1, js]);
                for c in covs.iter_mut() {
                    *c = l_stream.next_normal();
                }
                for arm in 0..2usize {
                    if need_joint[arm] {
                        let mut stream = KeyStream::new(seed, &[ORACLE_TAG, 2, arm as u64, js]);
                        spec.simulate_mediator_prefix(
                            arm as f64,
                            max_relevant,
                            &mut stream,
                            &mut joint_world[arm],
                        );
                    }
                }
                for &j in &relevant {
                    for arm in 0..2usize {
                        if need_marginal[j][arm] {
                            if alias_single {
                                marginal_value[j][arm] = joint_world[arm][j];
                            } else {
                                let mut stream =
                                    KeyStream::new(seed, &[ORACLE_TAG, 3, j as u64, arm as u64, js]);
                                spec.simulate_mediator_prefix(arm as f64, j, &mut stream, &mut med_buf);
                                marginal_value[j][arm] = med_buf[j];
                            }
                        }
                    }
                }
                for (u, urow) in unique.iter().enumerate() {
                    let value = match urow {
                        UniqueRow::Joint { a0, arm } => {
                            let world = &joint_world[*arm as usize];
                            spec.outcome_mean(*a0 as f64, world, &covs)
                        }
                        UniqueRow::Marginal { a0, arms } => {
                            for (r, &j) in relevant.iter().enumerate() {
                                med_buf[j] = marginal_value[j][arms[r] as usize];
                            }
                            spec.outcome_mean(*a0 as f64, &med_buf, &covs)
                        }
                    };
                    h[u] = value;
                }
                for u in 0..u_count {
                    sums[u] += h[u];
                    for v in u..u_count {
                        cross[u * u_count + v] += h[u] * h[v];
                    }
                }
            }
            (sums, cross)
        })
        .collect();

    let mut sums = vec![0.0; u_count];
    let mut cross = vec![0.0; u_count * u_count];
    for (s, c) in acc {
        for u in 0..u_count {
            sums[u] += s[u];
        }
        for idx in 0..cross.len() {
            cross[idx] += c[idx];
        }
    }
    let nf = n_samples as f64;
    let means: Vec<f64> = sums.iter().map(|s| s / nf).collect();
    // covariance of the row means
    let mut cov = vec![0.0; u_count * u_count];
    for u in 0..u_count {
        for v in u..u_count {
            let c = (cross[u * u_count + v] / nf - means[u] * means[v]) / nf;
            cov[u * u_count + v] = c;
            cov[v * u_count + u] = c;
        }
    }

    // effects from an estimand table (identities exact by construction)
    let table = EstimandTable {
        rows: rows
            .iter()
            .zip(&row_to_unique)
            .map(|(assignment, &u)| EstimandRow {
                assignment: assignment.clone(),
                estimate: means[u],
                individual_means: Vec::new(),
            })
            .collect(),
        draws: 0,
        reference: ReferenceArm::Control,
    };
    let effects = compute_effects(&table, link)?;

    // delta method: each effect is a signed combination of g(mean_u)
    let gprime = |x: f64| -> f64 {
        match link {
            LinkFunction::Identity => 1.0,
            LinkFunction::Log => 1.0 / x,
            LinkFunction::Logit => 1.0 / (x * (1.0 - x)),
        }
    };
    let coeff_for = |targets: Vec<(DrawMode, u8, Vec<u8>)>, signs: Vec<f64>| -> Vec<f64> {
        let mut c = vec![0.0; u_count];
        for ((mode, a0, arms), sign) in targets.into_iter().zip(signs) {
            let idx = rows
                .iter()
                .position(|r| r.mode == mode && r.a0 == a0 && r.arms == arms)
                .expect("row exists");
            c[row_to_unique[idx]] += sign;
        }
        c
    };
    let all0 = vec![0u8; p];
    let all1 = vec![1u8; p];
    let mut effect_coeffs: Vec<Vec<f64>> = Vec::new();
    // total, direct, joint indirect
    effect_coeffs.push(coeff_for(
        vec![
            (DrawMode::Joint, 1, all1.clone()),
            (DrawMode::Joint, 0, all0.clone()),
        ],
        vec![1.0, -1.0],
    ));
    effect_coeffs.push(coeff_for(
        vec![
            (DrawMode::Joint, 1, all1.clone()),
            (DrawMode::Joint, 0, all1.clone()),
        ],
        vec![1.0, -1.0],
    ));
    effect_coeffs.push(coeff_for(
        vec![
            (DrawMode::Joint, 0, all1.clone()),
            (DrawMode::Joint, 0, all0.clone()),
        ],
        vec![1.0, -1.0],
    ));
    for s in 0..p {
        let mut arms = vec![0u8; p];
        arms[s] = 1;
        effect_coeffs.push(coeff_for(
            vec![
                (DrawMode::Marginal, 0, arms),
                (DrawMode::Marginal, 0, all0.clone()),
            ],
            vec![1.0, -1.0],
        ));
    }
    effect_coeffs.push(coeff_for(
        vec![
            (DrawMode::Joint, 0, all1.clone()),
            (DrawMode::Marginal, 0, all1.clone()),
            (DrawMode::Joint, 0, all0.clone()),
            (DrawMode::Marginal, 0, all0.clone()),
        ],
        vec![1.0, -1.0, -1.0, 1.0],
    ));
    {
        // remainder = (m1 - m0) - sum_s (ms - m0)
        let mut targets = vec![
            (DrawMode::Marginal, 0, all1.clone()),
            (DrawMode::Marginal, 0, all0.clone()),
        ];
        let mut signs = vec![1.0, -1.0 + p as f64];
        for s in 0..p {
            let mut arms = vec![0u8; p];
            arms[s] = 1;
            targets.push((DrawMode::Marginal, 0, arms));
            signs.push(-1.0);
        }
        effect_coeffs.push(coeff_for(targets, signs));
    }

    let mut effect_se = Vec::with_capacity(effect_coeffs.len());
    for coeffs in &effect_coeffs {
        let mut var = 0.0;
        for u in 0..u_count {
            if coeffs[u] == 0.0 {
                continue;
            }
            for v in 0..u_count {
                if coeffs[v] == 0.0 {
                    continue;
                }
                var += coeffs[u] * gprime(means[u]) * coeffs[v] * gprime(means[v])
                    * cov[u * u_count + v];
            }
        }
        effect_se.push(var.max(0.0).sqrt());
    }

    let mediator_names: Vec<String> = spec.mediators.iter().map(|m| m.name.clone()).collect();
    Ok(OracleEffects {
        effects,
        effect_names: EffectDecomposition::names(&mediator_names),
        effect_se,
        n_samples,
    })
}

/// Built-in committed DGP specs.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "study1",
        "study1-observational",
        "study1-cov-invariant",
        "study1-cov-shift",
        "study2",
        "null",
        "single-mediator",
    ]
}

pub fn builtin(name: &str) -> Result<DgpSpec> {
    let text = match name {
        "study1" => include_str!("../dgps/study1.json"),
        "study1-observational" => include_str!("../dgps/study1_observational.json"),
        "study1-cov-invariant" => include_str!("../dgps/study1_cov_invariant.json"),
        "study1-cov-shift" => include_str!("../dgps/study1_cov_shift.json"),
        "study2" => include_str!("../dgps/study2.json"),
        "null" => include_str!("../dgps/null.json"),
        "single-mediator" => include_str!("../dgps/single_mediator.json"),
        other => {
            return Err(Error::Config(format!(
                "unknown DGP {other:?}; built-ins are {:?}",
                builtin_names()
            )))
        }
    };
    DgpSpec::from_json(text)
}

/// Resolve a DGP argument: a built-in name or a path to a spec JSON file.
pub fn resolve_dgp(arg: &str) -> Result<DgpSpec> {
    if builtin_names().contains(&arg) {
        return builtin(arg);
    }
    let path = std::path::Path::new(arg);
    if path.exists() {
        return DgpSpec::from_json_file(path);
    }
    Err(Error::Config(format!(
        "DGP {arg:?} is neither a built-in name nor an existing file"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn builtins_parse_and_validate() {
        for name in builtin_names() {
            let spec = builtin(name).unwrap();
            assert!(spec.p() >= 1, "{name}");
        }
    }

    #[test]
    fn generation_is_deterministic_and_seed_sensitive() {
        let spec = builtin("study1").unwrap();
        let a = generate(&spec, 5).unwrap();
        let b = generate(&spec, 5).unwrap();
        let c = generate(&spec, 6).unwrap();
        assert_eq!(a.treatment(), b.treatment());
        assert_eq!(a.mediators(), b.mediators());
        assert_ne!(a.mediators(), c.mediators());
        assert_eq!(a.n(), spec.n);
        assert_eq!(a.p(), spec.p());
    }

    #[test]
    fn null_oracle_is_zero() {
        let spec = builtin("null").unwrap();
        let oracle = oracle(&spec, 200_000, LinkFunction::Logit, 3).unwrap();
        for (v, se) in oracle.effects.values().iter().zip(&oracle.effect_se) {
            assert!(v.abs() <= 4.0 * se + 1e-12, "effect {v}, se {se}");
        }
    }

    #[test]
    fn oracle_self_consistency_across_seeds() {
        let spec = builtin("study1").unwrap();
        let a = oracle(&spec, 400_000, LinkFunction::Logit, 11).unwrap();
        let b = oracle(&spec, 400_000, LinkFunction::Logit, 12).unwrap();
        for ((va, vb), (sa, sb)) in a
            .effects
            .values()
            .iter()
            .zip(b.effects.values())
            .zip(a.effect_se.iter().zip(&b.effect_se))
        {
            let tol = 4.0 * (sa * sa + sb * sb).sqrt();
            assert!((va - vb).abs() <= tol, "{va} vs {vb}, tol {tol}");
        }
    }

    #[test]
    fn linear_identity_oracle_direct_effect_is_treatment_coef() {
        // continuous outcome, identity link, no interaction: DE equals the
        // outcome equation's treatment coefficient exactly (shared draws)
        let mut spec = builtin("study1-cov-invariant").unwrap();
        spec.outcome.mediator_interactions.clear();
        let oracle = oracle(&spec, 100_000, LinkFunction::Identity, 4).unwrap();
        assert_abs_diff_eq!(oracle.effects.direct, spec.outcome.treatment_coef, epsilon = 1e-9);
    }

    #[test]
    fn cov_invariant_oracle_mutual_is_zero() {
        let spec = builtin("study1-cov-invariant").unwrap();
        let o = oracle(&spec, 500_000, LinkFunction::Identity, 9).unwrap();
        let se = o.effect_se[o.effect_names.iter().position(|n| n == "mutual").unwrap()];
        assert!(
            o.effects.mutual.abs() <= 4.0 * se + 1e-10,
            "mutual {} se {se}",
            o.effects.mutual
        );
    }

    #[test]
    fn cov_shift_oracle_mutual_matches_closed_form() {
        // linear outcome + normal mediators: mutual = beta_12 * (cov1 - cov0)
        let spec = builtin("study1-cov-shift").unwrap();
        let m2 = &spec.mediators[1];
        let gamma0 = m2.parent_coefs[0].coef;
        let gamma1 = gamma0 + m2.treatment_parent_coefs[0].coef;
        let m1 = &spec.mediators[0];
        let var_m1: f64 = m1.covariate_coefs.iter().map(|c| c * c).sum::<f64>()
            + m1.factor_coefs.iter().map(|c| c * c).sum::<f64>()
            + m1.noise_sd * m1.noise_sd;
        // shared factor loading contributes to the covariance in both arms
        let shared: f64 = m1
            .factor_coefs
            .iter()
            .zip(&m2.factor_coefs)
            .map(|(a, b)| a * b)
            .sum();
        let cov0 = gamma0 * var_m1 + shared;
        let cov1 = gamma1 * var_m1 + shared;
        let beta12 = spec.outcome.mediator_interactions[0].coef;
        let expected = beta12 * (cov1 - cov0);
        let o = oracle(&spec, 2_000_000, LinkFunction::Identity, 2).unwrap();
        let se = o.effect_se[o.effect_names.iter().position(|n| n == "mutual").unwrap()];
        assert!(
            (o.effects.mutual - expected).abs() <= 4.0 * se + 1e-6,
            "mutual {} expected {expected} se {se}",
            o.effects.mutual
        );
    }

    #[test]
    fn oracle_identities_exact() {
        let spec = builtin("study1").unwrap();
        let o = oracle(&spec, 100_000, LinkFunction::Logit, 21).unwrap();
        let e = &o.effects;
        let sum_ie: f64 = e.indirect.iter().sum();
        assert_abs_diff_eq!(e.total, e.direct + e.joint_indirect, epsilon = 1e-12);
        assert_abs_diff_eq!(e.joint_indirect - sum_ie, e.mutual + e.remainder, epsilon = 1e-12);
    }
}
