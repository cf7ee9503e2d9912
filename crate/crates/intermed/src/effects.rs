//! The core estimator: duplicated-data rows over hypothetical treatment
//! assignments, Monte Carlo imputation of potential outcomes with common
//! random numbers, and the interventional effect decomposition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counterfactual::{donor_for_key, donor_pool, DonorPool, DrawKey, DrawSlot, TreatmentMode};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::{build_design, Family, FittedModel, LinkFunction, Term, TermSpec};

/// Whether a duplicated-data row draws mediators jointly (one donor's whole
/// vector) or marginally (an independent donor per mediator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DrawMode {
    Joint,
    Marginal,
}

/// Which arm anchors the duplicated-data construction. `Control` reproduces
/// the standard rows (mediator baselines at arm 0); `Treated` is the
/// mirrored variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceArm {
    #[default]
    Control,
    Treated,
}

/// One duplicated-data row: the outcome-model treatment slot a0 and the
/// hypothetical arm for each mediator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HypotheticalAssignment {
    pub a0: u8,
    pub arms: Vec<u8>,
    pub mode: DrawMode,
}

impl HypotheticalAssignment {
    pub fn joint(a0: u8, a1: u8, p: usize) -> Self {
        HypotheticalAssignment {
            a0,
            arms: vec![a1; p],
            mode: DrawMode::Joint,
        }
    }

    pub fn marginal(a0: u8, arms: Vec<u8>) -> Self {
        HypotheticalAssignment {
            a0,
            arms,
            mode: DrawMode::Marginal,
        }
    }

    pub fn label(&self) -> String {
        let arms: String = self.arms.iter().map(|a| char::from(b'0' + a)).collect();
        match self.mode {
            DrawMode::Joint => format!("joint(a0={}, arms={arms})", self.a0),
            DrawMode::Marginal => format!("marginal(a0={}, arms={arms})", self.a0),
        }
    }
}

/// The duplicated-data rows needed for the full decomposition: three joint
/// rows and p+2 marginal rows, de-duplicated by (mode, a0, arms).
pub fn build_duplicated_rows(p: usize) -> Vec<HypotheticalAssignment> {
    build_duplicated_rows_ref(p, ReferenceArm::Control)
}

pub fn build_duplicated_rows_ref(p: usize, reference: ReferenceArm) -> Vec<HypotheticalAssignment> {
    assert!(p >= 1, "at least one mediator required");
    let mut rows = Vec::with_capacity(p + 5);
    match reference {
        ReferenceArm::Control => {
            rows.push(HypotheticalAssignment::joint(0, 0, p));
            rows.push(HypotheticalAssignment::joint(0, 1, p));
            rows.push(HypotheticalAssignment::joint(1, 1, p));
            rows.push(HypotheticalAssignment::marginal(0, vec![0; p]));
            for s in 0..p {
                let mut arms = vec![0; p];
                arms[s] = 1;
                rows.push(HypotheticalAssignment::marginal(0, arms));
            }
            rows.push(HypotheticalAssignment::marginal(0, vec![1; p]));
        }
        ReferenceArm::Treated => {
            rows.push(HypotheticalAssignment::joint(0, 0, p));
            rows.push(HypotheticalAssignment::joint(1, 0, p));
            rows.push(HypotheticalAssignment::joint(1, 1, p));
            rows.push(HypotheticalAssignment::marginal(1, vec![1; p]));
            for s in 0..p {
                let mut arms = vec![1; p];
                arms[s] = 0;
                rows.push(HypotheticalAssignment::marginal(1, arms));
            }
            rows.push(HypotheticalAssignment::marginal(1, vec![0; p]));
        }
    }
    let mut seen = std::collections::HashSet::new();
    rows.retain(|r| seen.insert((r.mode, r.a0, r.arms.clone())));
    rows
}

/// Monte Carlo estimate of one duplicated-data row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimandRow {
    pub assignment: HypotheticalAssignment,
    /// Mean over individuals of the per-individual draw averages (mean scale).
    pub estimate: f64,
    /// Per-individual averages over the K draws.
    #[serde(skip_serializing)]
    pub individual_means: Vec<f64>,
}

/// Estimands for every duplicated-data row, sharing one set of keyed draws.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimandTable {
    pub rows: Vec<EstimandRow>,
    pub draws: usize,
    pub reference: ReferenceArm,
}

impl EstimandTable {
    fn lookup(&self, mode: DrawMode, a0: u8, arms: &[u8]) -> Result<f64> {
        self.rows
            .iter()
            .find(|r| r.assignment.mode == mode && r.assignment.a0 == a0 && r.assignment.arms == arms)
            .map(|r| r.estimate)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "estimand table is missing row mode={mode:?} a0={a0} arms={arms:?}"
                ))
            })
    }
}

/// The full interventional decomposition on the link scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectDecomposition {
    pub link: LinkFunction,
    pub total: f64,
    pub direct: f64,
    pub joint_indirect: f64,
    /// Per-mediator indirect effects, in mediator column order.
    pub indirect: Vec<f64>,
    pub mutual: f64,
    pub remainder: f64,
}

impl EffectDecomposition {
    /// Effects flattened in a stable order: total, direct, joint indirect,
    /// per-mediator indirects, mutual dependence, remainder.
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![self.total, self.direct, self.joint_indirect];
        v.extend(&self.indirect);
        v.push(self.mutual);
        v.push(self.remainder);
        v
    }

    pub fn names(mediator_names: &[String]) -> Vec<String> {
        let mut v = vec!["total".to_string(), "direct".to_string(), "joint_indirect".to_string()];
        v.extend(mediator_names.iter().map(|m| format!("indirect_{m}")));
        v.push("mutual".to_string());
        v.push("remainder".to_string());
        v
    }
}

/// Seed context for keyed draws. `labels` names each mediator column with a
/// stable identity so permuted columns reuse the same draw streams.
#[derive(Debug, Clone)]
pub struct DrawContext {
    pub seed: u64,
    pub replicate: u64,
    pub labels: Vec<u64>,
}

impl DrawContext {
    pub fn new(seed: u64, replicate: u64, p: usize) -> Self {
        DrawContext {
            seed,
            replicate,
            labels: (0..p as u64).collect(),
        }
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Treatment,
    Mediator(usize),
    Covariate(usize),
}

struct CompiledTerm {
    coef: f64,
    slots: Vec<Slot>,
}

/// Resolve the model's named terms against the dataset layout once, so the
/// Monte Carlo loop evaluates products over indexed slots.
fn compile_model(model: &FittedModel, dataset: &Dataset) -> Result<(Vec<CompiledTerm>, Vec<usize>)> {
    let resolve = |name: &str| -> Result<Slot> {
        if name == dataset.treatment_name() {
            return Ok(Slot::Treatment);
        }
        if let Some(j) = dataset.mediator_index(name) {
            return Ok(Slot::Mediator(j));
        }
        if let Some(j) = dataset.covariate_names().iter().position(|c| c == name) {
            return Ok(Slot::Covariate(j));
        }
        Err(Error::Validation(format!(
            "outcome model references unknown column {name}"
        )))
    };
    let mut compiled = Vec::with_capacity(model.spec.len());
    let mut used = std::collections::BTreeSet::new();
    for (term, &coef) in model.spec.terms().iter().zip(model.coefficients.iter()) {
        let slots = match term {
            Term::Intercept => Vec::new(),
            Term::Main(c) => vec![resolve(c)?],
            Term::Product(cols) => cols.iter().map(|c| resolve(c)).collect::<Result<Vec<_>>>()?,
        };
        for s in &slots {
            if let Slot::Mediator(j) = s {
                used.insert(*j);
            }
        }
        compiled.push(CompiledTerm { coef, slots });
    }
    Ok((compiled, used.into_iter().collect()))
}

/// Monte Carlo estimands for the given duplicated-data rows.
///
/// For each individual and draw index, one donor per (arm, slot) is selected
/// by key and shared across every row that needs it, so contrasts between
/// rows differ only through the hypothetical assignment.
pub fn estimate_estimands(
    dataset: &Dataset,
    model: &FittedModel,
    pool: &DonorPool,
    rows: &[HypotheticalAssignment],
    k_draws: usize,
    ctx: &DrawContext,
) -> Result<EstimandTable> {
    if k_draws == 0 {
        return Err(Error::Validation("draw count K must be at least 1".into()));
    }
    if rows.is_empty() {
        return Err(Error::Validation("no duplicated-data rows supplied".into()));
    }
    let p = dataset.p();
    if ctx.labels.len() != p {
        return Err(Error::Validation("draw context labels must cover all mediators".into()));
    }
    for row in rows {
        if row.arms.len() != p {
            return Err(Error::Validation(format!(
                "row {} arm vector does not match p={p}",
                row.label()
            )));
        }
        if row.mode == DrawMode::Joint && row.arms.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Validation(format!(
                "joint row {} must use one arm for all mediators",
                row.label()
            )));
        }
    }

    let (terms, used_meds) = compile_model(model, dataset)?;
    let link = model.link;
    let n = dataset.n();
    let meds = dataset.mediators();
    let covs = dataset.covariates();

    // Which (slot, arm) donor streams are actually needed.
    let mut need_joint = [false; 2];
    let mut need_marg = vec![[false; 2]; p];
    for row in rows {
        match row.mode {
            DrawMode::Joint => need_joint[row.arms[0] as usize] = true,
            DrawMode::Marginal => {
                for &j in &used_meds {
                    need_marg[j][row.arms[j] as usize] = true;
                }
            }
        }
    }
    // With a single mediator the marginal distribution is the joint one, so
    // the marginal stream aliases the joint stream and the two estimands
    // coincide exactly under shared keys.
    let alias_single = p == 1;
    if alias_single {
        for a in 0..2 {
            need_joint[a] = need_joint[a] || need_marg[0][a];
        }
    }

    let per_individual: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sums = vec![0.0; rows.len()];
            let mut joint_donor = [usize::MAX; 2];
            let mut marg_values = vec![[0.0f64; 2]; p];
            let mut med_buf = vec![0.0f64; p];
            for k in 0..k_draws {
                for arm in 0..2u8 {
                    if need_joint[arm as usize] {
                        let key = DrawKey {
                            replicate: ctx.replicate,
                            individual: i as u64,
                            draw: k as u64,
                            slot: DrawSlot::Joint,
                            arm,
                        };
                        joint_donor[arm as usize] = donor_for_key(pool, ctx.seed, &key);
                    }
                }
                for &j in &used_meds {
                    for arm in 0..2u8 {
                        if need_marg[j][arm as usize] {
                            let donor = if alias_single {
                                joint_donor[arm as usize]
                            } else {
                                let key = DrawKey {
                                    replicate: ctx.replicate,
                                    individual: i as u64,
                                    draw: k as u64,
                                    slot: DrawSlot::Mediator(ctx.labels[j]),
                                    arm,
                                };
                                donor_for_key(pool, ctx.seed, &key)
                            };
                            marg_values[j][arm as usize] = meds[[donor, j]];
                        }
                    }
                }
                for (r, row) in rows.iter().enumerate() {
                    match row.mode {
                        DrawMode::Joint => {
                            let donor = joint_donor[row.arms[0] as usize];
                            for &j in &used_meds {
                                med_buf[j] = meds[[donor, j]];
                            }
                        }
                        DrawMode::Marginal => {
                            for &j in &used_meds {
                                med_buf[j] = marg_values[j][row.arms[j] as usize];
                            }
                        }
                    }
                    let a0 = row.a0 as f64;
                    let mut eta = 0.0;
                    for term in &terms {
                        let mut value = term.coef;
                        for slot in &term.slots {
                            value *= match slot {
                                Slot::Treatment => a0,
                                Slot::Mediator(j) => med_buf[*j],
                                Slot::Covariate(j) => covs[[i, *j]],
                            };
                        }
                        eta += value;
                    }
                    sums[r] += link.inverse(eta);
                }
            }
            for s in sums.iter_mut() {
                *s /= k_draws as f64;
            }
            sums
        })
        .collect();

    let mut out_rows = Vec::with_capacity(rows.len());
    for (r, assignment) in rows.iter().enumerate() {
        let mut individual_means = Vec::with_capacity(n);
        let mut total = 0.0;
        for means in per_individual.iter() {
            individual_means.push(means[r]);
            total += means[r];
        }
        let estimate = total / n as f64;
        if !estimate.is_finite() {
            return Err(Error::Validation(format!(
                "non-finite estimand for row {}",
                assignment.label()
            )));
        }
        if link == LinkFunction::Logit && (estimate <= 0.0 || estimate >= 1.0) {
            return Err(Error::LinkDomain(format!(
                "degenerate estimand {estimate} for row {}",
                assignment.label()
            )));
        }
        out_rows.push(EstimandRow {
            assignment: assignment.clone(),
            estimate,
            individual_means,
        });
    }
    let reference = rows
        .iter()
        .find(|r| r.mode == DrawMode::Marginal)
        .map(|r| {
            if r.a0 == 0 {
                ReferenceArm::Control
            } else {
                ReferenceArm::Treated
            }
        })
        .unwrap_or(ReferenceArm::Control);
    Ok(EstimandTable {
        rows: out_rows,
        draws: k_draws,
        reference,
    })
}

/// Assemble the decomposition from a shared estimand table. The identities
/// TE = DE + JIE and JIE - sum(IE_s) = IE_mutual + IE_remainder hold exactly
/// because every contrast reads the same table.
pub fn compute_effects(table: &EstimandTable, link: LinkFunction) -> Result<EffectDecomposition> {
    let p = table
        .rows
        .first()
        .map(|r| r.assignment.arms.len())
        .ok_or_else(|| Error::Validation("empty estimand table".into()))?;
    let g = |mode: DrawMode, a0: u8, arms: Vec<u8>| -> Result<f64> {
        let est = table.lookup(mode, a0, &arms)?;
        link.apply(est).map_err(|e| {
            Error::LinkDomain(format!(
                "{e} (row mode={mode:?} a0={a0} arms={arms:?})"
            ))
        })
    };
    match table.reference {
        ReferenceArm::Control => {
            let j00 = g(DrawMode::Joint, 0, vec![0; p])?;
            let j01 = g(DrawMode::Joint, 0, vec![1; p])?;
            let j11 = g(DrawMode::Joint, 1, vec![1; p])?;
            let m0 = g(DrawMode::Marginal, 0, vec![0; p])?;
            let m1 = g(DrawMode::Marginal, 0, vec![1; p])?;
            let mut indirect = Vec::with_capacity(p);
            for s in 0..p {
                let mut arms = vec![0; p];
                arms[s] = 1;
                indirect.push(g(DrawMode::Marginal, 0, arms)? - m0);
            }
            let sum_indirect: f64 = indirect.iter().sum();
            Ok(EffectDecomposition {
                link,
                total: j11 - j00,
                direct: j11 - j01,
                joint_indirect: j01 - j00,
                indirect,
                mutual: (j01 - m1) - (j00 - m0),
                remainder: (m1 - m0) - sum_indirect,
            })
        }
        ReferenceArm::Treated => {
            let j00 = g(DrawMode::Joint, 0, vec![0; p])?;
            let j10 = g(DrawMode::Joint, 1, vec![0; p])?;
            let j11 = g(DrawMode::Joint, 1, vec![1; p])?;
            let m1 = g(DrawMode::Marginal, 1, vec![1; p])?;
            let m0 = g(DrawMode::Marginal, 1, vec![0; p])?;
            let mut indirect = Vec::with_capacity(p);
            for s in 0..p {
                let mut arms = vec![1; p];
                arms[s] = 0;
                indirect.push(m1 - g(DrawMode::Marginal, 1, arms)?);
            }
            let sum_indirect: f64 = indirect.iter().sum();
            Ok(EffectDecomposition {
                link,
                total: j11 - j00,
                direct: j10 - j00,
                joint_indirect: j11 - j10,
                indirect,
                mutual: (j11 - m1) - (j10 - m0),
                remainder: (m1 - m0) - sum_indirect,
            })
        }
    }
}

/// Options for the end-to-end estimator pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorOptions {
    /// Monte Carlo draws per (individual, row).
    pub draws: usize,
    pub seed: u64,
    pub mode: TreatmentMode,
    /// Reporting link; defaults to logit for binary outcomes, identity
    /// otherwise.
    pub link: Option<LinkFunction>,
    /// Extra pairwise product terms for the outcome model.
    pub outcome_interactions: Vec<(String, String)>,
    pub reference: ReferenceArm,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            draws: 100,
            seed: 0,
            mode: TreatmentMode::Randomized,
            link: None,
            outcome_interactions: Vec::new(),
            reference: ReferenceArm::Control,
        }
    }
}

impl EstimatorOptions {
    pub fn effective_link(&self, dataset: &Dataset) -> LinkFunction {
        self.link.unwrap_or(if dataset.outcome_is_binary() {
            LinkFunction::Logit
        } else {
            LinkFunction::Identity
        })
    }
}

/// Outcome model term spec: intercept, treatment, all mediators, all
/// covariates, plus any configured interactions.
pub fn outcome_term_spec(dataset: &Dataset, interactions: &[(String, String)]) -> Result<TermSpec> {
    let mut columns: Vec<String> = vec![dataset.treatment_name().to_string()];
    columns.extend(dataset.mediator_names().iter().cloned());
    columns.extend(dataset.covariate_names().iter().cloned());
    let mut spec = TermSpec::main_effects(columns);
    for (a, b) in interactions {
        spec.push(Term::interaction(a.clone(), b.clone()))?;
    }
    Ok(spec)
}

/// Fit the outcome model (step one of the pipeline).
pub fn fit_outcome_model(dataset: &Dataset, options: &EstimatorOptions) -> Result<FittedModel> {
    let spec = outcome_term_spec(dataset, &options.outcome_interactions)?;
    if spec.len() >= dataset.n() {
        return Err(Error::Validation(format!(
            "outcome model has {} terms but only {} rows; use the high-dimensional pipeline",
            spec.len(),
            dataset.n()
        )));
    }
    let family = if dataset.outcome_is_binary() {
        Family::Logistic
    } else {
        Family::Linear
    };
    // validate every referenced column resolves
    build_design(&spec, dataset)?;
    FittedModel::fit(dataset, &spec, dataset.outcome(), family)
}

/// Full pipeline: fit the outcome model, build the donor pool, run the
/// Monte Carlo estimands for all duplicated rows, and assemble the
/// decomposition. `replicate` keys the draw streams (0 = original data).
pub fn estimate_effects(
    dataset: &Dataset,
    options: &EstimatorOptions,
    replicate: u64,
) -> Result<(EstimandTable, EffectDecomposition)> {
    let ctx = DrawContext::new(options.seed, replicate, dataset.p());
    estimate_effects_labeled(dataset, options, ctx)
}

pub fn estimate_effects_labeled(
    dataset: &Dataset,
    options: &EstimatorOptions,
    ctx: DrawContext,
) -> Result<(EstimandTable, EffectDecomposition)> {
    let model = fit_outcome_model(dataset, options)?;
    let pool = donor_pool(dataset, options.mode)?;
    let rows = build_duplicated_rows_ref(dataset.p(), options.reference);
    let table = estimate_estimands(dataset, &model, &pool, &rows, options.draws, &ctx)?;
    let link = options.effective_link(dataset);
    let effects = compute_effects(&table, link)?;
    Ok((table, effects))
}

/// Re-run the pipeline with mediator columns permuted and draw keys
/// permuted with them. Under shared keys the per-mediator indirect effects
/// are relabeled exactly and the aggregate effects are unchanged.
pub fn permute_mediators_check(
    dataset: &Dataset,
    permutation: &[usize],
    options: &EstimatorOptions,
    replicate: u64,
) -> Result<EffectDecomposition> {
    let permuted = dataset.permute_mediators(permutation)?;
    let ctx = DrawContext {
        seed: options.seed,
        replicate,
        labels: permutation.iter().map(|&j| j as u64).collect(),
    };
    let (_, effects) = estimate_effects_labeled(&permuted, options, ctx)?;
    Ok(effects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glm::{FittedModel, TermSpec};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn toy_dataset(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = crate::rng::KeyStream::new(seed, &[100]);
        let treatment: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
        let mut meds = Array2::zeros((n, p));
        for i in 0..n {
            for j in 0..p {
                meds[[i, j]] = rng.next_normal() + 0.5 * treatment[i];
            }
        }
        let outcome: Vec<f64> = (0..n)
            .map(|i| {
                let msum: f64 = (0..p).map(|j| meds[[i, j]]).sum();
                0.2 + 0.5 * treatment[i] + 0.3 * msum + 0.1 * rng.next_normal()
            })
            .collect();
        Dataset::new(
            treatment,
            meds,
            outcome,
            false,
            Array2::zeros((n, 0)),
            "A".into(),
            "Y".into(),
            (0..p).map(|j| format!("M{}", j + 1)).collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn duplicated_rows_p1() {
        let rows = build_duplicated_rows(1);
        // three joint rows plus two marginal rows (the all-1 marginal row
        // coincides with the s=1 row)
        assert_eq!(rows.len(), 5);
        let marginal: Vec<_> = rows.iter().filter(|r| r.mode == DrawMode::Marginal).collect();
        assert_eq!(marginal.len(), 2);
    }

    #[test]
    fn duplicated_rows_p2_and_p3() {
        let rows = build_duplicated_rows(2);
        let marginal: Vec<_> = rows.iter().filter(|r| r.mode == DrawMode::Marginal).collect();
        assert_eq!(marginal.len(), 4); // (00),(10),(01),(11)
        assert_eq!(rows.len(), 7);

        let rows = build_duplicated_rows(3);
        let marginal = rows.iter().filter(|r| r.mode == DrawMode::Marginal).count();
        assert_eq!(marginal, 5); // p + 2
    }

    #[test]
    fn constant_outcome_model_gives_zero_effects() {
        let ds = toy_dataset(60, 2, 1);
        let model = FittedModel {
            spec: TermSpec::main_effects(Vec::<String>::new()),
            link: LinkFunction::Identity,
            coefficients: vec![3.5],
            iterations: 1,
            deviance: 0.0,
            penalty: None,
        };
        let pool = DonorPool::uniform(&ds);
        let rows = build_duplicated_rows(2);
        let ctx = DrawContext::new(4, 0, 2);
        let table = estimate_estimands(&ds, &model, &pool, &rows, 20, &ctx).unwrap();
        for row in &table.rows {
            assert_abs_diff_eq!(row.estimate, 3.5, epsilon = 1e-12);
        }
        let eff = compute_effects(&table, LinkFunction::Identity).unwrap();
        for v in eff.values() {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn shared_draws_make_direct_effect_isolate_a0() {
        // model with zero treatment coefficient: joint rows 2 and 3 share
        // identical draws, so the direct effect is exactly zero
        let ds = toy_dataset(50, 2, 2);
        let model = FittedModel {
            spec: TermSpec::main_effects(["M1", "M2"]),
            link: LinkFunction::Identity,
            coefficients: vec![0.5, 1.0, -0.7],
            iterations: 1,
            deviance: 0.0,
            penalty: None,
        };
        let pool = DonorPool::uniform(&ds);
        let rows = build_duplicated_rows(2);
        let ctx = DrawContext::new(11, 0, 2);
        let table = estimate_estimands(&ds, &model, &pool, &rows, 30, &ctx).unwrap();
        let eff = compute_effects(&table, LinkFunction::Identity).unwrap();
        assert_abs_diff_eq!(eff.direct, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn identities_hold_exactly() {
        for p in [1usize, 2, 3, 5] {
            let ds = toy_dataset(40, p, p as u64 + 7);
            let opts = EstimatorOptions {
                draws: 15,
                seed: 21,
                ..Default::default()
            };
            let (table, eff) = estimate_effects(&ds, &opts, 0).unwrap();
            assert_eq!(table.draws, 15);
            let sum_ie: f64 = eff.indirect.iter().sum();
            assert_abs_diff_eq!(eff.total, eff.direct + eff.joint_indirect, epsilon = 1e-12);
            assert_abs_diff_eq!(
                eff.joint_indirect - sum_ie,
                eff.mutual + eff.remainder,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn treated_reference_identities() {
        let ds = toy_dataset(40, 3, 5);
        let opts = EstimatorOptions {
            draws: 10,
            seed: 33,
            reference: ReferenceArm::Treated,
            ..Default::default()
        };
        let (_, eff) = estimate_effects(&ds, &opts, 0).unwrap();
        let sum_ie: f64 = eff.indirect.iter().sum();
        assert_abs_diff_eq!(eff.total, eff.direct + eff.joint_indirect, epsilon = 1e-12);
        assert_abs_diff_eq!(
            eff.joint_indirect - sum_ie,
            eff.mutual + eff.remainder,
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_mediator_collapse() {
        let ds = toy_dataset(50, 1, 9);
        let opts = EstimatorOptions {
            draws: 25,
            seed: 13,
            ..Default::default()
        };
        let (_, eff) = estimate_effects(&ds, &opts, 0).unwrap();
        assert_abs_diff_eq!(eff.indirect[0], eff.joint_indirect, epsilon = 1e-14);
        assert_abs_diff_eq!(eff.mutual, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eff.remainder, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_permutation_is_bit_identical() {
        let ds = toy_dataset(40, 3, 17);
        let opts = EstimatorOptions {
            draws: 12,
            seed: 3,
            ..Default::default()
        };
        let (_, base) = estimate_effects(&ds, &opts, 0).unwrap();
        let permuted = permute_mediators_check(&ds, &[0, 1, 2], &opts, 0).unwrap();
        assert_eq!(base.values(), permuted.values());
    }

    #[test]
    fn swap_permutation_swaps_indirect_effects() {
        let ds = toy_dataset(40, 2, 23);
        let opts = EstimatorOptions {
            draws: 12,
            seed: 8,
            ..Default::default()
        };
        let (_, base) = estimate_effects(&ds, &opts, 0).unwrap();
        let permuted = permute_mediators_check(&ds, &[1, 0], &opts, 0).unwrap();
        assert_abs_diff_eq!(permuted.indirect[0], base.indirect[1], epsilon = 1e-12);
        assert_abs_diff_eq!(permuted.indirect[1], base.indirect[0], epsilon = 1e-12);
        assert_abs_diff_eq!(permuted.total, base.total, epsilon = 1e-12);
        assert_abs_diff_eq!(permuted.mutual, base.mutual, epsilon = 1e-12);
        assert_abs_diff_eq!(permuted.remainder, base.remainder, epsilon = 1e-12);
    }
}
