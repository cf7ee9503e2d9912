//! Nonparametric sampling of counterfactual mediator values: joint
//! whole-vector draws, marginal per-mediator draws, and inverse-propensity
//! weighted donor selection for observational treatments.

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::{expit, logit, FittedModel, LinkFunction, Term, TermSpec};
use crate::rng;

/// Fitted treatment probabilities are clipped to this range before
/// inversion, bounding the donor weights.
pub const PROPENSITY_CLIP: (f64, f64) = (0.01, 0.99);
/// Saturated propensity fits are only attempted up to this many cells.
const MAX_SATURATED_CELLS: usize = 32;

/// How counterfactual donors are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreatmentMode {
    /// Treatment was randomly assigned: uniform donor weights within arm.
    Randomized,
    /// Treatment depends on covariates: inverse-propensity donor weights.
    Observational,
}

/// Per-arm donor indices with normalized sampling weights, stored as a
/// cumulative distribution for O(log n) inverse-CDF selection.
#[derive(Debug, Clone)]
pub struct DonorPool {
    arms: [ArmPool; 2],
}

#[derive(Debug, Clone)]
struct ArmPool {
    rows: Vec<usize>,
    cumulative: Vec<f64>,
    uniform: bool,
}

impl DonorPool {
    /// Uniform weights 1/n_a within each arm (randomized treatment).
    pub fn uniform(dataset: &Dataset) -> DonorPool {
        let make = |rows: &[usize]| ArmPool {
            rows: rows.to_vec(),
            cumulative: Vec::new(),
            uniform: true,
        };
        DonorPool {
            arms: [make(dataset.arm(0)), make(dataset.arm(1))],
        }
    }

    /// Weights proportional to `raw` (indexed by dataset row), normalized
    /// within each arm.
    pub fn from_raw_weights(dataset: &Dataset, raw: &[f64]) -> Result<DonorPool> {
        let build = |rows: &[usize]| -> Result<ArmPool> {
            let total: f64 = rows.iter().map(|&i| raw[i]).sum();
            if !(total > 0.0) {
                return Err(Error::Validation("donor weights sum to zero in an arm".into()));
            }
            let mut cumulative = Vec::with_capacity(rows.len());
            let mut acc = 0.0;
            for &i in rows {
                if raw[i] < 0.0 {
                    return Err(Error::Validation("negative donor weight".into()));
                }
                acc += raw[i] / total;
                cumulative.push(acc);
            }
            if let Some(last) = cumulative.last_mut() {
                *last = 1.0;
            }
            Ok(ArmPool {
                rows: rows.to_vec(),
                cumulative,
                uniform: false,
            })
        };
        Ok(DonorPool {
            arms: [build(dataset.arm(0))?, build(dataset.arm(1))?],
        })
    }

    pub fn arm_size(&self, arm: u8) -> usize {
        self.arms[arm as usize].rows.len()
    }

    /// Normalized per-donor weights for an arm (donor order = arm order).
    pub fn weights(&self, arm: u8) -> Vec<f64> {
        let pool = &self.arms[arm as usize];
        if pool.uniform {
            vec![1.0 / pool.rows.len() as f64; pool.rows.len()]
        } else {
            let mut prev = 0.0;
            pool.cumulative
                .iter()
                .map(|&c| {
                    let w = c - prev;
                    prev = c;
                    w
                })
                .collect()
        }
    }

    /// Dataset row index of the donor selected by uniform variate `u`.
    #[inline]
    pub fn select(&self, arm: u8, u: f64) -> usize {
        let pool = &self.arms[arm as usize];
        if pool.uniform {
            let k = ((u * pool.rows.len() as f64) as usize).min(pool.rows.len() - 1);
            return pool.rows[k];
        }
        let k = match pool
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&u).unwrap())
        {
            Ok(idx) => idx + 1,
            Err(idx) => idx,
        };
        pool.rows[k.min(pool.rows.len() - 1)]
    }
}

/// Which mediator slot a draw feeds. Mediators are identified by a stable
/// label (their original column index) so that permuting columns permutes
/// the draw streams with them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DrawSlot {
    Joint,
    Mediator(u64),
}

/// Deterministic seed key for one donor selection. Distinct keys yield
/// independent streams; identical keys yield identical donors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DrawKey {
    pub replicate: u64,
    pub individual: u64,
    pub draw: u64,
    pub slot: DrawSlot,
    pub arm: u8,
}

impl DrawKey {
    fn words(&self) -> [u64; 5] {
        let slot_word = match self.slot {
            DrawSlot::Joint => 0,
            DrawSlot::Mediator(label) => 1 + label,
        };
        [
            self.replicate,
            self.individual,
            self.draw,
            slot_word,
            self.arm as u64,
        ]
    }
}

/// Donor row selected by a key: a pure function of (seed, key, pool).
#[inline]
pub fn donor_for_key(pool: &DonorPool, seed: u64, key: &DrawKey) -> usize {
    let u = rng::keyed_uniform(seed, &key.words());
    pool.select(key.arm, u)
}

/// Joint draw: one donor from arm `key.arm`, whole observed mediator vector.
pub fn draw_joint(dataset: &Dataset, pool: &DonorPool, seed: u64, key: &DrawKey) -> Result<Vec<f64>> {
    if key.slot != DrawSlot::Joint {
        return Err(Error::Validation("draw_joint requires a Joint slot key".into()));
    }
    let donor = donor_for_key(pool, seed, key);
    Ok(dataset.mediators().row(donor).to_vec())
}

/// Marginal draw: an independent donor for this mediator slot alone;
/// returns only that donor's value of the keyed mediator.
pub fn draw_marginal(dataset: &Dataset, pool: &DonorPool, seed: u64, key: &DrawKey) -> Result<f64> {
    let label = match key.slot {
        DrawSlot::Mediator(label) => label as usize,
        DrawSlot::Joint => {
            return Err(Error::Validation("draw_marginal requires a Mediator slot key".into()))
        }
    };
    if label >= dataset.p() {
        return Err(Error::Validation(format!("mediator label {label} out of range")));
    }
    let donor = donor_for_key(pool, seed, key);
    Ok(dataset.mediators()[[donor, label]])
}

/// Fit the treatment model used for donor weighting: a saturated logistic
/// model when the covariates are all binary with at most 32 cells, otherwise
/// main effects; intercept-only when there are no covariates.
pub fn fit_propensity(dataset: &Dataset) -> Result<FittedModel> {
    let q = dataset.q();
    let p1 = dataset.arm(1).len() as f64 / dataset.n() as f64;
    if q == 0 {
        return Ok(FittedModel {
            spec: TermSpec::main_effects(Vec::<String>::new()),
            link: LinkFunction::Logit,
            coefficients: vec![logit(p1)],
            iterations: 1,
            deviance: f64::NAN,
            penalty: None,
        });
    }

    let all_binary = (0..q).all(|j| dataset.covariate(j).iter().all(|&v| v == 0.0 || v == 1.0));
    let cells = 1usize << q.min(20);
    if all_binary && cells <= MAX_SATURATED_CELLS {
        match fit_saturated(dataset) {
            Ok(Some(model)) => return Ok(model),
            Ok(None) => {} // unobserved cells: fall through to main effects
            Err(e) => return Err(e),
        }
    }

    let names: Vec<String> = dataset.covariate_names().to_vec();
    let spec = TermSpec::main_effects(names);
    FittedModel::fit(dataset, &spec, dataset.treatment(), crate::glm::Family::Logistic).map_err(
        |e| match e {
            Error::Separation(msg) => Error::Separation(format!(
                "{msg}; treatment model separated, consider coarsening covariates"
            )),
            other => other,
        },
    )
}

/// Exact saturated fit over binary covariate cells. Returns Ok(None) when
/// some cell pattern is unobserved (the factorial design is not identified).
fn fit_saturated(dataset: &Dataset) -> Result<Option<FittedModel>> {
    let q = dataset.q();
    let n_cells = 1usize << q;
    let mut count = vec![0usize; n_cells];
    let mut treated = vec![0usize; n_cells];
    for i in 0..dataset.n() {
        let mut cell = 0usize;
        for j in 0..q {
            if dataset.covariates()[[i, j]] == 1.0 {
                cell |= 1 << j;
            }
        }
        count[cell] += 1;
        if dataset.treatment()[i] == 1.0 {
            treated[cell] += 1;
        }
    }
    if count.iter().any(|&c| c == 0) {
        return Ok(None);
    }
    for cell in 0..n_cells {
        if treated[cell] == 0 || treated[cell] == count[cell] {
            return Err(Error::Separation(format!(
                "covariate cell {cell:#b} contains a single treatment arm, consider coarsening covariates"
            )));
        }
    }

    // Factorial terms: every nonempty subset of the covariate columns, by
    // subset size then bit order, plus the intercept.
    let cov_names = dataset.covariate_names();
    let mut subsets: Vec<usize> = (1..n_cells).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    let mut spec = TermSpec::main_effects(Vec::<String>::new());
    for &s in &subsets {
        let cols: Vec<String> = (0..q).filter(|j| s & (1 << j) != 0).map(|j| cov_names[j].clone()).collect();
        let term = if cols.len() == 1 {
            Term::Main(cols.into_iter().next().unwrap())
        } else {
            Term::Product(cols)
        };
        spec.push(term)?;
    }

    // Solve the factorial coefficients exactly from per-cell empirical logits.
    let k = n_cells;
    let mut z = DMatrix::zeros(k, k);
    let mut eta = DVector::zeros(k);
    for cell in 0..k {
        z[(cell, 0)] = 1.0;
        for (t, &s) in subsets.iter().enumerate() {
            z[(cell, t + 1)] = if s & cell == s { 1.0 } else { 0.0 };
        }
        eta[cell] = logit(treated[cell] as f64 / count[cell] as f64);
    }
    let beta = z
        .lu()
        .solve(&eta)
        .ok_or_else(|| Error::NonConvergence("saturated design solve failed".into()))?;
    let mut deviance = 0.0;
    for cell in 0..k {
        let p = treated[cell] as f64 / count[cell] as f64;
        deviance -= 2.0
            * (treated[cell] as f64 * p.ln() + (count[cell] - treated[cell]) as f64 * (1.0 - p).ln());
    }
    Ok(Some(FittedModel {
        spec,
        link: LinkFunction::Logit,
        coefficients: beta.as_slice().to_vec(),
        iterations: 1,
        deviance,
        penalty: None,
    }))
}

/// Inverse-propensity donor weights: individual i in arm a gets weight
/// proportional to 1 / Pr(A = a | L_i), with probabilities clipped first.
pub fn donor_weights(dataset: &Dataset, propensity: &FittedModel) -> Result<DonorPool> {
    let fitted = propensity.predict(dataset)?;
    if fitted.len() != dataset.n() {
        return Err(Error::Validation("propensity fit size mismatch".into()));
    }
    let raw: Vec<f64> = fitted
        .iter()
        .zip(dataset.treatment().iter())
        .map(|(&p1, &a)| {
            let p1 = p1.clamp(PROPENSITY_CLIP.0, PROPENSITY_CLIP.1);
            let p_own = if a == 1.0 { p1 } else { 1.0 - p1 };
            1.0 / p_own
        })
        .collect();
    DonorPool::from_raw_weights(dataset, &raw)
}

/// Donor pool for the requested mode: uniform for randomized treatment,
/// inverse-propensity weighted otherwise.
pub fn donor_pool(dataset: &Dataset, mode: TreatmentMode) -> Result<DonorPool> {
    match mode {
        TreatmentMode::Randomized => Ok(DonorPool::uniform(dataset)),
        TreatmentMode::Observational => {
            let propensity = fit_propensity(dataset)?;
            donor_weights(dataset, &propensity)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn simple_dataset(treatment: Vec<f64>, mediators: Array2<f64>, covariates: Array2<f64>) -> Dataset {
        let n = treatment.len();
        let p = mediators.ncols();
        let q = covariates.ncols();
        Dataset::new(
            treatment,
            mediators,
            vec![0.5; n].iter().enumerate().map(|(i, _)| (i % 2) as f64).collect(),
            true,
            covariates,
            "A".into(),
            "Y".into(),
            (0..p).map(|j| format!("M{}", j + 1)).collect(),
            (0..q).map(|j| format!("L{}", j + 1)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn intercept_only_propensity_is_empirical_rate() {
        let n = 10;
        let treatment: Vec<f64> = (0..n).map(|i| if i < 3 { 1.0 } else { 0.0 }).collect();
        let ds = simple_dataset(treatment, Array2::zeros((n, 1)), Array2::zeros((n, 0)));
        let model = fit_propensity(&ds).unwrap();
        let pred = model.predict(&ds).unwrap();
        for &v in &pred {
            assert_abs_diff_eq!(v, 0.3, epsilon = 1e-12);
        }
    }

    #[test]
    fn saturated_propensity_matches_cell_proportions() {
        // one binary covariate; Pr(A=1|L=0) = 1/4, Pr(A=1|L=1) = 3/5
        let mut treatment = Vec::new();
        let mut cov = Vec::new();
        for i in 0..8 {
            treatment.push(if i < 2 { 1.0 } else { 0.0 });
            cov.push(0.0);
        }
        for i in 0..10 {
            treatment.push(if i < 6 { 1.0 } else { 0.0 });
            cov.push(1.0);
        }
        let n = treatment.len();
        let covariates = Array2::from_shape_vec((n, 1), cov).unwrap();
        let ds = simple_dataset(treatment, Array2::zeros((n, 1)), covariates);
        let model = fit_propensity(&ds).unwrap();
        let pred = model.predict(&ds).unwrap();
        for i in 0..n {
            let expected = if ds.covariates()[[i, 0]] == 1.0 { 0.6 } else { 0.25 };
            assert_abs_diff_eq!(pred[i], expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn saturated_two_covariates_factorial() {
        // 2 binary covariates, all 4 cells observed, mixed arms in each
        let mut treatment = Vec::new();
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        let cells = [
            (0.0, 0.0, 5, 2),
            (1.0, 0.0, 6, 3),
            (0.0, 1.0, 4, 1),
            (1.0, 1.0, 7, 5),
        ];
        for &(a, b, count, ones) in &cells {
            for i in 0..count {
                treatment.push(if i < ones { 1.0 } else { 0.0 });
                c1.push(a);
                c2.push(b);
            }
        }
        let n = treatment.len();
        let mut covariates = Array2::zeros((n, 2));
        for i in 0..n {
            covariates[[i, 0]] = c1[i];
            covariates[[i, 1]] = c2[i];
        }
        let ds = simple_dataset(treatment, Array2::zeros((n, 1)), covariates);
        let model = fit_propensity(&ds).unwrap();
        let pred = model.predict(&ds).unwrap();
        for (i, &(a, b, count, ones)) in cells
            .iter()
            .enumerate()
            .flat_map(|(ci, cell)| {
                let start: usize = cells[..ci].iter().map(|c| c.2).sum();
                (start..start + cell.2).map(move |i| (i, cell))
            })
            .collect::<Vec<_>>()
        {
            let _ = (a, b);
            assert_abs_diff_eq!(pred[i], ones as f64 / count as f64, epsilon = 1e-8);
        }
    }

    #[test]
    fn pure_cell_is_separation() {
        let treatment = vec![1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let cov = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let n = treatment.len();
        let covariates = Array2::from_shape_vec((n, 1), cov).unwrap();
        let ds = simple_dataset(treatment, Array2::zeros((n, 1)), covariates);
        match fit_propensity(&ds) {
            Err(Error::Separation(msg)) => assert!(msg.contains("coarsening")),
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn two_strata_weight_arithmetic() {
        // arm 1 has one individual with Pr(A=1|L)=0.8 and one with 0.2
        let treatment = vec![1.0, 1.0, 0.0, 0.0];
        let ds = simple_dataset(treatment, Array2::zeros((4, 1)), Array2::zeros((4, 0)));
        let fitted = FittedModel {
            spec: TermSpec::main_effects(Vec::<String>::new()),
            link: LinkFunction::Logit,
            coefficients: vec![0.0],
            iterations: 1,
            deviance: 0.0,
            penalty: None,
        };
        // hand-build raw weights to mirror donor_weights on a stratified fit
        let probs = [0.8, 0.2, 0.5, 0.5];
        let raw: Vec<f64> = probs
            .iter()
            .zip(ds.treatment())
            .map(|(&p1, &a)| 1.0 / if a == 1.0 { p1 } else { 1.0 - p1 })
            .collect();
        let pool = DonorPool::from_raw_weights(&ds, &raw).unwrap();
        let w1 = pool.weights(1);
        assert_abs_diff_eq!(w1[0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(w1[1], 0.8, epsilon = 1e-12);
        // uniform propensity 0.5 gives uniform weights
        let pool = donor_weights(&ds, &fitted).unwrap();
        for w in pool.weights(0) {
            assert_abs_diff_eq!(w, 0.5, epsilon = 1e-12);
        }
        for w in pool.weights(1) {
            assert_abs_diff_eq!(w, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn clipping_bounds_weights() {
        let treatment = vec![1.0, 1.0, 0.0, 0.0];
        let ds = simple_dataset(treatment, Array2::zeros((4, 1)), Array2::zeros((4, 0)));
        // extreme fitted probabilities get clipped to [0.01, 0.99]
        let model = FittedModel {
            spec: TermSpec::main_effects(Vec::<String>::new()),
            link: LinkFunction::Logit,
            coefficients: vec![30.0], // expit(30) ~ 1
            iterations: 1,
            deviance: 0.0,
            penalty: None,
        };
        let pool = donor_weights(&ds, &model).unwrap();
        let w0 = pool.weights(0);
        // raw weight for arm-0 donors is 1/(1-0.99) = 100 before normalizing
        assert!(w0.iter().all(|&w| w <= 1.0));
        let sum: f64 = w0.iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn keyed_draws_are_deterministic() {
        let treatment = vec![0.0, 1.0, 1.0, 0.0, 1.0, 0.0];
        let meds = Array2::from_shape_vec(
            (6, 2),
            vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0, 4.0, 40.0, 5.0, 50.0, 6.0, 60.0],
        )
        .unwrap();
        let ds = simple_dataset(treatment, meds, Array2::zeros((6, 0)));
        let pool = DonorPool::uniform(&ds);
        let key = DrawKey {
            replicate: 0,
            individual: 3,
            draw: 7,
            slot: DrawSlot::Joint,
            arm: 1,
        };
        let a = draw_joint(&ds, &pool, 99, &key).unwrap();
        let b = draw_joint(&ds, &pool, 99, &key).unwrap();
        assert_eq!(a, b);
        // drawn vector appears verbatim in arm 1
        let donor = donor_for_key(&pool, 99, &key);
        assert!(ds.arm(1).contains(&donor));
        assert_eq!(a, ds.mediators().row(donor).to_vec());
    }

    #[test]
    fn single_donor_arm_always_selected() {
        let treatment = vec![0.0, 0.0, 0.0, 1.0];
        let meds = Array2::from_shape_vec((4, 1), vec![1.0, 2.0, 3.0, 42.0]).unwrap();
        let ds = simple_dataset(treatment, meds, Array2::zeros((4, 0)));
        let pool = DonorPool::uniform(&ds);
        for draw in 0..50 {
            let key = DrawKey {
                replicate: 0,
                individual: 0,
                draw,
                slot: DrawSlot::Joint,
                arm: 1,
            };
            assert_eq!(draw_joint(&ds, &pool, 5, &key).unwrap(), vec![42.0]);
        }
    }

    #[test]
    fn joint_draw_frequencies_match_weights() {
        // weighted arm with known weights; chi-square goodness of fit
        let n1 = 5;
        let treatment: Vec<f64> = (0..n1).map(|_| 1.0).chain((0..3).map(|_| 0.0)).collect();
        let n = treatment.len();
        let meds = Array2::from_shape_vec((n, 1), (0..n).map(|i| i as f64).collect()).unwrap();
        let ds = simple_dataset(treatment, meds, Array2::zeros((n, 0)));
        let raw: Vec<f64> = vec![5.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let pool = DonorPool::from_raw_weights(&ds, &raw).unwrap();
        let weights = pool.weights(1);

        let draws = 100_000u64;
        let mut counts = vec![0usize; n1];
        for d in 0..draws {
            let key = DrawKey {
                replicate: 1,
                individual: 0,
                draw: d,
                slot: DrawSlot::Joint,
                arm: 1,
            };
            let donor = donor_for_key(&pool, 1234, &key);
            counts[ds.arm(1).iter().position(|&r| r == donor).unwrap()] += 1;
        }
        let mut chi2 = 0.0;
        for (c, w) in counts.iter().zip(weights.iter()) {
            let expected = w * draws as f64;
            chi2 += (*c as f64 - expected).powi(2) / expected;
        }
        let dist = ChiSquared::new((n1 - 1) as f64).unwrap();
        let p_value = 1.0 - dist.cdf(chi2);
        assert!(p_value > 0.01, "chi2 {chi2}, p {p_value}");
    }

    #[test]
    fn marginal_draws_break_dependence() {
        // two perfectly correlated mediators; independent marginal donors
        let n = 40;
        let treatment: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
        let mut meds = Array2::zeros((n, 2));
        for i in 0..n {
            meds[[i, 0]] = i as f64;
            meds[[i, 1]] = i as f64; // corr 1 in the data
        }
        let ds = simple_dataset(treatment, meds, Array2::zeros((n, 0)));
        let pool = DonorPool::uniform(&ds);
        let draws = 100_000u64;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for d in 0..draws {
            let k1 = DrawKey {
                replicate: 0,
                individual: 0,
                draw: d,
                slot: DrawSlot::Mediator(0),
                arm: 1,
            };
            let k2 = DrawKey {
                slot: DrawSlot::Mediator(1),
                ..k1
            };
            let x = draw_marginal(&ds, &pool, 7, &k1).unwrap();
            let y = draw_marginal(&ds, &pool, 7, &k2).unwrap();
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let nn = draws as f64;
        let cov = sxy / nn - (sx / nn) * (sy / nn);
        let vx = sxx / nn - (sx / nn).powi(2);
        let vy = syy / nn - (sy / nn).powi(2);
        let r = cov / (vx * vy).sqrt();
        assert!(r.abs() < 0.02, "correlation {r}");
    }

    #[test]
    fn marginal_matches_arm_distribution() {
        let n = 30;
        let treatment: Vec<f64> = (0..n).map(|i| if i < 12 { 1.0 } else { 0.0 }).collect();
        let mut meds = Array2::zeros((n, 1));
        for i in 0..n {
            meds[[i, 0]] = (i * i) as f64;
        }
        let ds = simple_dataset(treatment, meds, Array2::zeros((n, 0)));
        let pool = DonorPool::uniform(&ds);
        let draws = 100_000u64;
        let mut counts = vec![0usize; 12];
        for d in 0..draws {
            let key = DrawKey {
                replicate: 0,
                individual: 2,
                draw: d,
                slot: DrawSlot::Mediator(0),
                arm: 1,
            };
            let v = draw_marginal(&ds, &pool, 11, &key).unwrap();
            let idx = ds.arm(1).iter().position(|&r| ds.mediators()[[r, 0]] == v).unwrap();
            counts[idx] += 1;
        }
        // uniform weights: each donor frequency near 1/12
        for &c in &counts {
            let f = c as f64 / draws as f64;
            assert!((f - 1.0 / 12.0).abs() < 0.005, "frequency {f}");
        }
    }
}
