//! Dataset ingestion, column-role schema, validation, and immutable
//! columnar storage shared by all downstream modules.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Role a CSV column plays in the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnRole {
    Treatment,
    Mediator,
    OutcomeBinary,
    OutcomeContinuous,
    Covariate,
}

/// Column-name -> role mapping, as read from a schema JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schema(pub BTreeMap<String, ColumnRole>);

impl Schema {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Schema(format!("cannot read schema file {}: {e}", path.display()))
        })?;
        let schema: Schema = serde_json::from_str(&text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        let n_treat = self.count(ColumnRole::Treatment);
        let n_out = self.count(ColumnRole::OutcomeBinary) + self.count(ColumnRole::OutcomeContinuous);
        let n_med = self.count(ColumnRole::Mediator);
        if n_treat != 1 {
            return Err(Error::Schema(format!(
                "exactly one treatment column required, found {n_treat}"
            )));
        }
        if n_out != 1 {
            return Err(Error::Schema(format!(
                "exactly one outcome column required, found {n_out}"
            )));
        }
        if n_med == 0 {
            return Err(Error::Schema("at least one mediator column required".into()));
        }
        Ok(())
    }

    fn count(&self, role: ColumnRole) -> usize {
        self.0.values().filter(|r| **r == role).count()
    }
}

/// Rows dropped during ingestion, with 1-based data-row indices.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub rows_dropped_missing: Vec<usize>,
}

/// Immutable columnar dataset: binary treatment, n x p mediator block,
/// outcome, and n x q covariate block. Validated on construction and
/// read-only afterwards; safe to share across parallel workers.
#[derive(Debug, Clone)]
pub struct Dataset {
    treatment: Vec<f64>,
    mediators: Array2<f64>,
    outcome: Vec<f64>,
    outcome_binary: bool,
    covariates: Array2<f64>,
    treatment_name: String,
    outcome_name: String,
    mediator_names: Vec<String>,
    covariate_names: Vec<String>,
    mediator_binary: Vec<bool>,
    arms: [Vec<usize>; 2],
}

impl Dataset {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        treatment: Vec<f64>,
        mediators: Array2<f64>,
        outcome: Vec<f64>,
        outcome_binary: bool,
        covariates: Array2<f64>,
        treatment_name: String,
        outcome_name: String,
        mediator_names: Vec<String>,
        covariate_names: Vec<String>,
    ) -> Result<Self> {
        let n = treatment.len();
        if n == 0 {
            return Err(Error::Validation("dataset has no rows".into()));
        }
        if mediators.nrows() != n || outcome.len() != n || covariates.nrows() != n {
            return Err(Error::Validation(format!(
                "inconsistent block sizes: treatment {n}, mediators {}, outcome {}, covariates {}",
                mediators.nrows(),
                outcome.len(),
                covariates.nrows()
            )));
        }
        if mediators.ncols() != mediator_names.len() {
            return Err(Error::Validation("mediator name count mismatch".into()));
        }
        if covariates.ncols() != covariate_names.len() {
            return Err(Error::Validation("covariate name count mismatch".into()));
        }
        if mediators.ncols() == 0 {
            return Err(Error::Validation("at least one mediator required".into()));
        }
        for (i, &a) in treatment.iter().enumerate() {
            if a != 0.0 && a != 1.0 {
                return Err(Error::Validation(format!(
                    "treatment not in {{0,1}} at row {}",
                    i + 1
                )));
            }
        }
        if outcome_binary {
            for (i, &y) in outcome.iter().enumerate() {
                if y != 0.0 && y != 1.0 {
                    return Err(Error::Validation(format!(
                        "outcome declared binary but not in {{0,1}} at row {}",
                        i + 1
                    )));
                }
            }
        }
        let all_finite = outcome.iter().all(|v| v.is_finite())
            && mediators.iter().all(|v| v.is_finite())
            && covariates.iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Validation("non-finite value in dataset".into()));
        }
        let mut arms: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (i, &a) in treatment.iter().enumerate() {
            arms[a as usize].push(i);
        }
        if arms[0].is_empty() || arms[1].is_empty() {
            return Err(Error::Validation(format!(
                "both treatment arms must be non-empty (n0={}, n1={})",
                arms[0].len(),
                arms[1].len()
            )));
        }
        let mediator_binary = (0..mediators.ncols())
            .map(|j| mediators.column(j).iter().all(|&v| v == 0.0 || v == 1.0))
            .collect();
        Ok(Dataset {
            treatment,
            mediators,
            outcome,
            outcome_binary,
            covariates,
            treatment_name,
            outcome_name,
            mediator_names,
            covariate_names,
            mediator_binary,
            arms,
        })
    }

    pub fn n(&self) -> usize {
        self.treatment.len()
    }

    /// Number of mediators.
    pub fn p(&self) -> usize {
        self.mediators.ncols()
    }

    /// Number of covariate columns (after indicator expansion).
    pub fn q(&self) -> usize {
        self.covariates.ncols()
    }

    pub fn treatment(&self) -> &[f64] {
        &self.treatment
    }

    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn outcome_is_binary(&self) -> bool {
        self.outcome_binary
    }

    pub fn mediators(&self) -> &Array2<f64> {
        &self.mediators
    }

    /// Mediator column by zero-based index.
    pub fn mediator(&self, j: usize) -> ArrayView1<'_, f64> {
        self.mediators.column(j)
    }

    pub fn mediator_is_binary(&self, j: usize) -> bool {
        self.mediator_binary[j]
    }

    pub fn covariates(&self) -> &Array2<f64> {
        &self.covariates
    }

    pub fn covariate(&self, j: usize) -> ArrayView1<'_, f64> {
        self.covariates.column(j)
    }

    pub fn treatment_name(&self) -> &str {
        &self.treatment_name
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn mediator_names(&self) -> &[String] {
        &self.mediator_names
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    /// Row indices with observed treatment `a`.
    pub fn arm(&self, a: u8) -> &[usize] {
        &self.arms[a as usize]
    }

    /// Named column lookup over all blocks, materialized as a vector.
    /// Used for design-matrix construction.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        if name == self.treatment_name {
            return Some(self.treatment.clone());
        }
        if name == self.outcome_name {
            return Some(self.outcome.clone());
        }
        if let Some(j) = self.mediator_index(name) {
            return Some(self.mediators.column(j).to_vec());
        }
        if let Some(j) = self.covariate_names.iter().position(|c| c == name) {
            return Some(self.covariates.column(j).to_vec());
        }
        None
    }

    pub fn mediator_index(&self, name: &str) -> Option<usize> {
        self.mediator_names.iter().position(|m| m == name)
    }

    /// New dataset from the given row indices (with repetition allowed).
    /// Fails if the selection empties a treatment arm.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let take = |v: &[f64]| indices.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let take2 = |m: &Array2<f64>| {
            let mut out = Array2::zeros((indices.len(), m.ncols()));
            for (r, &i) in indices.iter().enumerate() {
                out.row_mut(r).assign(&m.row(i));
            }
            out
        };
        Dataset::new(
            take(&self.treatment),
            take2(&self.mediators),
            take(&self.outcome),
            self.outcome_binary,
            take2(&self.covariates),
            self.treatment_name.clone(),
            self.outcome_name.clone(),
            self.mediator_names.clone(),
            self.covariate_names.clone(),
        )
    }

    /// New dataset with mediator columns reordered as `perm` (zero-based:
    /// new column j = old column perm[j]).
    pub fn permute_mediators(&self, perm: &[usize]) -> Result<Dataset> {
        if perm.len() != self.p() {
            return Err(Error::Validation("permutation length != p".into()));
        }
        let mut seen = vec![false; self.p()];
        for &j in perm {
            if j >= self.p() || seen[j] {
                return Err(Error::Validation("not a permutation of mediator indices".into()));
            }
            seen[j] = true;
        }
        let mut meds = Array2::zeros((self.n(), self.p()));
        let mut names = Vec::with_capacity(self.p());
        for (new_j, &old_j) in perm.iter().enumerate() {
            meds.column_mut(new_j).assign(&self.mediators.column(old_j));
            names.push(self.mediator_names[old_j].clone());
        }
        Dataset::new(
            self.treatment.clone(),
            meds,
            self.outcome.clone(),
            self.outcome_binary,
            self.covariates.clone(),
            self.treatment_name.clone(),
            self.outcome_name.clone(),
            names,
            self.covariate_names.clone(),
        )
    }

    /// Write the dataset (as stored, indicator-expanded) to CSV.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.treatment_name.clone()];
        header.extend(self.mediator_names.iter().cloned());
        header.push(self.outcome_name.clone());
        header.extend(self.covariate_names.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut rec: Vec<String> = Vec::with_capacity(header.len());
            rec.push(format_value(self.treatment[i]));
            for j in 0..self.p() {
                rec.push(format_value(self.mediators[[i, j]]));
            }
            rec.push(format_value(self.outcome[i]));
            for j in 0..self.q() {
                rec.push(format_value(self.covariates[[i, j]]));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Schema describing this dataset's columns, for round-tripping.
    pub fn schema(&self) -> Schema {
        let mut map = BTreeMap::new();
        map.insert(self.treatment_name.clone(), ColumnRole::Treatment);
        for m in &self.mediator_names {
            map.insert(m.clone(), ColumnRole::Mediator);
        }
        map.insert(
            self.outcome_name.clone(),
            if self.outcome_binary {
                ColumnRole::OutcomeBinary
            } else {
                ColumnRole::OutcomeContinuous
            },
        );
        for c in &self.covariate_names {
            map.insert(c.clone(), ColumnRole::Covariate);
        }
        Schema(map)
    }
}

/// Shortest round-trip formatting so CSV write/reload is bit-exact.
fn format_value(v: f64) -> String {
    let mut buf = ryu_format(v);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(v: f64) -> String {
    // f64 Display in Rust is shortest round-trip already
    format!("{v}")
}

fn is_missing(field: &str) -> bool {
    let t = field.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan") || t.eq_ignore_ascii_case("null")
}

/// Load a CSV file under a column-role schema. Rows with missing cells in
/// schema columns are rejected and reported by 1-based data-row index.
/// Categorical covariates are expanded to 0/1 indicators with the
/// lexicographically first level as reference.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<(Dataset, LoadReport)> {
    schema.validate()?;
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    load_csv_reader(std::io::BufReader::new(file), schema)
}

pub fn load_csv_reader<R: std::io::Read>(reader: R, schema: &Schema) -> Result<(Dataset, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let missing: Vec<&String> = schema
        .0
        .keys()
        .filter(|name| !header.iter().any(|h| h == *name))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "schema columns not found in CSV header: {missing:?}"
        )));
    }

    // Column order follows the CSV header, not the schema map.
    let mut treatment_col = None;
    let mut outcome_col = None;
    let mut outcome_binary = false;
    let mut mediator_cols: Vec<usize> = Vec::new();
    let mut covariate_cols: Vec<usize> = Vec::new();
    for (idx, name) in header.iter().enumerate() {
        match schema.0.get(name) {
            Some(ColumnRole::Treatment) => treatment_col = Some(idx),
            Some(ColumnRole::OutcomeBinary) => {
                outcome_col = Some(idx);
                outcome_binary = true;
            }
            Some(ColumnRole::OutcomeContinuous) => outcome_col = Some(idx),
            Some(ColumnRole::Mediator) => mediator_cols.push(idx),
            Some(ColumnRole::Covariate) => covariate_cols.push(idx),
            None => {}
        }
    }
    let treatment_col = treatment_col.ok_or_else(|| Error::Schema("no treatment column".into()))?;
    let outcome_col = outcome_col.ok_or_else(|| Error::Schema("no outcome column".into()))?;

    let schema_cols: Vec<usize> = std::iter::once(treatment_col)
        .chain(std::iter::once(outcome_col))
        .chain(mediator_cols.iter().copied())
        .chain(covariate_cols.iter().copied())
        .collect();

    // First pass: keep raw fields of complete rows, record dropped rows.
    let mut report = LoadReport::default();
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (row_idx, record) in rdr.records().enumerate() {
        let record = record?;
        report.rows_read += 1;
        if record.len() != header.len() {
            return Err(Error::Validation(format!(
                "row {} has {} fields, expected {}",
                row_idx + 1,
                record.len(),
                header.len()
            )));
        }
        if schema_cols.iter().any(|&c| is_missing(&record[c])) {
            report.rows_dropped_missing.push(row_idx + 1);
            continue;
        }
        rows.push(record.iter().map(|f| f.trim().to_string()).collect());
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Validation("no complete rows after ingestion".into()));
    }

    let parse =
        |raw: &str, col: &str, row: usize| -> Result<f64> {
            raw.parse::<f64>().map_err(|_| {
                Error::Validation(format!("column {col} has non-numeric value {raw:?} at row {row}"))
            })
        };

    let mut treatment = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let raw = &row[treatment_col];
        let v = parse(raw, &header[treatment_col], i + 1)?;
        if v != 0.0 && v != 1.0 {
            return Err(Error::Validation(format!(
                "treatment not in {{0,1}} at row {}",
                i + 1
            )));
        }
        treatment.push(v);
    }

    let mut outcome = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        outcome.push(parse(&row[outcome_col], &header[outcome_col], i + 1)?);
    }

    let mut mediators = Array2::zeros((n, mediator_cols.len()));
    for (j, &c) in mediator_cols.iter().enumerate() {
        for (i, row) in rows.iter().enumerate() {
            mediators[[i, j]] = parse(&row[c], &header[c], i + 1)?;
        }
    }
    let mediator_names: Vec<String> = mediator_cols.iter().map(|&c| header[c].clone()).collect();

    // Covariates: numeric columns pass through; non-numeric columns are
    // treated as categorical and expanded to k-1 indicators.
    let mut covariate_blocks: Vec<(String, Vec<f64>)> = Vec::new();
    for &c in &covariate_cols {
        let name = &header[c];
        let all_numeric = rows.iter().all(|row| row[c].parse::<f64>().is_ok());
        if all_numeric {
            let vals = rows
                .iter()
                .map(|row| row[c].parse::<f64>().unwrap())
                .collect::<Vec<f64>>();
            covariate_blocks.push((name.clone(), vals));
        } else {
            let mut levels: Vec<String> = rows.iter().map(|row| row[c].clone()).collect();
            levels.sort();
            levels.dedup();
            if levels.len() < 2 {
                return Err(Error::Validation(format!(
                    "categorical covariate {name} has a single level"
                )));
            }
            // reference level = lexicographically first
            for level in levels.iter().skip(1) {
                let vals = rows
                    .iter()
                    .map(|row| if &row[c] == level { 1.0 } else { 0.0 })
                    .collect::<Vec<f64>>();
                covariate_blocks.push((format!("{name}={level}"), vals));
            }
        }
    }
    let covariate_names: Vec<String> = covariate_blocks.iter().map(|(nm, _)| nm.clone()).collect();
    let mut covariates = Array2::zeros((n, covariate_blocks.len()));
    for (j, (_, vals)) in covariate_blocks.iter().enumerate() {
        for (i, &v) in vals.iter().enumerate() {
            covariates[[i, j]] = v;
        }
    }

    let dataset = Dataset::new(
        treatment,
        mediators,
        outcome,
        outcome_binary,
        covariates,
        header[treatment_col].clone(),
        header[outcome_col].clone(),
        mediator_names,
        covariate_names,
    )?;
    Ok((dataset, report))
}

/// Split a vector at its empirical median: output is 1 where the value is
/// strictly above the median, 0 otherwise. Errors if either level would be
/// empty (constant input, or median equal to the maximum).
pub fn dichotomize_median(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Validation("cannot dichotomize an empty vector".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let out: Vec<f64> = values.iter().map(|&v| if v > median { 1.0 } else { 0.0 }).collect();
    let ones = out.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == n {
        return Err(Error::Validation(
            "median split produced an empty level (constant or degenerate vector)".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_csv() -> &'static str {
        "A,M1,M2,Y,age\n0,1.5,0.2,3.0,41\n1,2.5,0.1,4.0,52\n0,0.5,0.9,2.0,37\n1,3.5,0.4,5.0,60\n0,1.0,0.3,2.5,45\n1,2.0,0.6,4.5,50\n"
    }

    fn toy_schema() -> Schema {
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), ColumnRole::Treatment);
        map.insert("M1".to_string(), ColumnRole::Mediator);
        map.insert("M2".to_string(), ColumnRole::Mediator);
        map.insert("Y".to_string(), ColumnRole::OutcomeContinuous);
        map.insert("age".to_string(), ColumnRole::Covariate);
        Schema(map)
    }

    #[test]
    fn load_six_row_file() {
        let (ds, report) = load_csv_reader(toy_csv().as_bytes(), &toy_schema()).unwrap();
        assert_eq!(ds.n(), 6);
        assert_eq!(ds.p(), 2);
        assert_eq!(ds.q(), 1);
        assert!(report.rows_dropped_missing.is_empty());
        assert_eq!(ds.arm(0), &[0, 2, 4]);
        assert_eq!(ds.arm(1), &[1, 3, 5]);
    }

    #[test]
    fn non_binary_treatment_reports_row() {
        let csv = "A,M1,Y\n0,1.0,2.0\n1,2.0,3.0\n2,3.0,4.0\n";
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), ColumnRole::Treatment);
        map.insert("M1".to_string(), ColumnRole::Mediator);
        map.insert("Y".to_string(), ColumnRole::OutcomeContinuous);
        let err = load_csv_reader(csv.as_bytes(), &Schema(map)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("treatment not in {0,1} at row 3"), "{msg}");
    }

    #[test]
    fn missing_schema_column_lists_names() {
        let csv = "A,Y\n0,1\n1,2\n";
        let err = load_csv_reader(csv.as_bytes(), &toy_schema()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("M1") && msg.contains("M2") && msg.contains("age"), "{msg}");
    }

    #[test]
    fn missing_cells_dropped_and_reported() {
        let csv = "A,M1,Y\n0,1.0,2.0\n1,,3.0\n0,3.0,4.0\n1,NA,1.0\n1,2.0,2.0\n";
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), ColumnRole::Treatment);
        map.insert("M1".to_string(), ColumnRole::Mediator);
        map.insert("Y".to_string(), ColumnRole::OutcomeContinuous);
        let (ds, report) = load_csv_reader(csv.as_bytes(), &Schema(map)).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(report.rows_dropped_missing, vec![2, 4]);
    }

    #[test]
    fn empty_arm_rejected() {
        let csv = "A,M1,Y\n0,1.0,2.0\n0,2.0,3.0\n";
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), ColumnRole::Treatment);
        map.insert("M1".to_string(), ColumnRole::Mediator);
        map.insert("Y".to_string(), ColumnRole::OutcomeContinuous);
        let err = load_csv_reader(csv.as_bytes(), &Schema(map)).unwrap_err();
        assert!(err.to_string().contains("non-empty"));
    }

    #[test]
    fn categorical_covariate_expanded() {
        let csv = "A,M1,Y,site\n0,1.0,2.0,b\n1,2.0,3.0,a\n0,3.0,4.0,c\n1,4.0,5.0,a\n";
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), ColumnRole::Treatment);
        map.insert("M1".to_string(), ColumnRole::Mediator);
        map.insert("Y".to_string(), ColumnRole::OutcomeContinuous);
        map.insert("site".to_string(), ColumnRole::Covariate);
        let (ds, _) = load_csv_reader(csv.as_bytes(), &Schema(map)).unwrap();
        // 3 levels -> 2 indicators, reference level "a"
        assert_eq!(ds.covariate_names(), &["site=b".to_string(), "site=c".to_string()]);
        for i in 0..ds.n() {
            let row_sum: f64 = (0..ds.q()).map(|j| ds.covariates()[[i, j]]).sum();
            assert!(row_sum <= 1.0);
        }
        assert_eq!(ds.covariates()[[0, 0]], 1.0); // site=b
        assert_eq!(ds.covariates()[[2, 1]], 1.0); // site=c
    }

    #[test]
    fn round_trip_bit_exact() {
        let (ds, _) = load_csv_reader(toy_csv().as_bytes(), &toy_schema()).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let (ds2, _) = load_csv_reader(buf.as_slice(), &ds.schema()).unwrap();
        assert_eq!(ds.treatment(), ds2.treatment());
        assert_eq!(ds.outcome(), ds2.outcome());
        assert_eq!(ds.mediators(), ds2.mediators());
        assert_eq!(ds.covariates(), ds2.covariates());
    }

    #[test]
    fn dichotomize_examples() {
        assert_eq!(dichotomize_median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(dichotomize_median(&[5.0, 5.0, 5.0, 9.0]).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(dichotomize_median(&[1.0, 1.0, 2.0, 2.0]).unwrap(), vec![0.0, 0.0, 1.0, 1.0]);
        assert!(dichotomize_median(&[3.0, 3.0, 3.0]).is_err());
        // median equals max: strict > empties the upper level
        assert!(dichotomize_median(&[1.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn subset_with_repetition() {
        let (ds, _) = load_csv_reader(toy_csv().as_bytes(), &toy_schema()).unwrap();
        let sub = ds.subset(&[0, 0, 1, 3]).unwrap();
        assert_eq!(sub.n(), 4);
        assert_eq!(sub.treatment(), &[0.0, 0.0, 1.0, 1.0]);
        assert!(ds.subset(&[0, 2, 4]).is_err()); // all arm-0 rows
    }
}
