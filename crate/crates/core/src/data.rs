//! Columnar storage for descriptors, ground truth and the prediction matrix.
//!
//! Everything here is immutable once built. Nominal values and class labels
//! are dictionary-encoded as dense `u32` codes in first-occurrence order, so a
//! fixed input file always yields the same codes.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bidirectional text <-> code map with dense codes `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a dictionary from distinct labels, in the given order.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut dict = Dictionary::new();
        for label in labels {
            let label = label.into();
            if dict.code(&label).is_some() {
                return Err(Error::Schema(format!("duplicate label {label:?}")));
            }
            dict.intern(&label);
        }
        Ok(dict)
    }

    /// Returns the code of `label`, assigning the next free code if unseen.
    pub fn intern(&mut self, label: &str) -> u32 {
        if let Some(&code) = self.index.get(label) {
            return code;
        }
        let code = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), code);
        code
    }

    pub fn code(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn label(&self, code: u32) -> &str {
        &self.labels[code as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Nominal,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Nominal {
        codes: Vec<u32>,
        dictionary: Dictionary,
    },
    Numeric(Vec<f64>),
}

/// One descriptor attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeColumn {
    name: String,
    values: ColumnValues,
}

impl AttributeColumn {
    pub fn nominal<S: AsRef<str>>(name: impl Into<String>, values: &[S]) -> Self {
        let mut dictionary = Dictionary::new();
        let codes = values
            .iter()
            .map(|v| dictionary.intern(v.as_ref()))
            .collect();
        AttributeColumn {
            name: name.into(),
            values: ColumnValues::Nominal { codes, dictionary },
        }
    }

    /// Panics on non-finite values.
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        assert!(
            values.iter().all(|v| v.is_finite()),
            "numeric columns hold finite values only"
        );
        AttributeColumn {
            name: name.into(),
            values: ColumnValues::Numeric(values),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnKind {
        match self.values {
            ColumnValues::Nominal { .. } => ColumnKind::Nominal,
            ColumnValues::Numeric(_) => ColumnKind::Numeric,
        }
    }

    pub fn values(&self) -> &ColumnValues {
        &self.values
    }

    pub fn len(&self) -> usize {
        match &self.values {
            ColumnValues::Nominal { codes, .. } => codes.len(),
            ColumnValues::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dictionary of a nominal column, `None` for numeric ones.
    pub fn dictionary(&self) -> Option<&Dictionary> {
        match &self.values {
            ColumnValues::Nominal { dictionary, .. } => Some(dictionary),
            ColumnValues::Numeric(_) => None,
        }
    }

    /// Cell text as it would appear in a CSV file.
    pub fn display_value(&self, row: usize) -> String {
        match &self.values {
            ColumnValues::Nominal { codes, dictionary } => dictionary.label(codes[row]).to_owned(),
            ColumnValues::Numeric(v) => format!("{}", v[row]),
        }
    }
}

/// The table of `m` cases: `k` descriptor columns plus optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    m: usize,
    columns: Vec<AttributeColumn>,
    target: Option<String>,
    truth: Option<Vec<u32>>,
    labels: Dictionary,
}

impl Dataset {
    /// Assembles a dataset from in-memory columns. `truth` is the target
    /// column name and its label per case.
    pub fn new<S: AsRef<str>>(
        m: usize,
        columns: Vec<AttributeColumn>,
        truth: Option<(&str, &[S])>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut seen = HashSet::new();
        for col in &columns {
            if col.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    found: col.len(),
                });
            }
            if !seen.insert(col.name.clone()) {
                return Err(Error::Schema(format!("duplicate column name {:?}", col.name)));
            }
        }
        let mut labels = Dictionary::new();
        let (target, truth) = match truth {
            Some((name, values)) => {
                if values.len() != m {
                    return Err(Error::Dimension {
                        expected: m,
                        found: values.len(),
                    });
                }
                if seen.contains(name) {
                    return Err(Error::Schema(format!("duplicate column name {name:?}")));
                }
                let codes: Vec<u32> = values.iter().map(|v| labels.intern(v.as_ref())).collect();
                if labels.len() < 2 {
                    return Err(Error::Schema(format!(
                        "target column {name:?} must contain at least 2 classes"
                    )));
                }
                (Some(name.to_owned()), Some(codes))
            }
            None => (None, None),
        };
        Ok(Dataset {
            m,
            columns,
            target,
            truth,
            labels,
        })
    }

    /// Number of cases.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of descriptor columns.
    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[AttributeColumn] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &AttributeColumn {
        &self.columns[index]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn target_name(&self) -> Option<&str> {
        self.target.as_deref()
    }

    /// Ground-truth class codes, one per case.
    pub fn truth(&self) -> Option<&[u32]> {
        self.truth.as_deref()
    }

    /// Class dictionary. Empty when the dataset carries no ground truth.
    pub fn labels(&self) -> &Dictionary {
        &self.labels
    }

    /// Schema document describing this dataset's columns.
    pub fn schema(&self) -> Schema {
        let mut columns: Vec<SchemaColumn> = self
            .columns
            .iter()
            .map(|c| SchemaColumn {
                name: c.name.clone(),
                role: match c.kind() {
                    ColumnKind::Nominal => Role::Nominal,
                    ColumnKind::Numeric => Role::Numeric,
                },
            })
            .collect();
        if let Some(target) = &self.target {
            columns.push(SchemaColumn {
                name: target.clone(),
                role: Role::Target,
            });
        }
        Schema { columns }
    }
}

/// `m x n` matrix of predicted class codes, one column per classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    m: usize,
    n: usize,
    entries: Vec<u32>,
    classifier_names: Vec<String>,
    labels: Dictionary,
}

impl PredictionMatrix {
    /// Builds a matrix from code rows. Every code must be valid in `labels`.
    pub fn new(classifier_names: Vec<String>, labels: Dictionary, rows: &[Vec<u32>]) -> Result<Self> {
        let n = classifier_names.len();
        check_classifier_names(&classifier_names)?;
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut entries = Vec::with_capacity(rows.len() * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Config(format!(
                    "row {} has {} predictions, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &code) in row.iter().enumerate() {
                if code as usize >= labels.len() {
                    return Err(Error::UnknownLabel {
                        label: code.to_string(),
                        row: i + 1,
                        column: classifier_names[j].clone(),
                    });
                }
                entries.push(code);
            }
        }
        Ok(PredictionMatrix {
            m: rows.len(),
            n,
            entries,
            classifier_names,
            labels,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of classifiers.
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, classifier: usize) -> u32 {
        self.entries[row * self.n + classifier]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn classifier_names(&self) -> &[String] {
        &self.classifier_names
    }

    pub fn labels(&self) -> &Dictionary {
        &self.labels
    }

    /// Number of classes `|C|`.
    pub fn classes(&self) -> usize {
        self.labels.len()
    }

    /// The same predictions with classifier columns reordered: column `j` of
    /// the result is column `order[j]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> PredictionMatrix {
        assert_eq!(order.len(), self.n);
        let rows: Vec<Vec<u32>> = self
            .rows()
            .map(|r| order.iter().map(|&j| r[j]).collect())
            .collect();
        let names = order.iter().map(|&j| self.classifier_names[j].clone()).collect();
        PredictionMatrix::new(names, self.labels.clone(), &rows).expect("permutation of a valid matrix")
    }
}

fn check_classifier_names(names: &[String]) -> Result<()> {
    if names.len() < 2 {
        return Err(Error::Config(format!(
            "prediction matrix needs at least 2 classifiers, found {}",
            names.len()
        )));
    }
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::Schema(format!("duplicate classifier name {name:?}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Nominal,
    Numeric,
    Target,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaColumn {
    pub name: String,
    pub role: Role,
}

/// Column roles for a dataset CSV: `{"columns": [{"name": .., "role": ..}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schema {
    pub columns: Vec<SchemaColumn>,
}

impl Schema {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Open {
            what: "schema",
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        let mut targets = 0;
        for col in &self.columns {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name {:?}", col.name)));
            }
            if col.role == Role::Target {
                targets += 1;
            }
        }
        if targets > 1 {
            return Err(Error::Schema("at most one target column may be declared".into()));
        }
        Ok(())
    }
}

enum Builder {
    Nominal(Vec<u32>, Dictionary),
    Numeric(Vec<f64>),
}

/// Reads a dataset CSV (header row required) according to `schema`.
///
/// Descriptor columns come out in schema order. CSV columns the schema does
/// not mention are ignored.
pub fn load_dataset<R: Read>(data: R, schema: &Schema) -> Result<Dataset> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(data);
    let headers = reader.headers()?.clone();
    let mut header_index = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        if header_index.insert(h.to_owned(), i).is_some() {
            return Err(Error::Schema(format!("duplicate column name {h:?} in CSV header")));
        }
    }

    let mut slots = Vec::new();
    let mut target_slot = None;
    for col in &schema.columns {
        if col.role == Role::Ignore {
            continue;
        }
        let Some(&pos) = header_index.get(&col.name) else {
            let what = if col.role == Role::Target { "target" } else { "declared" };
            return Err(Error::Schema(format!("{what} column {:?} absent from CSV", col.name)));
        };
        match col.role {
            Role::Nominal => slots.push((col.name.clone(), pos, Builder::Nominal(Vec::new(), Dictionary::new()))),
            Role::Numeric => slots.push((col.name.clone(), pos, Builder::Numeric(Vec::new()))),
            Role::Target => target_slot = Some((col.name.clone(), pos)),
            Role::Ignore => unreachable!(),
        }
    }

    let mut labels = Dictionary::new();
    let mut truth = Vec::new();
    let mut m = 0;
    for record in reader.records() {
        let record = record?;
        m += 1;
        for (name, pos, builder) in &mut slots {
            let cell = &record[*pos];
            match builder {
                Builder::Nominal(codes, dict) => codes.push(dict.intern(cell)),
                Builder::Numeric(values) => values.push(parse_numeric(cell, m, name)?),
            }
        }
        if let Some((name, pos)) = &target_slot {
            let cell = &record[*pos];
            if cell.is_empty() {
                return Err(Error::Parse {
                    row: m,
                    column: name.clone(),
                    message: "empty target label".into(),
                });
            }
            truth.push(labels.intern(cell));
        }
    }
    if m == 0 {
        return Err(Error::EmptyDataset);
    }

    let columns = slots
        .into_iter()
        .map(|(name, _, builder)| AttributeColumn {
            name,
            values: match builder {
                Builder::Nominal(codes, dictionary) => ColumnValues::Nominal { codes, dictionary },
                Builder::Numeric(values) => ColumnValues::Numeric(values),
            },
        })
        .collect();
    let target = target_slot.map(|(name, _)| name);
    if let Some(name) = &target {
        if labels.len() < 2 {
            return Err(Error::Schema(format!(
                "target column {name:?} must contain at least 2 classes"
            )));
        }
    }
    Ok(Dataset {
        m,
        columns,
        truth: target.as_ref().map(|_| truth),
        target,
        labels,
    })
}

fn parse_numeric(cell: &str, row: usize, column: &str) -> Result<f64> {
    let parsed = cell.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    parsed.ok_or_else(|| Error::Parse {
        row,
        column: column.to_owned(),
        message: format!("cannot parse {cell:?} as a real number"),
    })
}

pub fn load_dataset_path(data: &Path, schema: &Path) -> Result<Dataset> {
    let schema = Schema::from_path(schema)?;
    let file = File::open(data).map_err(|source| Error::Open {
        what: "data",
        path: data.to_owned(),
        source,
    })?;
    load_dataset(file, &schema)
}

/// Reads a prediction CSV: a header of classifier names, then one row of
/// class labels per case of `ds`.
///
/// When `ds` has ground truth its classes are fixed and any other label is an
/// error; otherwise the class dictionary is built from the predictions.
pub fn load_predictions<R: Read>(predictions: R, ds: &Dataset) -> Result<PredictionMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(predictions);
    let names: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    check_classifier_names(&names)?;
    let n = names.len();
    let fixed = ds.truth().is_some();
    let mut labels = ds.labels().clone();
    let mut entries = Vec::with_capacity(ds.m() * n);
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        rows += 1;
        if rows > ds.m() {
            continue;
        }
        for (j, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::IncompleteMatrix {
                    row: rows,
                    column: names[j].clone(),
                });
            }
            let code = if fixed {
                labels.code(cell).ok_or_else(|| Error::UnknownLabel {
                    label: cell.to_owned(),
                    row: rows,
                    column: names[j].clone(),
                })?
            } else {
                labels.intern(cell)
            };
            entries.push(code);
        }
    }
    if rows != ds.m() {
        return Err(Error::Dimension {
            expected: ds.m(),
            found: rows,
        });
    }
    Ok(PredictionMatrix {
        m: rows,
        n,
        entries,
        classifier_names: names,
        labels,
    })
}

pub fn load_predictions_path(path: &Path, ds: &Dataset) -> Result<PredictionMatrix> {
    let file = File::open(path).map_err(|source| Error::Open {
        what: "predictions",
        path: path.to_owned(),
        source,
    })?;
    load_predictions(file, ds)
}

/// Writes descriptors (schema order) and the target column as CSV.
pub fn write_dataset<W: Write>(ds: &Dataset, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = ds.columns.iter().map(|c| c.name.as_str()).collect();
    if let Some(t) = &ds.target {
        header.push(t);
    }
    writer.write_record(&header)?;
    for i in 0..ds.m {
        let mut record: Vec<String> = ds.columns.iter().map(|c| c.display_value(i)).collect();
        if let Some(truth) = &ds.truth {
            record.push(ds.labels.label(truth[i]).to_owned());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_predictions<W: Write>(matrix: &PredictionMatrix, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&matrix.classifier_names)?;
    for row in matrix.rows() {
        writer.write_record(row.iter().map(|&c| matrix.labels.label(c)))?;
    }
    writer.flush()?;
    Ok(())
}
