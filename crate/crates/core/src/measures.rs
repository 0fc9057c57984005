//! Quality measures for classifier controversy.
//!
//! The functions here evaluate one subgroup at a time by walking its members.
//! They are the reference definitions; [`crate::evaluator::Evaluator`]
//! computes the same quantities from precomputed bitset indexes for search.
//!
//! All entropies are base-2 Shannon entropies with `0 log 0 = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Dictionary, PredictionMatrix};
use crate::error::{Error, Result};
use crate::rowset::RowSet;

/// Per-class occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        CountVector { counts, total }
    }

    /// Tallies `codes` into `classes` bins.
    pub fn tally<I: IntoIterator<Item = u32>>(codes: I, classes: usize) -> Self {
        let mut counts = vec![0u64; classes];
        for c in codes {
            counts[c as usize] += 1;
        }
        CountVector::from_counts(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Shannon entropy (bits) of a count vector.
pub fn entropy(counts: &CountVector) -> Result<f64> {
    if counts.total == 0 {
        return Err(Error::UndefinedInput("entropy of an empty count vector"));
    }
    Ok(entropy_of_counts(&counts.counts))
}

/// Entropy of raw counts; 0 for an all-zero vector.
///
/// Terms are summed in ascending count order so the result is bit-identical
/// under any permutation of the counts.
pub(crate) fn entropy_of_counts(counts: &[u64]) -> f64 {
    let mut nonzero: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    if nonzero.len() <= 1 {
        return 0.0;
    }
    nonzero.sort_unstable();
    let total: u64 = nonzero.iter().sum();
    let total = total as f64;
    let h: f64 = nonzero
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Order-independent sum: sorts before adding.
pub(crate) fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// Entropy of the multiset of labels in `codes`.
fn entropy_of_codes(codes: impl Iterator<Item = u32>, classes: usize, scratch: &mut [u64]) -> f64 {
    scratch[..classes].iter_mut().for_each(|c| *c = 0);
    for c in codes {
        scratch[c as usize] += 1;
    }
    entropy_of_counts(&scratch[..classes])
}

/// A label matrix the consistency measures can run on.
pub trait CodeMatrix {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn classes(&self) -> usize;
    fn code(&self, row: usize, col: usize) -> u32;
}

impl CodeMatrix for PredictionMatrix {
    fn rows(&self) -> usize {
        self.m()
    }
    fn cols(&self) -> usize {
        self.n()
    }
    fn classes(&self) -> usize {
        PredictionMatrix::classes(self)
    }
    fn code(&self, row: usize, col: usize) -> u32 {
        self.get(row, col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorKind {
    /// Agreement with the row's most frequent prediction.
    Accordance,
    /// Agreement with the ground truth.
    Correctness,
}

/// `m x n` matrix of 0/1 indicators derived from a prediction matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryIndicatorMatrix {
    kind: IndicatorKind,
    m: usize,
    n: usize,
    entries: Vec<u8>,
}

impl BinaryIndicatorMatrix {
    pub fn kind(&self) -> IndicatorKind {
        self.kind
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// The indicators as a two-class prediction matrix with labels `0`, `1`.
    pub fn to_prediction_matrix(&self) -> PredictionMatrix {
        let names = (0..self.n).map(|j| format!("c{j}")).collect();
        let labels = Dictionary::from_labels(["0", "1"]).expect("distinct");
        let rows: Vec<Vec<u32>> = self
            .entries
            .chunks_exact(self.n)
            .map(|r| r.iter().map(|&b| b as u32).collect())
            .collect();
        PredictionMatrix::new(names, labels, &rows).expect("indicator matrix is a valid 2-class matrix")
    }
}

impl CodeMatrix for BinaryIndicatorMatrix {
    fn rows(&self) -> usize {
        self.m
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn classes(&self) -> usize {
        2
    }
    fn code(&self, row: usize, col: usize) -> u32 {
        self.get(row, col) as u32
    }
}

/// Most frequent prediction per row; ties go to the smallest class code.
pub fn majority_classes(matrix: &PredictionMatrix) -> Vec<u32> {
    let mut counts = vec![0u32; matrix.classes()];
    matrix
        .rows()
        .map(|row| {
            counts.iter_mut().for_each(|c| *c = 0);
            for &c in row {
                counts[c as usize] += 1;
            }
            let mut best = 0;
            for (code, &count) in counts.iter().enumerate() {
                if count > counts[best] {
                    best = code;
                }
            }
            best as u32
        })
        .collect()
}

pub fn accordance_matrix(matrix: &PredictionMatrix) -> BinaryIndicatorMatrix {
    let top = majority_classes(matrix);
    indicator(matrix, IndicatorKind::Accordance, &top)
}

pub fn correctness_matrix(matrix: &PredictionMatrix, truth: Option<&[u32]>) -> Result<BinaryIndicatorMatrix> {
    let truth = truth.ok_or(Error::MissingGroundTruth)?;
    check_len(truth.len(), matrix.m())?;
    Ok(indicator(matrix, IndicatorKind::Correctness, truth))
}

fn indicator(matrix: &PredictionMatrix, kind: IndicatorKind, reference: &[u32]) -> BinaryIndicatorMatrix {
    let entries = matrix
        .rows()
        .zip(reference)
        .flat_map(|(row, &r)| row.iter().map(move |&c| (c == r) as u8))
        .collect();
    BinaryIndicatorMatrix {
        kind,
        m: matrix.m(),
        n: matrix.n(),
        entries,
    }
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// Per-case fraction of classifiers voting for the positive class.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveProbVector(pub Vec<f64>);

impl PositiveProbVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

pub fn ensemble_positive_prob(matrix: &PredictionMatrix, positive: u32) -> Result<PositiveProbVector> {
    if matrix.classes() != 2 {
        return Err(Error::BinaryOnly {
            classes: matrix.classes(),
        });
    }
    let n = matrix.n() as f64;
    Ok(PositiveProbVector(
        matrix
            .rows()
            .map(|row| row.iter().filter(|&&c| c == positive).count() as f64 / n)
            .collect(),
    ))
}

/// Default positive class of a binary label set: the label that sorts last
/// (`1` over `0`, `yes` over `no`).
pub fn default_positive(labels: &Dictionary) -> Option<u32> {
    labels
        .labels()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1))
        .map(|(code, _)| code as u32)
}

fn require_members(sg: &RowSet) -> Result<()> {
    if sg.is_empty() {
        return Err(Error::UndefinedInput("empty subgroup"));
    }
    Ok(())
}

fn mean_row_entropy<M: CodeMatrix>(sg: &RowSet, matrix: &M, extra: Option<(&[u32], usize)>) -> f64 {
    let classes = matrix.classes();
    let mut scratch = vec![0u64; classes];
    let mut sum = 0.0;
    for i in sg {
        let row = (0..matrix.cols()).map(|j| matrix.code(i, j));
        sum += match extra {
            Some((truth, copies)) => entropy_of_codes(
                row.chain(std::iter::repeat_n(truth[i], copies)),
                classes,
                &mut scratch,
            ),
            None => entropy_of_codes(row, classes, &mut scratch),
        };
    }
    sum / sg.count() as f64
}

fn mean_column_entropy<M: CodeMatrix>(sg: &RowSet, matrix: &M) -> f64 {
    let classes = matrix.classes();
    let mut scratch = vec![0u64; classes];
    let mut per_column: Vec<f64> = (0..matrix.cols())
        .map(|j| entropy_of_codes(sg.iter().map(|i| matrix.code(i, j)), classes, &mut scratch))
        .collect();
    stable_sum(&mut per_column) / matrix.cols() as f64
}

/// Mean row entropy minus mean per-classifier entropy, on any label matrix.
pub fn consistency<M: CodeMatrix>(sg: &RowSet, matrix: &M) -> Result<f64> {
    require_members(sg)?;
    check_len(sg.universe(), matrix.rows())?;
    Ok(mean_row_entropy(sg, matrix, None) - mean_column_entropy(sg, matrix))
}

/// Mean per-row entropy of the predictions over the subgroup.
pub fn phi_row(sg: &RowSet, matrix: &PredictionMatrix) -> Result<f64> {
    require_members(sg)?;
    check_len(sg.universe(), matrix.m())?;
    Ok(mean_row_entropy(sg, matrix, None))
}

/// Consistent classification: row controversy while each classifier is
/// internally consistent.
pub fn phi_ccl(sg: &RowSet, matrix: &PredictionMatrix) -> Result<f64> {
    consistency(sg, matrix)
}

/// Consistent accordance: [`phi_ccl`] on the accordance matrix.
pub fn phi_cac(sg: &RowSet, matrix: &PredictionMatrix) -> Result<f64> {
    require_members(sg)?;
    consistency(sg, &accordance_matrix(matrix))
}

/// Consistent correctness: [`phi_ccl`] on the correctness matrix.
pub fn phi_cco(sg: &RowSet, matrix: &PredictionMatrix, truth: Option<&[u32]>) -> Result<f64> {
    let correct = correctness_matrix(matrix, truth)?;
    consistency(sg, &correct)
}

fn truth_augmented(sg: &RowSet, matrix: &PredictionMatrix, truth: Option<&[u32]>, copies: usize) -> Result<f64> {
    let truth = truth.ok_or(Error::MissingGroundTruth)?;
    check_len(truth.len(), matrix.m())?;
    if let Some(&bad) = truth.iter().find(|&&c| c as usize >= matrix.classes()) {
        return Err(Error::UnknownLabel {
            label: bad.to_string(),
            row: 0,
            column: "truth".into(),
        });
    }
    require_members(sg)?;
    check_len(sg.universe(), matrix.m())?;
    Ok(mean_row_entropy(sg, matrix, Some((truth, copies))))
}

/// Mean row entropy with the true label appended once per row.
pub fn phi_gt_yac(sg: &RowSet, matrix: &PredictionMatrix, truth: Option<&[u32]>) -> Result<f64> {
    truth_augmented(sg, matrix, truth, 1)
}

/// Mean row entropy with the true label appended `n` times per row.
pub fn phi_gt_yac_prime(sg: &RowSet, matrix: &PredictionMatrix, truth: Option<&[u32]>) -> Result<f64> {
    truth_augmented(sg, matrix, truth, matrix.n())
}

/// Average subranking loss of the soft scores `prob` inside the subgroup.
///
/// For every positive case `p`, counts the negatives scored strictly above
/// it plus half the negatives tied with it; returns the mean over positives.
pub fn phi_rasl(sg: &RowSet, prob: &PositiveProbVector, truth: Option<&[u32]>, positive: u32) -> Result<f64> {
    let truth = truth.ok_or(Error::MissingGroundTruth)?;
    check_len(truth.len(), prob.0.len())?;
    check_len(sg.universe(), prob.0.len())?;
    let mut members: Vec<(f64, bool)> = sg.iter().map(|i| (prob.0[i], truth[i] == positive)).collect();
    let positives = members.iter().filter(|m| m.1).count();
    if positives == 0 || positives == members.len() {
        return Err(Error::UndefinedSubgroup("needs at least one positive and one negative case"));
    }
    // descending by score; ties form groups
    members.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut negatives_above = 0u64;
    let mut loss = 0.0;
    let mut start = 0;
    while start < members.len() {
        let mut end = start;
        while end < members.len() && members[end].0.total_cmp(&members[start].0).is_eq() {
            end += 1;
        }
        let group = &members[start..end];
        let pos = group.iter().filter(|m| m.1).count() as u64;
        let neg = group.len() as u64 - pos;
        loss += pos as f64 * (negatives_above as f64 + 0.5 * neg as f64);
        negatives_above += neg;
        start = end;
    }
    Ok(loss / positives as f64)
}

/// Identifier of a quality measure, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "row")]
    Row,
    #[serde(rename = "ccl")]
    Ccl,
    #[serde(rename = "cac")]
    Cac,
    #[serde(rename = "cco")]
    Cco,
    #[serde(rename = "gt-yac")]
    GtYac,
    #[serde(rename = "gt-yac2")]
    GtYac2,
    #[serde(rename = "rasl")]
    Rasl,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Row,
        Measure::Ccl,
        Measure::Cac,
        Measure::Cco,
        Measure::GtYac,
        Measure::GtYac2,
        Measure::Rasl,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Measure::Row => "row",
            Measure::Ccl => "ccl",
            Measure::Cac => "cac",
            Measure::Cco => "cco",
            Measure::GtYac => "gt-yac",
            Measure::GtYac2 => "gt-yac2",
            Measure::Rasl => "rasl",
        }
    }

    pub fn requires_truth(self) -> bool {
        matches!(self, Measure::Cco | Measure::GtYac | Measure::GtYac2 | Measure::Rasl)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.token() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown measure {s:?} (expected one of row, ccl, cac, cco, gt-yac, gt-yac2, rasl)"
                ))
            })
    }
}

/// A measure value together with the same measure on the whole dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityValue {
    pub value: f64,
    pub measure: Measure,
    pub baseline: f64,
}

/// Positive class for `rasl`: the explicit choice if given, else
/// [`default_positive`]. Errors when the target is not binary.
pub fn resolve_positive(ds: &Dataset, positive: Option<&str>) -> Result<u32> {
    let labels = ds.labels();
    if ds.truth().is_none() {
        return Err(Error::MissingGroundTruth);
    }
    if labels.len() != 2 {
        return Err(Error::BinaryOnly { classes: labels.len() });
    }
    match positive {
        Some(label) => labels
            .code(label)
            .ok_or_else(|| Error::Config(format!("positive class {label:?} is not a target label"))),
        None => Ok(default_positive(labels).expect("two labels")),
    }
}

/// `measure` on the subgroup, by direct evaluation.
pub fn evaluate_measure(
    measure: Measure,
    sg: &RowSet,
    ds: &Dataset,
    matrix: &PredictionMatrix,
    positive: Option<&str>,
) -> Result<f64> {
    let truth = ds.truth();
    match measure {
        Measure::Row => phi_row(sg, matrix),
        Measure::Ccl => phi_ccl(sg, matrix),
        Measure::Cac => phi_cac(sg, matrix),
        Measure::Cco => phi_cco(sg, matrix, truth),
        Measure::GtYac => phi_gt_yac(sg, matrix, truth),
        Measure::GtYac2 => phi_gt_yac_prime(sg, matrix, truth),
        Measure::Rasl => {
            let positive = resolve_positive(ds, positive)?;
            let prob = ensemble_positive_prob(matrix, positive)?;
            phi_rasl(sg, &prob, truth, positive)
        }
    }
}

/// The measure on the whole dataset.
pub fn measure_baseline(measure: Measure, ds: &Dataset, matrix: &PredictionMatrix, positive: Option<&str>) -> Result<f64> {
    check_len(matrix.m(), ds.m())?;
    evaluate_measure(measure, &RowSet::full(ds.m()), ds, matrix, positive)
}
